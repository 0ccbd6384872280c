"""Tasks, sample streams, and policies.

Each task hides a value mu in [-1, 1]; the learner only sees samples whose
conditional mean is mu, pays one unit of cost per sample, and finally accepts
(reward mu) or rejects (reward 0).  This script builds an environment, walks
through a few tasks by hand, and runs the built-in capped Hoeffding policies.
"""

import perpolicy as pp

# Values are +0.6 or -0.6 with equal probability; samples are +/-1 coin flips
# with conditional mean equal to the hidden value.
env = pp.Environment(
    values=pp.ValueDistribution.uniform_finite((-0.6, 0.6)),
    samples=pp.SampleModel.binary_pm1(),
    seed=2024,
)

print("== raw task protocol ==")
task = pp.new_task(env, 0)
print("hidden value (visible to evaluation only):", task.mu)
print("first five samples:", [pp.draw_sample(task) for _ in range(5)])

# Tasks replay: the same (environment, index) always gives the same stream.
again = pp.new_task(env, 0)
print("replayed samples:", [pp.draw_sample(again) for _ in range(5)])

print()
print("== capped Hoeffding family ==")
# tau_k stops when |running mean| >= c sqrt(ln(K N / delta) / n), capped at k;
# accept fires on the signed version of the same test.
family = pp.CappedHoeffdingFamily(c=0.35, K=6, N=200, delta=0.1)
for pol in family.policies():
    outcome = pp.run_policy(pol, pp.new_task(env, 100 + pol.index))
    print(
        f"policy {pol.index} (cap {pol.cap}): drew {outcome.duration} samples, "
        f"decision {outcome.decision}, reward {outcome.reward:+.2f}"
    )

print()
print("== oversampling ==")
# Drawing 2 * block samples while deciding on the first block costs more but
# the untouched second block supports unbiased reward estimates downstream.
pol = family.policy(4)
over = pp.run_policy_oversampled(pol, block=6, task=pp.new_task(env, 500))
print("first block:", over.first_block)
print("second block (never touches the decision):", over.second_block)
print("duration", over.duration, "decision", over.decision, "cost", over.cost)

# The all-reject wrapper (tau, 0) pays the sampling cost but never accepts,
# which is how search procedures probe policies without risking reward.
probe = pp.always_reject(pol)
print("all-reject probe decision:", pp.run_policy(probe, pp.new_task(env, 501)).decision)
