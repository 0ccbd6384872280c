"""Ground-truth policy values and the choice of performance measure.

The benchmark objective is reward(pi) / cost(pi), a ratio of expectations.
This script computes it exactly on small environments, cross-checks Monte
Carlo against the exact oracle, contrasts the ratio with the per-task ratio
objective g3, and reproduces the one-sample-versus-long-test comparison.
"""

import perpolicy as pp
from perpolicy.fixtures import one_sample_sign_policy, sign_test_env, tri_value_env

print("== one-sample sign testing on values +/- eps ==")
# Accepting iff the single sample is +1 earns eps^2/2 per sample; a test long
# enough to resolve the sign (~1/eps^2 samples) only earns on the eps^3 scale.
for eps in (0.05, 0.1, 0.2):
    value = pp.exact_policy_value(one_sample_sign_policy(), sign_test_env(eps))
    print(
        f"eps={eps:>5}: ratio {value.ratio:.6f} = eps^2/2, "
        f"long-test scale eps^3 = {eps**3:.6f}, advantage x{value.ratio / eps**3:.0f}"
    )

print()
print("== Monte Carlo agrees with the exact oracle ==")
env = sign_test_env(0.2, seed=5)
policy = one_sample_sign_policy()
exact = pp.exact_policy_value(policy, env)
mc = pp.mc_policy_value(policy, env, trials=50_000, seed=11)
print(f"exact reward {exact.reward:.6f}, mc reward {mc.reward:.6f} +/- {mc.reward_se:.6f}")

print()
print("== why the expectation of the per-task ratio misleads ==")
# On values {-1, 0, 1} the zero value burns the whole cap for zero reward.
# The per-task ratio g3 ignores that cost almost entirely; the ratio of
# expectations charges for it.
env3 = tri_value_env()
for K in (16, 32, 64):
    pol = pp.CappedHoeffdingFamily(c=0.64, K=K, N=100, delta=0.1).policy(K)
    g3 = pp.objective_g3(pol, env3, method="exact")
    value = pp.exact_policy_value(pol, env3)
    print(f"cap {K:>2}: g3 {g3:.4f} vs ratio {value.ratio:.4f} (overshoot x{g3/value.ratio:.2f})")

print()
print("== the budgeted objective converges to the ratio ==")
for budget in (10**2, 10**3, 10**4):
    g2 = pp.objective_g2(policy, env, budget=budget, trials=50, seed=7)
    print(f"budget {budget:>6}: g2 {g2:.6f} (ratio {exact.ratio:.6f})")

print()
print("== no unbiased one-sample reward estimate exists ==")
report = pp.impossibility_check((0.5, 1.0 / 3.0))
for line in report.lines:
    print(" ", line)
