"""Reducing a countable policy family to a finite one, then learning in it.

The doubling search probes policies 2, 4, 8, ... with all-reject runs (cost
but never reward).  Once some probed policy shows certifiably positive
reward, its cost/reward ratio caps the cost any optimal policy can afford,
and the search keeps doubling until a probed policy provably exceeds that
cap.  The returned index bounds every optimal policy with high probability.
"""

import perpolicy as pp
from perpolicy.fixtures import spread_env

env = spread_env(-0.9, 0.9, seed=31)
generator = pp.fixed_window_generator(1.0)  # tau_k == k, accept iff all +1

print("== the doubling search alone ==")
config = pp.EscConfig(delta=0.1, epsilons=0.1, task_budget=3_000)
result = pp.run_esc(generator, env, config)
for probe in result.probes:
    print(
        f"stage {probe.stage} ({probe.phase}): policy {probe.policy_index} over "
        f"{probe.m} tasks -> estimate {probe.estimate:.4f}"
    )
print(
    f"halted={result.halted}: index bound K={result.index_bound}, "
    f"anchor lcb {result.anchor_reward_lcb:.4f}, "
    f"{result.tasks_used} tasks, {result.samples_used} samples, zero reward risked"
)

print()
print("== a hopeless environment hits the budget instead of looping ==")
dead_env = pp.Environment(
    values=pp.ValueDistribution.point_mass(-1.0),
    samples=pp.SampleModel.binary_pm1(),
    seed=1,
)
failed = pp.run_esc(generator, dead_env, pp.EscConfig(0.1, 0.1, task_budget=400))
print(f"halted={failed.halted}, tasks used {failed.tasks_used} (budget)")

print()
print("== search + elimination end to end ==")
# The experiment runner wires the two stages through one task counter: the
# search consumes a prefix of tasks, elimination runs on policies 1..K after.
cfg = {
    "env": env.to_config(),
    "policies": {"family": "custom", "kind": "fixed_window", "accept_threshold": 1.0},
    "algorithm": {
        "name": "esc-cape", "delta": 0.1, "n_ex": "ceil(N^(2/3))",
        "epsilon": 0.1, "task_budget": 2_500,
    },
    "N": 20_000,
    "trials": 4,
    "seed": 99,
}
summary = pp.run_experiment(cfg, "/tmp/perpolicy_demo_esc_cape", quiet=True)
print("search returned K:", summary["esc_K"], "| committed policy:", summary["selected_k"])
print(
    f"benchmark {summary['benchmark']:.4f}, realized {summary['realized_ratio']:.4f}, "
    f"regret {summary['regret']:.4f}"
)
