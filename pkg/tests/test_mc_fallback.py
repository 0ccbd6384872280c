"""Continuous sample models: exact oracles refuse, Monte Carlo takes over."""

import math

import pytest

from perpolicy.env import Environment, SampleModel, ValueDistribution
from perpolicy.experiments import run_experiment
from perpolicy.fixtures import window_family
from perpolicy.oracle import oracle_values
from perpolicy.cape import CapeConfig, run_cape


def window_env(seed=0):
    return Environment(
        values=ValueDistribution.uniform_finite((-0.4, 0.5)),
        samples=SampleModel.uniform_window(0.3),
        seed=seed,
    )


class TestMonteCarloFallback:
    def test_oracle_values_fall_back(self):
        policies = window_family([1, 2], accept_threshold=0.2)
        ov = oracle_values(policies, window_env(), mc_trials=40_000, seed=3)
        assert all(v.method == "monte_carlo" for v in ov.values.values())
        assert all(v.reward_se > 0 for v in ov.values.values())
        # Analytic check for the one-sample policy: X ~ U[mu - w, mu + w],
        # accept iff X >= t, reward = mu * P(X >= t) averaged over mu.
        w, t = 0.3, 0.2
        expected = 0.0
        for mu in (-0.4, 0.5):
            p_accept = min(max((mu + w - t) / (2 * w), 0.0), 1.0)
            expected += 0.5 * mu * p_accept
        v1 = ov.values[1]
        assert abs(v1.reward - expected) <= 4 * v1.reward_se

    def test_forced_exact_raises(self):
        policies = window_family([1])
        with pytest.raises(ValueError):
            oracle_values(policies, window_env(), method="exact")

    def test_cape_runs_on_continuous_model(self):
        policies = window_family([1, 2], accept_threshold=0.2)
        log = run_cape(policies, window_env(seed=5), CapeConfig(n_tasks=300, delta=0.2, n_ex=60))
        assert log.selected_index in (1, 2)
        assert log.n_tasks == 300

    def test_experiment_summary_reports_mc_method(self, tmp_path):
        cfg = {
            "env": window_env().to_config(),
            "policies": {
                "family": "custom", "kind": "fixed_window",
                "accept_threshold": 0.2, "durations": [1, 2],
            },
            "algorithm": {"name": "cape", "delta": 0.2, "n_ex": 40},
            "N": 300,
            "trials": 2,
            "seed": 17,
        }
        summary = run_experiment(cfg, tmp_path)
        methods = {row["method"] for row in summary["oracle"]["values"]}
        assert methods == {"monte_carlo"}
        assert all(row["std_error"] > 0 for row in summary["oracle"]["values"])
        assert math.isfinite(summary["regret"])
