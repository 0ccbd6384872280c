"""Reference environments and small policy families used by tests and demos."""

from __future__ import annotations

from typing import Sequence

from .env import Environment, SampleModel, ValueDistribution
from .policies import FixedWindowRule, Policy, mean_rule_policy


def sign_test_env(eps: float, seed: int = 0) -> Environment:
    """Values uniform on {-eps, +eps} with +/-1 samples.

    The classic head-to-head fixture: a one-sample sign test earns ratio
    eps^2 / 2 here, far above the eps^3 scale of long fixed-length tests.
    """
    return Environment(
        values=ValueDistribution.uniform_finite((-eps, eps)),
        samples=SampleModel.binary_pm1(),
        seed=seed,
    )


def spread_env(lo: float, hi: float, seed: int = 0) -> Environment:
    """Values uniform on {lo, hi} with +/-1 samples."""
    return Environment(
        values=ValueDistribution.uniform_finite((lo, hi)),
        samples=SampleModel.binary_pm1(),
        seed=seed,
    )


def tri_value_env(seed: int = 0) -> Environment:
    """Values uniform on {-1, 0, 1} with +/-1 samples.

    The +/-1 values are resolved after a handful of samples while the zero
    value burns the whole cap, which is what drives the per-task-ratio
    objective g3 apart from the ratio of expectations.
    """
    return Environment(
        values=ValueDistribution.uniform_finite((-1.0, 0.0, 1.0)),
        samples=SampleModel.binary_pm1(),
        seed=seed,
    )


def one_sample_sign_policy() -> Policy:
    """Draw one sample, accept iff it is +1 (under +/-1 samples)."""
    return mean_rule_policy(1, 1, FixedWindowRule(1.0), label="sign@1")


def window_family(durations: Sequence[int], accept_threshold: float = 1.0) -> list[Policy]:
    """Constant-duration policies sharing one acceptance threshold."""
    rule = FixedWindowRule(accept_threshold)
    return [
        mean_rule_policy(i + 1, d, rule, label=f"window[{d}]")
        for i, d in enumerate(durations)
    ]
