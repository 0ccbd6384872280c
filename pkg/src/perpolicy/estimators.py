"""Interval estimates of per-policy reward and cost from oversampled tasks.

Each exploration task contributes, for every live policy k, one unbiased
reward term (second-block mean times the policy's replayed decision on the
first block) and one cost term (the policy's replayed duration).  Hoeffding
radii turn the running means into simultaneous confidence intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .policies import OversampledOutcome, Policy


class RatioUndefinedError(RuntimeError):
    """Raised when a ratio bound is requested but the cost lower bound is <= 0."""


def radius(n: int, K: int, n_ex: int, delta: float) -> float:
    """The deviation radius sqrt(ln(4*K*n_ex/delta) / (2n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(math.log(4.0 * K * n_ex / delta) / (2.0 * n))


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


class EstimatorState:
    """Running reward/cost sums for each candidate policy.

    Per-task reward terms are stored already normalized by the block length in
    force at that task, so the sums stay valid as eliminations shrink the
    candidate set (and with it the oversampling block).
    """

    def __init__(self, policies: Sequence[Policy], n_ex: int, delta: float):
        if not policies:
            raise ValueError("need at least one policy")
        indices = [p.index for p in policies]
        if indices != list(range(1, len(policies) + 1)):
            raise ValueError("policies must be indexed 1..K in order")
        caps = [p.cap for p in policies]
        if any(caps[i] > caps[i + 1] for i in range(len(caps) - 1)):
            raise ValueError("policy caps must be nondecreasing")
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        self.policies = {p.index: p for p in policies}
        self.K = len(policies)
        self.n_ex = n_ex
        self.delta = delta
        self.n = 0
        self.reward_sum = {k: 0.0 for k in self.policies}
        self.cost_sum = {k: 0.0 for k in self.policies}

    def cap(self, k: int) -> int:
        return self.policies[k].cap

    def update(self, outcome: OversampledOutcome, candidates: Iterable[int]) -> None:
        """Fold one oversampled task into the sums of every candidate policy."""
        live = list(candidates)
        block = outcome.block
        max_cap = max(self.cap(k) for k in live)
        if block < max_cap:
            raise ValueError(f"block {block} smaller than largest candidate cap {max_cap}")
        if len(outcome.second_block) != block:
            raise ValueError("second block length does not match the first")
        second_mean = sum(outcome.second_block) / block
        first = outcome.first_block
        for k in live:
            pol = self.policies[k]
            d = pol.duration(first)
            a = pol.decision(d, first)
            self.reward_sum[k] += second_mean * a
            self.cost_sum[k] += d
        self.n += 1

    def radius_at(self, n: int | None = None) -> float:
        return radius(self.n if n is None else n, self.K, self.n_ex, self.delta)

    def point_reward(self, k: int) -> float:
        self._require_data()
        return self.reward_sum[k] / self.n

    def point_cost(self, k: int) -> float:
        self._require_data()
        return self.cost_sum[k] / self.n

    def reward_bounds(self, k: int) -> IntervalEstimate:
        """Reward interval: running mean plus/minus twice the radius."""
        mean = self.point_reward(k)
        eps = self.radius_at()
        return IntervalEstimate(mean - 2.0 * eps, mean + 2.0 * eps)

    def cost_bounds(self, k: int) -> IntervalEstimate:
        """Cost interval: running mean plus/minus (D_k - 1) times the radius."""
        mean = self.point_cost(k)
        slack = (self.cap(k) - 1) * self.radius_at()
        return IntervalEstimate(mean - slack, mean + slack)

    def ratio_bounds(self, k: int) -> IntervalEstimate:
        """Confidence interval for reward/cost, branch chosen by the reward sign."""
        r = self.reward_bounds(k)
        c = self.cost_bounds(k)
        if c.lower <= 0.0:
            raise RatioUndefinedError(
                f"cost lower bound {c.lower} <= 0 for policy {k}; "
                "not enough tasks for ratio comparisons"
            )
        if r.upper >= 0.0:
            return IntervalEstimate(r.lower / c.upper, r.upper / c.lower)
        return IntervalEstimate(r.lower / c.lower, r.upper / c.upper)

    def _require_data(self) -> None:
        if self.n < 1:
            raise ValueError("no tasks folded in yet")
