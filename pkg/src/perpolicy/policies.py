"""Policies: prefix-measurable stopping and decision rules, plus built-in families.

A policy pairs a duration (how many samples to draw, reading only the observed
prefix) with a binary decision that depends only on the first d samples.  The
flagship family stops when the running average clears a Hoeffding-style
threshold, capped at D_k samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .env import Task


class SampleView:
    """Learner-facing view of a task's stream: indexable and value-blind.

    Exposes samples only; the hidden mu is not reachable from policy code.
    """

    __slots__ = ("_task",)

    def __init__(self, task: Task):
        self._task = task

    def __getitem__(self, i: int) -> float:
        return self._task.sample_at(i)


@dataclass(frozen=True)
class HoeffdingRule:
    """Stop when |mean| >= c * sqrt(ln(K*N/delta) / n); accept on the signed test."""

    c: float
    n_class: int
    horizon: int
    delta: float

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        scale = self.c * self.c * math.log(self.n_class * self.horizon / self.delta)
        object.__setattr__(self, "_scale", scale)

    def threshold(self, n: int) -> float:
        return math.sqrt(self._scale / n)  # type: ignore[attr-defined]

    def stops(self, n: int, mean: float) -> bool:
        return abs(mean) >= self.threshold(n)

    def accepts(self, n: int, mean: float) -> bool:
        return mean >= self.threshold(n)

    def accepts_array(self, n: int, means: np.ndarray) -> np.ndarray:
        return means >= self.threshold(n)


@dataclass(frozen=True)
class FixedWindowRule:
    """Never stop early; accept when the window mean clears a fixed threshold."""

    accept_threshold: float

    def stops(self, n: int, mean: float) -> bool:
        return False

    def accepts(self, n: int, mean: float) -> bool:
        return mean >= self.accept_threshold

    def accepts_array(self, n: int, means: np.ndarray) -> np.ndarray:
        return means >= self.accept_threshold


@dataclass(frozen=True)
class Policy:
    """A (duration, decision) pair with an index and a hard cap on duration.

    duration reads the stream prefix it consumes and returns d in [1, cap];
    decision(d, x) depends only on x[0:d].  mean_rule is set when both depend
    on the prefix only through (n, running mean), which enables exact oracles
    and vectorized evaluation; fixed_duration marks constant-duration policies.
    """

    index: int
    cap: int
    duration: Callable[[Sequence[float]], int]
    decision: Callable[[int, Sequence[float]], int]
    label: str = ""
    mean_rule: object | None = None
    fixed_duration: int | None = None
    rejects_always: bool = False

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("policy index must be >= 1")
        if self.cap < 1:
            raise ValueError("policy cap must be >= 1")


def _prefix_mean(x: Sequence[float], n: int) -> float:
    total = 0.0
    for i in range(n):
        total += x[i]
    return total / n


def mean_rule_policy(index: int, cap: int, rule, label: str = "") -> Policy:
    """Policy whose stopping and decision depend on (n, running mean) only."""

    def duration(x: Sequence[float]) -> int:
        total = 0.0
        for n in range(1, cap + 1):
            total += x[n - 1]
            if n < cap and rule.stops(n, total / n):
                return n
        return cap

    def decision(n: int, x: Sequence[float]) -> int:
        return 1 if rule.accepts(n, _prefix_mean(x, n)) else 0

    fixed = cap if isinstance(rule, FixedWindowRule) else (1 if cap == 1 else None)
    return Policy(index, cap, duration, decision, label, mean_rule=rule, fixed_duration=fixed)


def reject_policy(duration_value: int, index: int = 1) -> Policy:
    """Constant-duration policy that always rejects: the (d, 0) pair."""

    def duration(x: Sequence[float]) -> int:
        return duration_value

    def decision(n: int, x: Sequence[float]) -> int:
        return 0

    return Policy(
        index,
        duration_value,
        duration,
        decision,
        label=f"reject({duration_value})",
        fixed_duration=duration_value,
        rejects_always=True,
    )


def always_reject(policy: Policy) -> Policy:
    """The (tau, 0) wrapper: same duration, decision identically zero."""
    return Policy(
        policy.index,
        policy.cap,
        policy.duration,
        lambda n, x: 0,
        label=f"reject[{policy.label or policy.index}]",
        fixed_duration=policy.fixed_duration,
        rejects_always=True,
    )


def hoeffding_duration(
    k: int, c: float, K: int, N: int, delta: float, stream: Sequence[float]
) -> int:
    """Samples drawn by the capped Hoeffding stopping rule on this stream."""
    if k < 1:
        raise ValueError("cap k must be >= 1")
    rule = HoeffdingRule(c, K, N, delta)
    total = 0.0
    for n in range(1, k + 1):
        total += stream[n - 1]
        if n < k and rule.stops(n, total / n):
            return n
    return k


def hoeffding_decision(
    n: int, c: float, K: int, N: int, delta: float, prefix: Sequence[float]
) -> int:
    """1 iff the mean of the first n samples clears the Hoeffding threshold."""
    rule = HoeffdingRule(c, K, N, delta)
    return 1 if rule.accepts(n, _prefix_mean(prefix, n)) else 0


@dataclass(frozen=True)
class CappedHoeffdingFamily:
    """The K-policy family of Hoeffding stopping rules with caps D_1 <= ... <= D_K."""

    c: float
    K: int
    N: int
    delta: float
    caps: tuple[int, ...] = ()

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        caps = self.caps if self.caps else tuple(range(1, self.K + 1))
        if len(caps) != self.K:
            raise ValueError("caps must have length K")
        if any(d < 1 for d in caps):
            raise ValueError("caps must be positive")
        if any(caps[i] > caps[i + 1] for i in range(len(caps) - 1)):
            raise ValueError("caps must be nondecreasing")
        object.__setattr__(self, "caps", caps)
        object.__setattr__(self, "_rule", HoeffdingRule(self.c, self.K, self.N, self.delta))

    def policy(self, k: int) -> Policy:
        if not 1 <= k <= self.K:
            raise ValueError(f"index {k} outside 1..{self.K}")
        rule = self._rule  # type: ignore[attr-defined]
        return mean_rule_policy(k, self.caps[k - 1], rule, label=f"hoeffding[{k}]")

    def policies(self) -> list[Policy]:
        return [self.policy(k) for k in range(1, self.K + 1)]


class PolicyGenerator:
    """Countable policy family indexed from 1, with nondecreasing caps."""

    def __init__(self, build: Callable[[int], Policy], label: str = ""):
        self._build = build
        self._cache: dict[int, Policy] = {}
        self.label = label

    def __call__(self, k: int) -> Policy:
        if k < 1:
            raise ValueError("policy index must be >= 1")
        pol = self._cache.get(k)
        if pol is None:
            pol = self._build(k)
            if pol.index != k:
                raise ValueError(f"builder returned index {pol.index} for request {k}")
            for j, other in self._cache.items():
                if (j < k and other.cap > pol.cap) or (j > k and other.cap < pol.cap):
                    raise ValueError("caps must be nondecreasing in the index")
            self._cache[k] = pol
        return pol

    def cap(self, k: int) -> int:
        return self(k).cap

    def prefix(self, K: int) -> list[Policy]:
        return [self(k) for k in range(1, K + 1)]


def hoeffding_generator(c: float, K: int, N: int, delta: float) -> PolicyGenerator:
    """Countable Hoeffding family with caps D_k = k; threshold constants fixed."""
    rule = HoeffdingRule(c, K, N, delta)
    return PolicyGenerator(
        lambda k: mean_rule_policy(k, k, rule, label=f"hoeffding[{k}]"),
        label="capped_hoeffding",
    )


def fixed_window_generator(accept_threshold: float) -> PolicyGenerator:
    """Countable family of constant-duration policies tau_k = k with one threshold."""
    rule = FixedWindowRule(accept_threshold)
    return PolicyGenerator(
        lambda k: mean_rule_policy(k, k, rule, label=f"window[{k}]"),
        label="fixed_window",
    )


@dataclass(frozen=True)
class TaskOutcome:
    """Result of running a policy on one task (mu recorded for evaluation only)."""

    duration: int
    decision: int
    reward: float
    cost: int
    mu: float


@dataclass(frozen=True)
class OversampledOutcome:
    """Result of an oversampled run: 2*block draws, decision from the first block."""

    first_block: tuple[float, ...]
    second_block: tuple[float, ...]
    duration: int
    decision: int
    mu: float

    @property
    def block(self) -> int:
        return len(self.first_block)

    @property
    def cost(self) -> int:
        return 2 * len(self.first_block)


def run_policy(policy: Policy, task: Task) -> TaskOutcome:
    """Draw exactly duration(stream) samples, decide, and score the task."""
    view = SampleView(task)
    d = policy.duration(view)
    if not 1 <= d <= policy.cap:
        raise ValueError(f"duration {d} outside [1, {policy.cap}]")
    a = policy.decision(d, view)
    return TaskOutcome(d, a, task.mu * a, d, task.mu)


def run_policy_oversampled(policy: Policy, block: int, task: Task) -> OversampledOutcome:
    """Draw 2*block samples; duration and decision come from the first block only."""
    if block < policy.cap:
        raise ValueError(f"block {block} smaller than policy cap {policy.cap}")
    xs = [task.draw() for _ in range(2 * block)]
    first = tuple(xs[:block])
    second = tuple(xs[block:])
    d = policy.duration(first)
    if not 1 <= d <= policy.cap:
        raise ValueError(f"duration {d} outside [1, {policy.cap}]")
    a = policy.decision(d, first)
    return OversampledOutcome(first, second, d, a, task.mu)


def duration_on_prefix(policy: Policy, prefix: Sequence[float]) -> int | None:
    """Stopping time if it is determined by this prefix, else None.

    Pads the prefix to the cap; by prefix-measurability the padding cannot
    change a stopping time that falls inside the prefix.
    """
    padded = tuple(prefix) + (0.0,) * (policy.cap - len(prefix))
    d = policy.duration(padded)
    return d if d <= len(prefix) else None


def assert_prefix_measurable(
    policy: Policy,
    n_streams: int = 1000,
    seed: int = 0,
    sample_values: Sequence[float] = (-1.0, 1.0),
) -> None:
    """Randomized harness: rewriting the suffix beyond duration(x) must change nothing.

    Raises AssertionError with a witness stream on the first violation.
    """
    rng = np.random.default_rng(seed)
    vals = np.asarray(sample_values, dtype=float)
    length = policy.cap + 4
    for trial in range(n_streams):
        x = list(vals[rng.integers(0, len(vals), size=length)])
        d = policy.duration(x)
        a = policy.decision(d, x)
        y = list(x)
        for i in range(d, length):
            y[i] = float(vals[rng.integers(0, len(vals))])
        if policy.duration(y) != d or policy.decision(d, y) != a:
            raise AssertionError(
                f"policy {policy.label or policy.index} reacted to a suffix rewrite "
                f"(trial {trial}): x={x} y={y}"
            )
