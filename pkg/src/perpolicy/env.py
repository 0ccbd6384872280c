"""Environments: value distributions, conditional sample models, seeded tasks.

A task hides a value mu drawn from a finite distribution on [-1, 1] and serves
an i.i.d. sample stream whose conditional mean is exactly mu.  Each task's
randomness is a counter-based substream of (environment seed, task index), so
tasks replay identically and are mutually independent regardless of how many
samples each one consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from . import streams

PROB_TOL = 1e-12
_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class ValueDistribution:
    """Finite distribution of hidden task values, supported in [-1, 1]."""

    kind: str
    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("discrete", "uniform_finite"):
            raise ValueError(f"unknown value distribution kind: {self.kind!r}")
        if not self.values:
            raise ValueError("value support must be nonempty")
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs must have equal length")
        for v in self.values:
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"support value {v} outside [-1, 1]")
        for p in self.probs:
            if p < 0.0:
                raise ValueError(f"negative probability {p}")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        cum = []
        acc = 0.0
        for p in self.probs:
            acc += p
            cum.append(acc)
        object.__setattr__(self, "_cum", tuple(cum))

    @classmethod
    def discrete(cls, support: Iterable[tuple[float, float]]) -> "ValueDistribution":
        pairs = tuple((float(v), float(p)) for v, p in support)
        return cls("discrete", tuple(v for v, _ in pairs), tuple(p for _, p in pairs))

    @classmethod
    def uniform_finite(cls, values: Iterable[float]) -> "ValueDistribution":
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("value support must be nonempty")
        p = 1.0 / len(vals)
        return cls("uniform_finite", vals, tuple(p for _ in vals))

    @classmethod
    def point_mass(cls, value: float) -> "ValueDistribution":
        return cls.discrete(((value, 1.0),))

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    def sample(self, u: float) -> float:
        """Inverse-CDF draw from one uniform."""
        cum = self._cum  # type: ignore[attr-defined]
        for i, c in enumerate(cum):
            if u < c:
                return self.values[i]
        return self.values[-1]

    def sample_array(self, u: np.ndarray) -> np.ndarray:
        cum = np.asarray(self._cum)  # type: ignore[attr-defined]
        idx = np.searchsorted(cum, u, side="right")
        idx = np.minimum(idx, len(self.values) - 1)
        return np.asarray(self.values)[idx]

    def to_config(self) -> dict:
        if self.kind == "uniform_finite":
            return {"kind": "uniform_finite", "values": list(self.values)}
        return {"kind": "discrete", "support": [[v, p] for v, p in zip(self.values, self.probs)]}

    @classmethod
    def from_config(cls, cfg: dict) -> "ValueDistribution":
        kind = cfg.get("kind")
        if kind == "uniform_finite":
            return cls.uniform_finite(cfg["values"])
        if kind == "discrete":
            return cls.discrete((tuple(item) for item in cfg["support"]))
        raise ValueError(f"unknown value distribution kind: {kind!r}")


@dataclass(frozen=True)
class SampleModel:
    """Conditional sample model with E[X | mu] = mu and support in [-1, 1]."""

    kind: str
    halfwidth: float = 0.0

    def __post_init__(self):
        if self.kind not in ("binary_pm1", "bernoulli01", "uniform_window"):
            raise ValueError(f"unknown sample model kind: {self.kind!r}")
        if self.kind == "uniform_window" and not 0.0 < self.halfwidth <= 1.0:
            raise ValueError("uniform_window halfwidth must be in (0, 1]")

    @classmethod
    def binary_pm1(cls) -> "SampleModel":
        return cls("binary_pm1")

    @classmethod
    def bernoulli01(cls) -> "SampleModel":
        return cls("bernoulli01")

    @classmethod
    def uniform_window(cls, halfwidth: float) -> "SampleModel":
        return cls("uniform_window", float(halfwidth))

    def admissible(self, mu: float) -> bool:
        if self.kind == "binary_pm1":
            return -1.0 <= mu <= 1.0
        if self.kind == "bernoulli01":
            return 0.0 <= mu <= 1.0
        return abs(mu) + self.halfwidth <= 1.0

    def mean(self, mu: float) -> float:
        """Analytic conditional mean; equals mu for every admissible mu."""
        if not self.admissible(mu):
            raise ValueError(f"value {mu} not admissible for {self.kind}")
        return mu

    def sample(self, mu: float, u: float) -> float:
        if self.kind == "binary_pm1":
            return 1.0 if u < 0.5 * (1.0 + mu) else -1.0
        if self.kind == "bernoulli01":
            return 1.0 if u < mu else 0.0
        return mu - self.halfwidth + 2.0 * self.halfwidth * u

    def sample_array(self, mu: np.ndarray, u: np.ndarray) -> np.ndarray:
        if self.kind == "binary_pm1":
            return np.where(u < 0.5 * (1.0 + mu), 1.0, -1.0)
        if self.kind == "bernoulli01":
            return np.where(u < mu, 1.0, 0.0)
        return mu - self.halfwidth + 2.0 * self.halfwidth * u

    def finite_outcomes(self) -> bool:
        return self.kind in ("binary_pm1", "bernoulli01")

    def outcome_distribution(self, mu: float) -> tuple[tuple[float, float], ...]:
        """(value, probability) pairs of one sample; zero-probability outcomes dropped."""
        if self.kind == "binary_pm1":
            p = 0.5 * (1.0 + mu)
            pairs = ((1.0, p), (-1.0, 1.0 - p))
        elif self.kind == "bernoulli01":
            pairs = ((1.0, mu), (0.0, 1.0 - mu))
        else:
            raise ValueError("uniform_window has no finite outcome distribution")
        return tuple((v, p) for v, p in pairs if p > 0.0)

    def to_config(self) -> dict:
        if self.kind == "uniform_window":
            return {"kind": "uniform_window", "halfwidth": self.halfwidth}
        return {"kind": self.kind}

    @classmethod
    def from_config(cls, cfg: dict) -> "SampleModel":
        kind = cfg.get("kind")
        if kind == "uniform_window":
            return cls.uniform_window(cfg["halfwidth"])
        if kind in ("binary_pm1", "bernoulli01"):
            return cls(kind)
        raise ValueError(f"unknown sample model kind: {kind!r}")


@dataclass(frozen=True)
class Environment:
    """Value distribution plus conditional sample model, with a stream seed."""

    values: ValueDistribution
    samples: SampleModel
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < _SEED_LIMIT:
            raise ValueError("seed must be a 64-bit unsigned integer")
        bad = [v for v in self.values.values if not self.samples.admissible(v)]
        if bad:
            raise ValueError(
                f"support values {bad} not admissible for sample model {self.samples.kind}"
            )

    def task(self, task_index: int) -> "Task":
        return new_task(self, task_index)

    def with_seed(self, seed: int) -> "Environment":
        return replace(self, seed=seed)

    def to_config(self) -> dict:
        return {
            "values": self.values.to_config(),
            "samples": self.samples.to_config(),
            "seed": self.seed,
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "Environment":
        return cls(
            values=ValueDistribution.from_config(cfg["values"]),
            samples=SampleModel.from_config(cfg["samples"]),
            seed=int(cfg["seed"]),
        )


class Task:
    """One decision task: a hidden value and an immutable, replayable stream.

    Draw index 0 of the substream selects mu; sample i consumes draw i + 1.
    """

    __slots__ = ("mu", "_model", "_key", "_drawn")

    def __init__(self, mu: float, model: SampleModel, key: int):
        self.mu = mu
        self._model = model
        self._key = key
        self._drawn: list[float] = []

    @property
    def sample_cursor(self) -> int:
        return len(self._drawn)

    @property
    def drawn(self) -> tuple[float, ...]:
        return tuple(self._drawn)

    def draw(self) -> float:
        u = streams.uniform_at(self._key, len(self._drawn) + 1)
        x = self._model.sample(self.mu, u)
        self._drawn.append(x)
        return x

    def sample_at(self, i: int) -> float:
        """The i-th sample (0-based), drawing lazily up to it."""
        while len(self._drawn) <= i:
            self.draw()
        return self._drawn[i]


def new_task(env: Environment, task_index: int) -> Task:
    key = streams.task_key(env.seed, task_index)
    mu = env.values.sample(streams.uniform_at(key, 0))
    return Task(mu, env.samples, key)


def draw_sample(task: Task) -> float:
    return task.draw()


def batch_tasks(
    env: Environment, start_index: int, n_tasks: int, n_samples: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (mus, samples) for consecutive tasks.

    Matches the scalar path exactly: row i holds the first n_samples samples of
    task start_index + i.
    """
    idx = np.arange(start_index, start_index + n_tasks, dtype=np.uint64)
    block = streams.uniform_block(env.seed, idx, 0, 1 + n_samples)
    mus = env.values.sample_array(block[:, 0])
    xs = env.samples.sample_array(mus[:, None], block[:, 1:])
    return mus, xs
