"""Doubling search that bounds the index of every ratio-optimal policy.

Phase 1 probes policies 2, 4, 8, ... with oversampled all-reject runs until
one shows a certifiably positive reward; its cost-to-reward ratio caps the
expected cost of any optimal policy.  Phase 2 keeps doubling until a probed
policy's average duration provably exceeds that cap, and returns that index.
Every probe task rejects, so the whole search pays cost but risks no reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cape import RunLog
from .env import Environment, new_task
from .policies import (
    OversampledOutcome,
    Policy,
    PolicyGenerator,
    always_reject,
    run_policy,
    run_policy_oversampled,
)


@dataclass(frozen=True)
class EscConfig:
    """Confidence, accuracy schedule, and the task budget that bounds the search."""

    delta: float
    epsilons: float | Sequence[float] | Callable[[int], float]
    task_budget: int

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.task_budget < 1:
            raise ValueError("task_budget must be >= 1")
        if isinstance(self.epsilons, (int, float)) and self.epsilons <= 0:
            raise ValueError("accuracy level must be positive")

    def eps_at(self, j: int) -> float:
        if callable(self.epsilons):
            eps = float(self.epsilons(j))
        elif isinstance(self.epsilons, (int, float)):
            eps = float(self.epsilons)
        else:
            seq = self.epsilons
            eps = float(seq[j - 1]) if j <= len(seq) else float(seq[-1])
        if eps <= 0.0:
            raise ValueError(f"accuracy level {eps} at stage {j} must be positive")
        return eps


@dataclass
class Probe:
    """One doubling stage: which index was probed, with what block, and the estimate."""

    stage: int
    policy_index: int
    phase: str
    m: int
    estimate: float


@dataclass
class EscResult:
    """Outcome of the search, including the per-task trace for the experiment log."""

    index_bound: int | None
    j0: int | None
    j1: int | None
    tasks_used: int
    samples_used: int
    anchor_reward_lcb: float | None
    halted: bool
    probes: list[Probe] = field(default_factory=list)
    m_totals: list[int] = field(default_factory=list)
    log: RunLog | None = None


def schedule_m(j: int, eps: float, delta: float) -> int:
    """Tasks required at doubling stage j: ceil(ln(j(j+1)/delta) / (2 eps^2))."""
    if j < 1:
        raise ValueError("stage must be >= 1")
    if eps <= 0.0:
        raise ValueError("accuracy must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    return math.ceil(math.log(j * (j + 1) / delta) / (2.0 * eps * eps))


def reward_lcb(policy: Policy, records: Sequence[OversampledOutcome], eps: float) -> float:
    """Lower confidence bound on the policy's reward from oversampled records."""
    if not records:
        raise ValueError("no records")
    cap = policy.cap
    total = 0.0
    for rec in records:
        if rec.block != cap or len(rec.second_block) != cap:
            raise ValueError(
                f"record has block {rec.block}, expected exactly the cap {cap}"
            )
        total += (sum(rec.second_block) / cap) * rec.decision
    return total / len(records) - 2.0 * eps


def cost_avg(durations: Sequence[int]) -> float:
    """Empirical average duration of the probed policy."""
    if not durations:
        raise ValueError("no durations")
    return sum(durations) / len(durations)


def run_esc(
    generator: PolicyGenerator,
    env: Environment,
    config: EscConfig,
    task_offset: int = 0,
    keep_records: bool = True,
) -> EscResult:
    """Run the doubling search within the task budget.

    A budget hit before phase 2 certifies an index is reported as a
    non-halting outcome (index_bound None) rather than looping forever.
    """
    log = RunLog(keep_records=keep_records)
    result = EscResult(
        index_bound=None, j0=None, j1=None, tasks_used=0, samples_used=0,
        anchor_reward_lcb=None, halted=False, log=log,
    )

    def out_of_budget() -> bool:
        return result.tasks_used >= config.task_budget

    m_cum = 0
    anchor_cap = anchor_lcb = None
    j = 0
    while result.j0 is None:
        j += 1
        eps_j = config.eps_at(j)
        m_j = schedule_m(j, eps_j, config.delta)
        index = 2 ** j
        pol = generator(index)
        records = []
        for _ in range(m_j):
            if out_of_budget():
                return result
            task = new_task(env, task_offset + result.tasks_used)
            out = run_policy_oversampled(pol, pol.cap, task)
            records.append(out)
            result.tasks_used += 1
            result.samples_used += out.cost
            log.append("esc1", index, out.cost, 0, out.mu, 0.0, 0)
        m_cum += m_j
        result.m_totals.append(m_cum)
        estimate = reward_lcb(pol, records, eps_j)
        result.probes.append(Probe(j, index, "esc1", m_j, estimate))
        if estimate > 0.0:
            result.j0 = j
            anchor_cap = pol.cap
            anchor_lcb = estimate
            result.anchor_reward_lcb = estimate

    l = result.j0
    while True:
        l += 1
        eps_l = config.eps_at(l)
        m_l = schedule_m(l, eps_l, config.delta)
        index = 2 ** l
        pol = generator(index)
        probe_pol = always_reject(pol)
        durations = []
        for _ in range(m_l):
            if out_of_budget():
                return result
            task = new_task(env, task_offset + result.tasks_used)
            out = run_policy(probe_pol, task)
            durations.append(out.duration)
            result.tasks_used += 1
            result.samples_used += out.cost
            log.append("esc2", index, out.cost, 0, out.mu, 0.0, 0)
        m_cum += m_l
        result.m_totals.append(m_cum)
        avg = cost_avg(durations)
        result.probes.append(Probe(l, index, "esc2", m_l, avg))
        if avg > pol.cap * eps_l + anchor_cap / anchor_lcb:
            result.j1 = l
            result.index_bound = index
            result.halted = True
            return result
