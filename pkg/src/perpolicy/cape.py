"""Capped policy elimination: oversampled exploration, pruning, commitment.

Exploration task n draws twice the largest live cap, decides with the largest
live policy, and refreshes every live policy's reward/cost intervals from the
shared sample block.  Once enough tasks guarantee positive cost lower bounds,
policies whose ratio upper bound falls below someone's lower bound are
dropped.  The survivor (or the interval-best policy at the exploration cap)
runs plainly for all remaining tasks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .env import Environment, batch_tasks, new_task
from .estimators import EstimatorState, RatioUndefinedError
from .oracle import OracleValues
from .policies import Policy, run_policy, run_policy_oversampled


@dataclass(frozen=True)
class CapeConfig:
    """Run parameters: task horizon, confidence, exploration cap."""

    n_tasks: int
    delta: float
    n_ex: int | None = None

    def __post_init__(self):
        if self.n_tasks < 2:
            raise ValueError("n_tasks must be >= 2")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        n_ex = self.resolved_n_ex()
        if not 1 <= n_ex <= self.n_tasks - 1:
            raise ValueError(f"n_ex {n_ex} outside [1, {self.n_tasks - 1}]")

    def resolved_n_ex(self) -> int:
        if self.n_ex is not None:
            return self.n_ex
        return math.ceil(self.n_tasks ** (2.0 / 3.0))


@dataclass
class RunLog:
    """Per-task trace of one run plus elimination metadata and totals.

    Column lists are parallel (one entry per executed task).  Snapshots hold,
    for each exploration task, the post-update reward/cost intervals of every
    live policy: {k: (r_lo, r_hi, c_lo, c_hi)}.
    """

    phases: list[str] = field(default_factory=list)
    policy_used: list[int] = field(default_factory=list)
    samples: list[int] = field(default_factory=list)
    decisions: list[int] = field(default_factory=list)
    mus: list[float] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    n_candidates: list[int] = field(default_factory=list)
    snapshots: list[dict[int, tuple[float, float, float, float]]] = field(default_factory=list)
    eliminations: dict[int, int] = field(default_factory=dict)
    selected_index: int | None = None
    explore_tasks: int = 0
    n_tasks: int = 0
    total_reward: float = 0.0
    total_cost: int = 0
    keep_records: bool = True

    def append(
        self, phase: str, policy_index: int, samples: int, decision: int, mu: float, reward: float,
        candidates: int,
    ) -> None:
        self.n_tasks += 1
        self.total_reward += reward
        self.total_cost += samples
        if self.keep_records:
            self.phases.append(phase)
            self.policy_used.append(policy_index)
            self.samples.append(samples)
            self.decisions.append(decision)
            self.mus.append(mu)
            self.rewards.append(reward)
            self.n_candidates.append(candidates)

    def extend_batch(
        self, phase: str, policy_index: int, samples_each: int, decisions, mus, rewards,
        candidates: int,
    ) -> None:
        n = len(mus)
        self.n_tasks += n
        self.total_reward += float(np.sum(rewards))
        self.total_cost += samples_each * n
        if self.keep_records:
            self.phases.extend([phase] * n)
            self.policy_used.extend([policy_index] * n)
            self.samples.extend([samples_each] * n)
            self.decisions.extend(int(d) for d in decisions)
            self.mus.extend(float(m) for m in mus)
            self.rewards.extend(float(r) for r in rewards)
            self.n_candidates.extend([candidates] * n)

    def rows(self):
        """Yield (task, phase, policy, samples, decision, mu, reward, cum_r, cum_c, cand)."""
        cum_r = 0.0
        cum_c = 0
        for i in range(len(self.phases)):
            cum_r += self.rewards[i]
            cum_c += self.samples[i]
            yield (
                i + 1, self.phases[i], self.policy_used[i], self.samples[i],
                self.decisions[i], self.mus[i], self.rewards[i], cum_r, cum_c,
                self.n_candidates[i],
            )


def _bound_pack(state: EstimatorState, candidates: Sequence[int]):
    rb = {k: state.reward_bounds(k) for k in candidates}
    cb = {k: state.cost_bounds(k) for k in candidates}
    return rb, cb


def eliminate(candidates: Sequence[int], state: EstimatorState) -> list[int]:
    """Drop every candidate whose ratio upper bound is beaten by some live lower bound.

    The caller must have reached the task-count threshold that keeps all cost
    lower bounds positive; a nonpositive one is reported as an error.
    """
    live = sorted(candidates)
    rb, cb = _bound_pack(state, live)
    for k in live:
        if cb[k].lower <= 0.0:
            raise RatioUndefinedError(
                f"cost lower bound <= 0 for policy {k}; elimination called too early"
            )
    survivors = []
    for k in live:
        r_up = rb[k].upper
        if r_up >= 0.0:
            upper = r_up / cb[k].lower
            beaten = any(rb[j].lower / cb[j].upper > upper for j in live)
        else:
            upper = r_up / cb[k].upper
            beaten = any(rb[j].lower / cb[j].lower > upper for j in live)
        if not beaten:
            survivors.append(k)
    if not survivors:
        raise RuntimeError("elimination emptied the candidate set")
    return survivors


def select_final(candidates: Sequence[int], state: EstimatorState) -> int:
    """Pick the committed policy from the frozen intervals; ties go to the smallest index.

    When some candidate has a nonnegative reward upper bound the score is
    r_up / c_lo (a nonpositive c_lo scores +inf for positive r_up, 0 for zero);
    otherwise all reward upper bounds are negative and the score is r_up / c_up.
    """
    live = sorted(candidates)
    rb, cb = _bound_pack(state, live)
    any_nonneg = any(rb[k].upper >= 0.0 for k in live)
    best_k = None
    best_val = -math.inf
    for k in live:
        r_up = rb[k].upper
        if any_nonneg:
            c_lo = cb[k].lower
            if c_lo <= 0.0:
                val = math.inf if r_up > 0.0 else 0.0 if r_up == 0.0 else r_up
            else:
                val = r_up / c_lo
        else:
            val = r_up / cb[k].upper
        if val > best_val:
            best_val = val
            best_k = k
    return best_k


def _validate_family(policies: Sequence[Policy]) -> None:
    if not policies:
        raise ValueError("empty policy family")
    if [p.index for p in policies] != list(range(1, len(policies) + 1)):
        raise ValueError("policies must be indexed 1..K in order")
    caps = [p.cap for p in policies]
    if any(caps[i] > caps[i + 1] for i in range(len(caps) - 1)):
        raise ValueError("policy caps must be nondecreasing")


_BATCH = 65536


def append_policy_tasks(
    log: RunLog, policy: Policy, env: Environment, first_index: int, n_tasks: int, phase: str
) -> None:
    """Run one policy over a span of tasks and log them (vectorized when possible)."""
    if n_tasks <= 0:
        return
    d = policy.fixed_duration
    if d is not None and (policy.rejects_always or hasattr(policy.mean_rule, "accepts_array")):
        done = 0
        while done < n_tasks:
            chunk = min(_BATCH, n_tasks - done)
            mus, xs = batch_tasks(env, first_index + done, chunk, d)
            if policy.rejects_always:
                acc = np.zeros(chunk, dtype=int)
            else:
                acc = policy.mean_rule.accepts_array(d, xs.mean(axis=1)).astype(int)
            log.extend_batch(phase, policy.index, d, acc, mus, mus * acc, 1)
            done += chunk
        return
    for i in range(n_tasks):
        out = run_policy(policy, new_task(env, first_index + i))
        log.append(phase, policy.index, out.cost, out.decision, out.mu, out.reward, 1)


def run_cape(
    policies: Sequence[Policy],
    env: Environment,
    config: CapeConfig,
    task_offset: int = 0,
    keep_records: bool = True,
    keep_snapshots: bool = True,
) -> RunLog:
    """One full elimination-then-commit run over config.n_tasks tasks."""
    _validate_family(policies)
    K = len(policies)
    n_ex = config.resolved_n_ex()
    delta = config.delta
    d_K = policies[-1].cap
    elim_from = 2.0 * d_K * d_K * math.log(4.0 * K * n_ex / delta)

    state = EstimatorState(policies, n_ex, delta)
    log = RunLog(keep_records=keep_records)
    live = list(range(1, K + 1))
    explored = 0
    for n in range(1, n_ex + 1):
        k_max = live[-1]
        pol = policies[k_max - 1]
        task = new_task(env, task_offset + n - 1)
        out = run_policy_oversampled(pol, pol.cap, task)
        state.update(out, live)
        log.append(
            "explore", k_max, out.cost, out.decision, out.mu,
            out.mu * out.decision, len(live),
        )
        if keep_snapshots:
            snap = {}
            for k in live:
                r = state.reward_bounds(k)
                c = state.cost_bounds(k)
                snap[k] = (r.lower, r.upper, c.lower, c.upper)
            log.snapshots.append(snap)
        if n >= elim_from:
            survivors = eliminate(live, state)
            for k in live:
                if k not in survivors:
                    log.eliminations[k] = n
            live = survivors
        explored = n
        if len(live) == 1:
            break
    log.explore_tasks = explored
    chosen = select_final(live, state)
    log.selected_index = chosen
    append_policy_tasks(
        log, policies[chosen - 1], env,
        task_offset + explored, config.n_tasks - explored, "exploit",
    )
    return log


def coverage_event_holds(log: RunLog, oracle: OracleValues) -> bool:
    """True when every recorded interval covered its oracle value for every live policy."""
    for snap in log.snapshots:
        for k, (r_lo, r_hi, c_lo, c_hi) in snap.items():
            v = oracle.values[k]
            if not (r_lo <= v.reward <= r_hi and c_lo <= v.cost <= c_hi):
                return False
    return True
