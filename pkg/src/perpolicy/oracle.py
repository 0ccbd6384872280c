"""Ground-truth policy values, the regret functional, and evaluation objectives.

Two exact routes are provided: brute-force enumeration of sample paths (works
for any policy over a finite-outcome sample model, pruned at stopping times)
and a running-mean random-walk recursion for policies whose behavior depends
on the prefix only through (n, mean).  Monte Carlo estimators cross-check
both and cover everything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import streams
from .env import Environment, batch_tasks, new_task
from .policies import Policy, run_policy

PATH_GUARD = 1 << 24


class EnumerationGuardError(RuntimeError):
    """Raised when exact path enumeration would visit too many prefixes."""


@dataclass(frozen=True)
class PolicyValue:
    """Expected reward and cost of one policy, with the method that produced them."""

    reward: float
    cost: float
    method: str
    reward_se: float = 0.0
    cost_se: float = 0.0

    @property
    def ratio(self) -> float:
        return self.reward / self.cost


def _conditional_by_paths(policy: Policy, outcomes, max_paths: int):
    """E[accept], E[tau], E[accept/tau] given mu, by depth-first path enumeration."""
    from .policies import duration_on_prefix

    e_acc = 0.0
    e_tau = 0.0
    e_acc_over_tau = 0.0
    visited = 0
    stack = [((), 1.0)]
    while stack:
        prefix, prob = stack.pop()
        if prefix:
            d = duration_on_prefix(policy, prefix)
            if d is not None:
                a = policy.decision(d, prefix)
                e_acc += prob * a
                e_tau += prob * d
                e_acc_over_tau += prob * a / d
                continue
        for v, p in outcomes:
            visited += 1
            if visited > max_paths:
                raise EnumerationGuardError(
                    f"path enumeration exceeded {max_paths} prefixes "
                    f"(cap {policy.cap}, {len(outcomes)} outcomes)"
                )
            stack.append((prefix + (v,), prob * p))
    return e_acc, e_tau, e_acc_over_tau


def _conditional_by_mean_walk(policy: Policy, outcomes):
    """Same conditional expectations via the (n, #high-outcomes) recursion.

    Valid when the policy carries a mean rule and the sample model has at most
    two outcomes: the running mean is then a function of the draw count alone.
    """
    rule = policy.mean_rule
    cap = policy.cap
    if len(outcomes) == 1:
        v = outcomes[0][0]
        d = cap
        for n in range(1, cap):
            if rule.stops(n, v):
                d = n
                break
        a = 1.0 if rule.accepts(d, v) else 0.0
        return a, float(d), a / d
    (v1, p1), (v2, p2) = outcomes
    e_acc = 0.0
    e_tau = 0.0
    e_acc_over_tau = 0.0
    alive = [1.0]  # alive[j] = P(not stopped, j draws equal to v1) after n draws
    for n in range(1, cap + 1):
        nxt = [0.0] * (n + 1)
        for j, mass in enumerate(alive):
            if mass == 0.0:
                continue
            nxt[j + 1] += mass * p1
            nxt[j] += mass * p2
        alive = nxt
        for j, mass in enumerate(alive):
            if mass == 0.0:
                continue
            mean = (j * v1 + (n - j) * v2) / n
            if n == cap or rule.stops(n, mean):
                a = 1.0 if rule.accepts(n, mean) else 0.0
                e_acc += mass * a
                e_tau += mass * n
                e_acc_over_tau += mass * a / n
                alive[j] = 0.0
    return e_acc, e_tau, e_acc_over_tau


def _conditional_values(policy: Policy, env: Environment, mu: float, method: str, max_paths: int):
    outcomes = env.samples.outcome_distribution(mu)
    if method == "auto":
        method = "walk" if (policy.mean_rule is not None and len(outcomes) <= 2) else "paths"
    if method == "walk":
        if policy.mean_rule is None or len(outcomes) > 2:
            raise ValueError("mean-walk oracle needs a mean rule and a binary sample model")
        return _conditional_by_mean_walk(policy, outcomes)
    if method == "paths":
        return _conditional_by_paths(policy, outcomes, max_paths)
    raise ValueError(f"unknown exact method {method!r}")


def exact_policy_value(
    policy: Policy, env: Environment, method: str = "auto", max_paths: int = PATH_GUARD
) -> PolicyValue:
    """Exact expected reward and cost, averaging conditional values over the support."""
    if not env.samples.finite_outcomes():
        raise ValueError("exact oracle requires a finite-outcome sample model")
    reward = 0.0
    cost = 0.0
    for mu, p in zip(env.values.values, env.values.probs):
        if p == 0.0:
            continue
        e_acc, e_tau, _ = _conditional_values(policy, env, mu, method, max_paths)
        reward += p * mu * e_acc
        cost += p * e_tau
    return PolicyValue(reward, cost, "exact")


def mc_policy_value(policy: Policy, env: Environment, trials: int, seed: int) -> PolicyValue:
    """Monte Carlo estimate over independent tasks, with standard errors."""
    if trials < 2:
        raise ValueError("need at least 2 trials for a standard error")
    eval_env = env.with_seed(streams.substream_seed(seed, 0))
    rewards = np.empty(trials)
    costs = np.empty(trials)
    for i in range(trials):
        out = run_policy(policy, new_task(eval_env, i))
        rewards[i] = out.reward
        costs[i] = out.cost
    return PolicyValue(
        reward=float(rewards.mean()),
        cost=float(costs.mean()),
        method="monte_carlo",
        reward_se=float(rewards.std(ddof=1) / math.sqrt(trials)),
        cost_se=float(costs.std(ddof=1) / math.sqrt(trials)),
    )


RATIO_TIE_TOL = 1e-12


@dataclass
class OracleValues:
    """Per-policy ground-truth values plus the benchmark ratio and the gap."""

    values: dict[int, PolicyValue]
    benchmark: float = field(init=False)
    optimal: tuple[int, ...] = field(init=False)
    gap: float = field(init=False)

    def __post_init__(self):
        if not self.values:
            raise ValueError("no policy values")
        ratios = {k: v.ratio for k, v in self.values.items()}
        best = max(ratios.values())
        self.benchmark = best
        self.optimal = tuple(sorted(k for k, r in ratios.items() if best - r <= RATIO_TIE_TOL))
        sub = [best - r for k, r in ratios.items() if k not in self.optimal]
        if len(self.optimal) > 1 or not sub:
            self.gap = math.inf
        else:
            self.gap = min(sub)

    def ratio(self, k: int) -> float:
        return self.values[k].ratio

    def to_json_rows(self) -> list[dict]:
        return [
            {
                "policy_index": k,
                "reward": v.reward,
                "cost": v.cost,
                "method": v.method,
                "std_error": max(v.reward_se, v.cost_se),
            }
            for k, v in sorted(self.values.items())
        ]


def oracle_values(
    policies: Sequence[Policy],
    env: Environment,
    method: str = "auto",
    mc_trials: int = 100_000,
    seed: int = 0,
) -> OracleValues:
    """Ground-truth values for a family: exact when feasible, else Monte Carlo.

    method: "auto" tries exact and falls back to Monte Carlo on guard errors;
    "exact" and "mc" force one route.
    """
    vals: dict[int, PolicyValue] = {}
    for pol in policies:
        if method in ("auto", "exact"):
            try:
                vals[pol.index] = exact_policy_value(pol, env)
                continue
            except (EnumerationGuardError, ValueError):
                if method == "exact":
                    raise
        vals[pol.index] = mc_policy_value(pol, env, mc_trials, streams.substream_seed(seed, pol.index))
    return OracleValues(vals)


@dataclass(frozen=True)
class RegretReport:
    """Benchmark ratio versus the realized ratio of expectations."""

    benchmark: float
    realized_ratio: float
    regret: float
    trials: int
    per_trial_ratios: tuple[float, ...]


def regret(trial_totals: Iterable, oracle: OracleValues) -> RegretReport:
    """Regret of a batch of independent trials against the oracle benchmark.

    trial_totals holds per-trial (total_reward, total_cost) pairs or objects
    exposing total_reward/total_cost.  The realized term follows the
    ratio-of-expectations shape: trial means enter numerator and denominator
    separately; per-trial ratios are reported for diagnostics only.
    """
    pairs = []
    for item in trial_totals:
        if hasattr(item, "total_reward"):
            pairs.append((float(item.total_reward), float(item.total_cost)))
        else:
            r, c = item
            pairs.append((float(r), float(c)))
    if not pairs:
        raise ValueError("no trials")
    mean_reward = math.fsum(r for r, _ in pairs) / len(pairs)
    mean_cost = math.fsum(c for _, c in pairs) / len(pairs)
    realized = mean_reward / mean_cost
    return RegretReport(
        benchmark=oracle.benchmark,
        realized_ratio=realized,
        regret=oracle.benchmark - realized,
        trials=len(pairs),
        per_trial_ratios=tuple(r / c for r, c in pairs),
    )


def _vectorizable(policy: Policy) -> bool:
    return policy.fixed_duration is not None and (
        policy.rejects_always or hasattr(policy.mean_rule, "accepts_array")
    )


def _batch_rewards(policy: Policy, env: Environment, start: int, n_tasks: int) -> np.ndarray:
    d = policy.fixed_duration
    mus, xs = batch_tasks(env, start, n_tasks, d)
    if policy.rejects_always:
        return np.zeros(n_tasks)
    accepts = policy.mean_rule.accepts_array(d, xs.mean(axis=1))
    return mus * accepts


def objective_g1(policy: Policy, env: Environment, n_tasks: int, trials: int, seed: int) -> float:
    """Expected ratio of reward and cost totals over a fixed number of tasks."""
    vals = []
    for t in range(trials):
        trial_env = env.with_seed(streams.substream_seed(seed, t))
        if _vectorizable(policy):
            rewards = _batch_rewards(policy, trial_env, 0, n_tasks)
            vals.append(float(rewards.sum()) / (n_tasks * policy.fixed_duration))
        else:
            total_r = 0.0
            total_c = 0
            for i in range(n_tasks):
                out = run_policy(policy, new_task(trial_env, i))
                total_r += out.reward
                total_c += out.cost
            vals.append(total_r / total_c)
    return float(np.mean(vals))


def objective_g2(policy: Policy, env: Environment, budget: int, trials: int, seed: int) -> float:
    """Reward per sample under a sample budget.

    Tasks run until the cumulative sample count reaches the budget; the task
    during which the budget is hit is interrupted and contributes no reward.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    vals = []
    for t in range(trials):
        trial_env = env.with_seed(streams.substream_seed(seed, t))
        if _vectorizable(policy):
            d = policy.fixed_duration
            n_total = -(-budget // d)  # first m with m*d >= budget
            n_completed = n_total - 1
            if n_completed <= 0:
                vals.append(0.0)
                continue
            rewards = _batch_rewards(policy, trial_env, 0, n_completed)
            vals.append(float(rewards.sum()) / budget)
        else:
            cum = 0
            total = 0.0
            i = 0
            while True:
                out = run_policy(policy, new_task(trial_env, i))
                cum += out.cost
                if cum >= budget:
                    break
                total += out.reward
                i += 1
            vals.append(total / budget)
    return float(np.mean(vals))


def objective_g3(
    policy: Policy,
    env: Environment,
    method: str = "auto",
    trials: int = 100_000,
    seed: int = 0,
    max_paths: int = PATH_GUARD,
) -> float:
    """Expected per-task ratio reward/cost (not the ratio of expectations)."""
    if method in ("auto", "exact") and env.samples.finite_outcomes():
        try:
            total = 0.0
            for mu, p in zip(env.values.values, env.values.probs):
                if p == 0.0:
                    continue
                _, _, e_acc_over_tau = _conditional_values(policy, env, mu, "auto", max_paths)
                total += p * mu * e_acc_over_tau
            return total
        except EnumerationGuardError:
            if method == "exact":
                raise
    elif method == "exact":
        raise ValueError("exact g3 requires a finite-outcome sample model")
    eval_env = env.with_seed(streams.substream_seed(seed, 0))
    acc = 0.0
    for i in range(trials):
        out = run_policy(policy, new_task(eval_env, i))
        acc += out.reward / out.cost
    return acc / trials


@dataclass(frozen=True)
class ImpossibilityReport:
    """Why one sample cannot give an unbiased estimate of mu^2 for every mu.

    Each admissible mu imposes f(1)*mu + f(0)*(1-mu) = mu^2 on a putative
    estimator f of the one-sample policy's reward.  mu = 0 forces f(0) = 0,
    after which every nonzero mu demands f(1) = mu: two distinct values are
    already contradictory.  residual is the least-squares residual (sum of
    squares) of the joint system including the forced f(0) = 0 row.
    """

    mu_values: tuple[float, ...]
    forced_f0: float
    f1_per_mu: tuple[float, ...]
    lstsq_f0: float
    lstsq_f1: float
    residual: float
    consistent: bool
    lines: tuple[str, ...]


def impossibility_check(mu_values: Iterable[float]) -> ImpossibilityReport:
    """Demonstrate that no single f on {0, 1} is unbiased for mu^2 at all given mu."""
    mus = tuple(float(m) for m in mu_values)
    if not mus:
        raise ValueError("need at least one mu value")
    if len(set(mus)) != len(mus):
        raise ValueError("mu values must be distinct")
    for m in mus:
        if not 0.0 < m <= 1.0:
            raise ValueError(f"mu {m} outside (0, 1]")
    rows = [(1.0, 0.0, 0.0)]  # mu = 0 boundary: f(0) = 0
    lines = ["mu=0: f(0) = 0 (forced by the boundary constraint)"]
    f1s = []
    for m in mus:
        rows.append((1.0 - m, m, m * m))
        f1s.append(m)  # f(1) = mu - f(0)*(1-mu)/mu with f(0) = 0
        lines.append(f"mu={m}: f(1)*{m} + f(0)*{1.0 - m} = {m * m}  =>  f(1) = {m} given f(0) = 0")
    a = np.array([[r[0], r[1]] for r in rows])
    b = np.array([r[2] for r in rows])
    sol, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.sum((a @ sol - b) ** 2))
    consistent = residual <= 1e-9
    lines.append(
        f"least squares over all constraints: f(0)={sol[0]:.6g}, f(1)={sol[1]:.6g}, "
        f"residual={residual:.3g} ({'consistent' if consistent else 'inconsistent'})"
    )
    return ImpossibilityReport(
        mu_values=mus,
        forced_f0=0.0,
        f1_per_mu=tuple(f1s),
        lstsq_f0=float(sol[0]),
        lstsq_f1=float(sol[1]),
        residual=residual,
        consistent=consistent,
        lines=tuple(lines),
    )
