"""Configuration-driven experiment runner.

Composes environments, policy families, and algorithms from a JSON config,
fans out seeded trials (optionally across processes), and emits a per-task
runs.csv plus a summary.json with oracle values and the regret report.  All
outputs are pure functions of the config contents.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import re
from concurrent.futures import ProcessPoolExecutor
from copy import deepcopy
from dataclasses import dataclass, field
from pathlib import Path

from . import streams
from .cape import CapeConfig, RunLog, append_policy_tasks, run_cape
from .env import Environment
from .esc import EscConfig, run_esc
from .oracle import OracleValues, RegretReport, oracle_values, regret
from .policies import (
    CappedHoeffdingFamily,
    FixedWindowRule,
    Policy,
    PolicyGenerator,
    fixed_window_generator,
    hoeffding_generator,
    mean_rule_policy,
    reject_policy,
)

CSV_HEADER = [
    "trial", "task", "phase", "policy", "samples", "decision",
    "mu", "reward", "cum_reward", "cum_cost", "candidates",
]
ALGORITHMS = ("cape", "esc", "esc-cape", "fixed", "always-reject")
SWEEP_GUARD = 10_000
SEED_ENV_VAR = "PERPOLICY_SEED_OVERRIDE"


class ConfigError(ValueError):
    """Invalid configuration; .problems lists offending fields."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))


class SweepGuardError(RuntimeError):
    """Sweep grid larger than the safety guard."""


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def _check_policies_cfg(pcfg, problems) -> None:
    if not isinstance(pcfg, dict):
        problems.append("policies: must be an object")
        return
    family = pcfg.get("family")
    if family == "capped_hoeffding":
        for key in ("c", "K", "N", "delta"):
            if key not in pcfg:
                problems.append(f"policies.{key}: required for capped_hoeffding")
        if "c" in pcfg and not pcfg["c"] > 0:
            problems.append("policies.c: must be positive")
        if "K" in pcfg and (not isinstance(pcfg["K"], int) or pcfg["K"] < 1):
            problems.append("policies.K: must be a positive integer")
        if "delta" in pcfg and not 0.0 < pcfg["delta"] < 1.0:
            problems.append("policies.delta: must be in (0, 1)")
    elif family == "custom":
        if pcfg.get("kind") != "fixed_window":
            problems.append("policies.kind: only 'fixed_window' custom families are built in")
        if "accept_threshold" not in pcfg:
            problems.append("policies.accept_threshold: required for fixed_window")
        durations = pcfg.get("durations")
        if durations is not None:
            if not durations or any(not isinstance(d, int) or d < 1 for d in durations):
                problems.append("policies.durations: must be positive integers")
            elif any(durations[i] > durations[i + 1] for i in range(len(durations) - 1)):
                problems.append("policies.durations: must be nondecreasing")
    else:
        problems.append(f"policies.family: unknown family {family!r}")


def finite_policies_from_config(pcfg: dict) -> list[Policy]:
    if pcfg["family"] == "capped_hoeffding":
        fam = CappedHoeffdingFamily(
            c=pcfg["c"], K=pcfg["K"], N=pcfg["N"], delta=pcfg["delta"],
            caps=tuple(pcfg.get("caps", ())),
        )
        return fam.policies()
    durations = pcfg.get("durations")
    if durations is None:
        raise ConfigError(["policies.durations: required for finite custom families"])
    rule = FixedWindowRule(pcfg["accept_threshold"])
    return [
        mean_rule_policy(i + 1, d, rule, label=f"window[{d}]")
        for i, d in enumerate(durations)
    ]


def generator_from_config(pcfg: dict) -> PolicyGenerator:
    if pcfg["family"] == "capped_hoeffding":
        if pcfg.get("caps"):
            raise ConfigError(["policies.caps: not supported for countable algorithms"])
        return hoeffding_generator(pcfg["c"], pcfg["K"], pcfg["N"], pcfg["delta"])
    if pcfg.get("durations"):
        raise ConfigError(["policies.durations: not supported for countable algorithms"])
    return fixed_window_generator(pcfg["accept_threshold"])


def resolve_n_ex(spec, n_tasks: int):
    if spec is None or spec == "ceil(N^(2/3))":
        return math.ceil(n_tasks ** (2.0 / 3.0))
    if isinstance(spec, int) and not isinstance(spec, bool):
        return spec
    return None


def resolve_epsilon(spec, n_tasks: int):
    if spec is None or spec == "N^(-1/3)":
        return n_tasks ** (-1.0 / 3.0)
    if isinstance(spec, (int, float)) and not isinstance(spec, bool) and spec > 0:
        return float(spec)
    if isinstance(spec, list) and spec and all(
        isinstance(e, (int, float)) and e > 0 for e in spec
    ):
        return [float(e) for e in spec]
    return None


@dataclass
class ExperimentConfig:
    raw: dict
    env_template: Environment
    algorithm: dict
    n_tasks: int
    trials: int
    seed: int

    @property
    def needs_generator(self) -> bool:
        return self.algorithm["name"] in ("esc", "esc-cape")


def validate_config(cfg: dict) -> ExperimentConfig:
    problems: list[str] = []
    if not isinstance(cfg, dict):
        raise ConfigError(["config: must be a JSON object"])

    env_template = None
    if "env" not in cfg:
        problems.append("env: required")
    else:
        try:
            env_template = Environment.from_config(cfg["env"])
        except (ValueError, KeyError, TypeError) as e:
            problems.append(f"env: {e}")

    n_tasks = cfg.get("N")
    if not isinstance(n_tasks, int) or n_tasks < 2:
        problems.append("N: must be an integer >= 2")
        n_tasks = 2

    trials = cfg.get("trials", 1)
    if not isinstance(trials, int) or trials < 1:
        problems.append("trials: must be an integer >= 1")
        trials = 1

    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < (1 << 64):
        problems.append("seed: must be a 64-bit unsigned integer")
        seed = 0

    _check_policies_cfg(cfg.get("policies"), problems)

    algo = cfg.get("algorithm")
    if isinstance(algo, dict) and isinstance(algo.get("name"), str):
        algo = dict(algo)
        # accept the parameterized shorthand "fixed(k)"
        match = re.fullmatch(r"fixed\((\d+)\)", algo["name"])
        if match:
            algo["name"] = "fixed"
            algo.setdefault("k", int(match.group(1)))
    if not isinstance(algo, dict) or algo.get("name") not in ALGORITHMS:
        problems.append(f"algorithm.name: must be one of {ALGORITHMS}")
        algo = {"name": "cape", "delta": 0.1}
    algo = dict(algo)
    delta = algo.get("delta", 0.1)
    if not isinstance(delta, (int, float)) or not 0.0 < delta < 1.0:
        problems.append("algorithm.delta: must be in (0, 1)")
    esc_delta = algo.get("esc_delta")
    if esc_delta is not None and (
        not isinstance(esc_delta, (int, float)) or not 0.0 < esc_delta < 1.0
    ):
        problems.append("algorithm.esc_delta: must be in (0, 1) when given")

    name = algo["name"]
    if name in ("cape", "esc-cape"):
        n_ex = resolve_n_ex(algo.get("n_ex"), n_tasks)
        if n_ex is None or not 1 <= n_ex <= n_tasks - 1:
            problems.append("algorithm.n_ex: must resolve to an integer in [1, N-1]")
        else:
            algo["_n_ex"] = n_ex
    if name in ("esc", "esc-cape"):
        eps = resolve_epsilon(algo.get("epsilon"), n_tasks)
        if eps is None:
            problems.append(
                "algorithm.epsilon: must be 'N^(-1/3)', a positive number, or a list of them"
            )
        else:
            algo["_epsilon"] = eps
        budget = algo.get("task_budget", n_tasks)
        if not isinstance(budget, int) or budget < 1:
            problems.append("algorithm.task_budget: must be a positive integer")
        else:
            algo["_task_budget"] = min(budget, n_tasks)
    if (
        name in ("cape", "fixed")
        and isinstance(cfg.get("policies"), dict)
        and cfg["policies"].get("family") == "custom"
        and cfg["policies"].get("durations") is None
    ):
        problems.append("policies.durations: required for finite-family algorithms")
    if name == "fixed":
        k = algo.get("k")
        if not isinstance(k, int) or k < 1:
            problems.append("algorithm.k: must be a positive integer")
        elif (
            isinstance(cfg.get("policies"), dict)
            and cfg["policies"].get("family") == "capped_hoeffding"
            and isinstance(cfg["policies"].get("K"), int)
            and k > cfg["policies"]["K"]
        ):
            problems.append("algorithm.k: exceeds the family size K")
        elif (
            isinstance(cfg.get("policies"), dict)
            and isinstance(cfg["policies"].get("durations"), list)
            and k > len(cfg["policies"]["durations"])
        ):
            problems.append("algorithm.k: exceeds the number of durations")

    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        raw=cfg, env_template=env_template, algorithm=algo,
        n_tasks=n_tasks, trials=trials, seed=seed,
    )


@dataclass
class TrialResult:
    trial: int
    total_reward: float
    total_cost: int
    selected: int | None = None
    eliminations: dict = field(default_factory=dict)
    explore_tasks: int | None = None
    full_elimination_task: int | None = None
    esc_halted: bool | None = None
    esc_K: int | None = None
    esc_tasks: int | None = None
    esc_samples: int | None = None
    rows: list | None = None


def _log_rows(log: RunLog):
    return list(zip(
        log.phases, log.policy_used, log.samples, log.decisions, log.mus,
        log.rewards, log.n_candidates,
    ))


def _full_elimination_task(log: RunLog, n_policies: int) -> int | None:
    if len(log.eliminations) == n_policies - 1 and n_policies > 1:
        return max(log.eliminations.values())
    return None


def run_trial(cfg: dict, trial: int, keep_records: bool = True) -> TrialResult:
    """Execute one seeded trial of the configured algorithm."""
    exp = validate_config(cfg)
    env = exp.env_template.with_seed(streams.substream_seed(exp.seed, trial))
    algo = exp.algorithm
    name = algo["name"]
    n_tasks = exp.n_tasks
    res = TrialResult(trial=trial, total_reward=0.0, total_cost=0)

    if name == "cape":
        policies = finite_policies_from_config(cfg["policies"])
        log = run_cape(
            policies, env,
            CapeConfig(n_tasks=n_tasks, delta=algo["delta"], n_ex=algo["_n_ex"]),
            keep_records=keep_records, keep_snapshots=False,
        )
        res.selected = log.selected_index
        res.eliminations = dict(log.eliminations)
        res.explore_tasks = log.explore_tasks
        res.full_elimination_task = _full_elimination_task(log, len(policies))
        res.total_reward, res.total_cost = log.total_reward, log.total_cost
        res.rows = _log_rows(log) if keep_records else None
        return res

    if name in ("fixed", "always-reject"):
        if name == "fixed":
            policies = finite_policies_from_config(cfg["policies"])
            pol = policies[algo["k"] - 1]
        else:
            pol = reject_policy(1)
        log = RunLog(keep_records=keep_records)
        append_policy_tasks(log, pol, env, 0, n_tasks, "fixed")
        res.selected = pol.index if name == "fixed" else None
        res.total_reward, res.total_cost = log.total_reward, log.total_cost
        res.rows = _log_rows(log) if keep_records else None
        return res

    # esc and esc-cape; esc_delta is an off-composition override (default: the
    # single shared confidence parameter feeds both stages)
    generator = generator_from_config(cfg["policies"])
    esc_cfg = EscConfig(
        delta=algo.get("esc_delta", algo["delta"]),
        epsilons=algo["_epsilon"],
        task_budget=algo["_task_budget"],
    )
    esc_res = run_esc(generator, env, esc_cfg, task_offset=0, keep_records=keep_records)
    log = esc_res.log
    res.esc_halted = esc_res.halted
    res.esc_K = esc_res.index_bound
    res.esc_tasks = esc_res.tasks_used
    res.esc_samples = esc_res.samples_used
    remaining = n_tasks - esc_res.tasks_used

    if name == "esc" or not esc_res.halted or remaining < 2:
        # Non-halting searches (and the esc-only algorithm) spend what is left
        # on the one-sample all-reject policy: zero reward, cost 1 per task.
        append_policy_tasks(log, reject_policy(1), env, esc_res.tasks_used, remaining, "fixed")
        res.total_reward, res.total_cost = log.total_reward, log.total_cost
        res.rows = _log_rows(log) if keep_records else None
        return res

    policies = generator.prefix(esc_res.index_bound)
    n_ex = min(algo["_n_ex"], remaining - 1)
    cape_log = run_cape(
        policies, env,
        CapeConfig(n_tasks=remaining, delta=algo["delta"], n_ex=n_ex),
        task_offset=esc_res.tasks_used,
        keep_records=keep_records, keep_snapshots=False,
    )
    res.selected = cape_log.selected_index
    res.eliminations = dict(cape_log.eliminations)
    res.explore_tasks = cape_log.explore_tasks
    res.full_elimination_task = _full_elimination_task(cape_log, len(policies))
    res.total_reward = log.total_reward + cape_log.total_reward
    res.total_cost = log.total_cost + cape_log.total_cost
    if keep_records:
        res.rows = _log_rows(log) + _log_rows(cape_log)
    return res


def _oracle_for_config(cfg: dict, exp: ExperimentConfig) -> OracleValues:
    env = exp.env_template
    if exp.needs_generator:
        generator = generator_from_config(cfg["policies"])
        k_max = exp.algorithm.get("oracle_k_max", 32)
        policies = generator.prefix(k_max)
    else:
        policies = finite_policies_from_config(cfg["policies"])
    return oracle_values(policies, env, seed=exp.seed)


def _mode(values):
    filtered = [v for v in values if v is not None]
    if not filtered:
        return None
    counts: dict = {}
    for v in filtered:
        counts[v] = counts.get(v, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]


def summarize(
    exp: ExperimentConfig, results: list[TrialResult], oracle: OracleValues,
    report: RegretReport,
) -> dict:
    eliminated_all = [r.full_elimination_task for r in results]
    elimination_task = (
        max(eliminated_all) if eliminated_all and all(v is not None for v in eliminated_all)
        else None
    )
    esc_flags = [r.esc_halted for r in results if r.esc_halted is not None]
    return {
        "algorithm": exp.algorithm["name"],
        "N": exp.n_tasks,
        "trials": exp.trials,
        "seed": exp.seed,
        "benchmark": report.benchmark,
        "realized_ratio": report.realized_ratio,
        "regret": report.regret,
        "gap": None if math.isinf(oracle.gap) else oracle.gap,
        "gap_infinite": math.isinf(oracle.gap),
        "optimal_policies": list(oracle.optimal),
        "n_ex_resolved": exp.algorithm.get("_n_ex"),
        "esc_halted": (all(esc_flags) if esc_flags else None),
        "esc_K": _mode([r.esc_K for r in results]),
        "elimination_task": elimination_task,
        "selected_k": _mode([r.selected for r in results]),
        "per_trial": {
            "selected": [r.selected for r in results],
            "ratios": list(report.per_trial_ratios),
            "esc_halted": [r.esc_halted for r in results],
            "esc_K": [r.esc_K for r in results],
            "elimination_task": eliminated_all,
        },
        "oracle": {"values": oracle.to_json_rows()},
    }


def _run_trials(cfg: dict, exp: ExperimentConfig, parallel: int, keep_records: bool):
    if parallel > 1 and exp.trials > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = [
                pool.submit(run_trial, cfg, t, keep_records) for t in range(exp.trials)
            ]
            results = [f.result() for f in futures]
    else:
        results = [run_trial(cfg, t, keep_records) for t in range(exp.trials)]
    results.sort(key=lambda r: r.trial)
    return results


def write_runs_csv(path, results: list[TrialResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for res in results:
            cum_reward = 0.0
            cum_cost = 0
            for task_no, row in enumerate(res.rows or (), start=1):
                phase, policy, samples, decision, mu, reward, candidates = row
                cum_reward += reward
                cum_cost += samples
                writer.writerow([
                    res.trial, task_no, phase, policy, samples, decision,
                    mu, reward, cum_reward, cum_cost, candidates,
                ])


def run_experiment(
    cfg: dict, out_dir, parallel: int = 1, quiet: bool = True, write_runs: bool = True,
) -> dict:
    """Run all trials and emit runs.csv and summary.json under out_dir.

    summary.json is written last, so partially failed runs never produce one.
    """
    exp = validate_config(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = cfg.get("output", {}) if isinstance(cfg.get("output"), dict) else {}
    runs_name = names.get("runs_csv", "runs.csv")
    summary_name = names.get("summary_json", "summary.json")
    results = _run_trials(cfg, exp, parallel, keep_records=write_runs)
    oracle = _oracle_for_config(cfg, exp)
    report = regret([(r.total_reward, r.total_cost) for r in results], oracle)
    summary = summarize(exp, results, oracle, report)
    if write_runs:
        write_runs_csv(out / runs_name, results)
    with open(out / summary_name, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    if not quiet:
        print(
            f"{exp.algorithm['name']}: benchmark={summary['benchmark']:.6g} "
            f"realized={summary['realized_ratio']:.6g} regret={summary['regret']:.6g}"
        )
    return summary


def _set_by_path(cfg: dict, path: str, value) -> None:
    keys = path.split(".")
    node = cfg
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            node[key] = {}
        node = node[key]
    node[keys[-1]] = value


def _elimination_bound(cfg: dict, exp: ExperimentConfig, oracle: OracleValues):
    """Worst-case task count for full elimination, from the interval-width argument."""
    if exp.algorithm["name"] not in ("cape",) or math.isinf(oracle.gap):
        return None
    policies = finite_policies_from_config(cfg["policies"])
    K = len(policies)
    d_K = policies[-1].cap
    n_ex = exp.algorithm["_n_ex"]
    delta = exp.algorithm["delta"]
    return math.ceil(
        288.0 * d_K * d_K * math.log(4.0 * K * n_ex / delta) / (oracle.gap ** 2)
    ) + 1


SWEEP_COLUMNS = [
    "benchmark", "realized_ratio", "regret", "gap", "n_ex_resolved",
    "selected_k", "elimination_task", "elimination_bound", "esc_halted", "esc_K", "trials",
]


def run_sweep(spec: dict, out_dir, parallel: int = 1, quiet: bool = True) -> list[dict]:
    """Run the cartesian grid of a sweep spec; one sweep.csv row per point."""
    if not isinstance(spec, dict) or "base" not in spec or "sweep" not in spec:
        raise ConfigError(["sweep: spec must contain 'base' and 'sweep'"])
    axes = spec["sweep"]
    if not isinstance(axes, list) or not 1 <= len(axes) <= 2:
        raise ConfigError(["sweep: must list one or two swept parameters"])
    for i, axis in enumerate(axes):
        if not isinstance(axis, dict) or "path" not in axis or "values" not in axis:
            raise ConfigError([f"sweep[{i}]: needs 'path' and 'values'"])
    grid_size = 1
    for axis in axes:
        grid_size *= len(axis["values"])
    if grid_size > SWEEP_GUARD:
        raise SweepGuardError(f"sweep grid has {grid_size} points (guard {SWEEP_GUARD})")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for combo in itertools.product(*(axis["values"] for axis in axes)):
        cfg = deepcopy(spec["base"])
        for axis, value in zip(axes, combo):
            _set_by_path(cfg, axis["path"], value)
        exp = validate_config(cfg)
        results = _run_trials(cfg, exp, parallel, keep_records=False)
        oracle = _oracle_for_config(cfg, exp)
        report = regret([(r.total_reward, r.total_cost) for r in results], oracle)
        summary = summarize(exp, results, oracle, report)
        summary["elimination_bound"] = _elimination_bound(cfg, exp, oracle)
        row = {axis["path"]: value for axis, value in zip(axes, combo)}
        for col in SWEEP_COLUMNS:
            row[col] = summary.get(col)
        rows.append(row)
        if not quiet:
            print(f"sweep point {row}")

    header = [axis["path"] for axis in axes] + SWEEP_COLUMNS
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(col)) for col in header])
    return rows


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value
