"""Command-line entry points for running experiments from config files.

Subcommands: run, sweep, oracle, impossibility, validate.  Exit codes:
0 success, 1 configuration error, 2 runtime guard violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import (
    SEED_ENV_VAR,
    ConfigError,
    SweepGuardError,
    _oracle_for_config,
    load_config,
    run_experiment,
    run_sweep,
    validate_config,
)
from .oracle import EnumerationGuardError, impossibility_check


def _apply_seed_override(cfg: dict) -> dict:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is not None:
        cfg = dict(cfg)
        cfg["seed"] = int(raw)
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perpolicy",
        description="Run repeated accept/reject decision-task experiments from JSON configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--parallel", type=int, default=1, help="trial worker processes")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    add_common(sub.add_parser("run", help="run an experiment; emits runs.csv and summary.json"))
    add_common(sub.add_parser("sweep", help="run a parameter sweep; emits sweep.csv"))
    add_common(sub.add_parser("oracle", help="print ground-truth policy values as JSON"))
    imp = sub.add_parser("impossibility", help="report the one-sample unbiasedness obstruction")
    imp.add_argument("--mu", required=True, help="comma-separated values in (0, 1]")
    imp.add_argument("--quiet", action="store_true")
    val = sub.add_parser("validate", help="check a config file and exit")
    val.add_argument("--config", required=True)
    val.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = _apply_seed_override(load_config(args.config))
            run_experiment(cfg, args.out, parallel=args.parallel, quiet=args.quiet)
        elif args.command == "sweep":
            spec = load_config(args.config)
            if "base" in spec:
                spec = dict(spec)
                spec["base"] = _apply_seed_override(spec["base"])
            run_sweep(spec, args.out, parallel=args.parallel, quiet=args.quiet)
        elif args.command == "oracle":
            cfg = _apply_seed_override(load_config(args.config))
            exp = validate_config(cfg)
            oracle = _oracle_for_config(cfg, exp)
            payload = {
                "benchmark": oracle.benchmark,
                "optimal_policies": list(oracle.optimal),
                "gap": None if oracle.gap == float("inf") else oracle.gap,
                "gap_infinite": oracle.gap == float("inf"),
                "values": oracle.to_json_rows(),
            }
            print(json.dumps(payload, indent=2, sort_keys=True))
        elif args.command == "impossibility":
            values = [float(v) for v in args.mu.split(",") if v.strip()]
            report = impossibility_check(values)
            for line in report.lines:
                print(line)
        elif args.command == "validate":
            cfg = _apply_seed_override(load_config(args.config))
            validate_config(cfg)
            if not args.quiet:
                print("config ok")
    except ConfigError as e:
        for problem in e.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    except (FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (SweepGuardError, EnumerationGuardError, RecursionError) as e:
        print(f"guard violation: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
