"""Regenerate the CSV fixtures consumed by the figure-rendering frontend.

The frontend reads only the documented CSV schemas, so these files pin an
interface, not an implementation.  sweep.csv and slope.json come from the
same spec the acceptance suite uses for the regret-decay check; the slope
recorded here is therefore the acceptance value the frontend must reproduce.
"""

import json
import shutil
from copy import deepcopy
from pathlib import Path

import numpy as np

from perpolicy.experiments import load_config, run_experiment, run_sweep

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "docs" / "fixtures"
DEST = ROOT / "frontend" / "fixtures"
WORK = Path("/tmp/perpolicy_frontend_fixtures")


def main() -> None:
    DEST.mkdir(parents=True, exist_ok=True)
    spec = load_config(FIXTURES / "regret_decay_sweep.json")

    rows = run_sweep(spec, WORK / "sweep", quiet=True)
    shutil.copyfile(WORK / "sweep" / "sweep.csv", DEST / "sweep.csv")

    ns = [row["N"] for row in rows]
    regrets = [row["regret"] for row in rows]
    slope = float(np.polyfit(np.log10(ns), np.log10(regrets), 1)[0])
    with open(DEST / "slope.json", "w", encoding="utf-8") as f:
        json.dump(
            {"slope": slope, "n_points": len(rows), "source": "regret_decay_sweep.json"},
            f, indent=2, sort_keys=True,
        )
        f.write("\n")

    # Per-task rows from the smallest grid point of the same sweep.
    point = deepcopy(spec["base"])
    point["N"] = ns[0]
    run_experiment(point, WORK / "runs", quiet=True)
    shutil.copyfile(WORK / "runs" / "runs.csv", DEST / "runs.csv")

    # A search-then-eliminate run so the phase timeline has esc1/esc2 rows.
    run_experiment(load_config(FIXTURES / "esc_cape_small.json"), WORK / "esc", quiet=True)
    shutil.copyfile(WORK / "esc" / "runs.csv", DEST / "esc_runs.csv")

    print(f"slope {slope:.6f}; fixtures written to {DEST}")
    for name in ("sweep.csv", "slope.json", "runs.csv", "esc_runs.csv"):
        print(f"  {name}: {(DEST / name).stat().st_size} bytes")


if __name__ == "__main__":
    main()
