"""Compare both signs of the basis-rotation term against the direct oracle.

Usage: python scripts/sign_audit.py [--t1 40]
"""

import argparse
import json
from pathlib import Path

from levelgas.config import apply_overrides, load_config
from levelgas.runner import oracle_compare

ROOT = Path(__file__).resolve().parents[1]
SCHEDULES = {
    "log": [],
    "linear": ['schedule.kind="linear"', "schedule.A=0.05", "schedule.t0=1.0", "schedule.t1=20.0"],
}


def audit(base, overrides):
    out = {}
    for sign in (1.0, -1.0):
        cfg = apply_overrides(base, overrides + [f"integrator.sign={sign}"])
        rep = oracle_compare(cfg).report
        out[f"{sign:+.0f}"] = {"entry_diff": rep.max_abs_entry_diff, "level_diff": rep.max_level_diff}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t1", type=float, default=40.0, help="end time of the log schedule")
    args = ap.parse_args()
    base = load_config(ROOT / "configs" / "ising_noiseless.json")
    result = {}
    for name, ov in SCHEDULES.items():
        ov = list(ov) if ov else [f"schedule.t1={args.t1}"]
        result[name] = audit(base, ov)
    print(json.dumps(result, indent=2))


if __name__ == "__main__":
    main()
