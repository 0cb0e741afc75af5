"""Run a Wiener-noise ensemble and report how the ensemble state decoheres.

Usage: python scripts/ensemble_decoherence.py [-R 256] [--csv out.csv]
"""

import argparse
import json
import time
from pathlib import Path

from levelgas.config import load_config
from levelgas.ensemble import run_ensemble
from levelgas.io import write_ensemble_csv

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-R", type=int, default=256)
    ap.add_argument("--config", default=str(ROOT / "configs" / "ising_wiener.json"))
    ap.add_argument("--workers", type=int)
    ap.add_argument("--csv")
    args = ap.parse_args()
    cfg = load_config(args.config)
    start = time.perf_counter()
    stats = run_ensemble(cfg, args.R, args.workers)
    summary = stats.summary()
    summary["seconds"] = round(time.perf_counter() - start, 2)
    if args.csv:
        write_ensemble_csv(stats, args.csv)
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
