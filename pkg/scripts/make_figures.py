"""Write the noiseless and Wiener trajectories and render their figures.

Usage: python scripts/make_figures.py [--out-dir outputs/figures]
"""

import argparse
from pathlib import Path

from levelgas.config import load_config
from levelgas.figures import emit_figures
from levelgas.io import write_metadata, write_trajectory_csv
from levelgas.runner import run_trajectory

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="outputs/figures")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csvs = []
    for name in ("ising_noiseless", "ising_wiener"):
        cfg = load_config(ROOT / "configs" / f"{name}.json")
        traj = run_trajectory(cfg)
        path = write_trajectory_csv(traj, out / f"{name}.csv")
        write_metadata(path, {**traj.metadata, "config": cfg.to_dict()})
        csvs.append(path)
    for path in emit_figures(csvs, out):
        print(path)


if __name__ == "__main__":
    main()
