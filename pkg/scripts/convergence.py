"""Step-size convergence of the RK4 and Euler integrators.

RK4 order comes from Richardson ratios with substeps off; Euler is measured
against an RK4 reference at the finest step.
Usage: python scripts/convergence.py [--t1 100]
"""

import argparse
from pathlib import Path

import numpy as np

from levelgas.config import apply_overrides, load_config
from levelgas.runner import run_config

ROOT = Path(__file__).resolve().parents[1]


def final_rho(base, method, dt, t1):
    cfg = apply_overrides(base, [f'integrator.method="{method}"', f"integrator.dt={dt}",
                                 "integrator.stride=1000000", "integrator.max_rotation=0.0",
                                 f"schedule.t1={t1}"])
    return run_config(cfg).trajectory.rho[-1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t1", type=float, default=100.0)
    args = ap.parse_args()
    base = load_config(ROOT / "configs" / "ising_noiseless.json")

    dts = [4e-3, 2e-3, 1e-3]
    r = [final_rho(base, "rk4", dt, args.t1) for dt in dts]
    e1, e2 = np.max(np.abs(r[0] - r[1])), np.max(np.abs(r[1] - r[2]))
    print(f"rk4   dt={dts}  richardson order {np.log2(e1 / e2):.3f}")

    ref = final_rho(base, "rk4", 5e-4, args.t1)
    errs = [np.max(np.abs(final_rho(base, "euler", dt, args.t1) - ref)) for dt in dts]
    order = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    for dt, e in zip(dts, errs):
        print(f"euler dt={dt:<6} err {e:.3e}")
    print(f"euler fitted order {order:.3f}")


if __name__ == "__main__":
    main()
