"""Command-line driver: ``levelgas {run,oracle-compare,ensemble,emit-figures}``.

Results go to stdout as JSON; failures print a JSON object with the error
category to stderr and exit with the matching code.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import RunConfig, apply_overrides, load_config, resolve_output
from .errors import LevelGasError
from .figures import DEFAULT_SEGMENT, emit_figures
from .io import write_ensemble_csv, write_metadata, write_trajectory_csv

EXIT_CODES = {
    "ok": 0,
    "tolerance": 1,
    "config": 2,
    "input": 2,
    "degeneracy": 3,
    "io": 4,
    "schema": 4,
    "grid": 5,
    "alignment": 6,
    "error": 7,
}


def _config(args) -> RunConfig:
    return apply_overrides(load_config(args.config), args.set)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _run_metadata(cfg: RunConfig, traj) -> dict:
    meta = dict(traj.metadata)
    meta["config"] = cfg.to_dict()
    return meta


def cmd_run(args) -> int:
    from .runner import run_config

    cfg = _config(args)
    traj = run_config(cfg).trajectory
    csv_path = Path(args.csv) if args.csv else resolve_output(cfg.outputs.csv, "trajectory.csv")
    write_trajectory_csv(traj, csv_path)
    write_metadata(csv_path, _run_metadata(cfg, traj))
    out = {"csv": str(csv_path), "samples": len(traj), "config_hash": cfg.hash(),
           "max_trace_error": float(traj.trace_error.max()),
           "max_purity_deviation": float(abs(traj.purity - 1).max())}
    svg_dir = args.svg_dir or cfg.outputs.svg_dir
    if svg_dir:
        out["svg"] = [str(p) for p in emit_figures([csv_path], svg_dir, args.segment)]
    _emit(out)
    return 0


def cmd_oracle_compare(args) -> int:
    from .runner import oracle_compare

    cfg = _config(args)
    tols = [f"oracle.{k}={v!r}" for k, v in (("entry_tol", args.entry_tol), ("level_tol", args.level_tol))
            if v is not None]
    cfg = apply_overrides(cfg, tols)
    res = oracle_compare(cfg)
    text = res.report.to_json(passed=res.passed, entry_tol=cfg.oracle.entry_tol,
                              level_tol=cfg.oracle.level_tol, config_hash=cfg.hash())
    report_path = args.report or cfg.outputs.report
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text(text + "\n")
    print(text)
    return EXIT_CODES["ok"] if res.passed else EXIT_CODES["tolerance"]


def cmd_ensemble(args) -> int:
    from .ensemble import run_ensemble

    cfg = _config(args)
    if args.seed is not None:
        cfg = apply_overrides(cfg, [f"seed={args.seed}"])
    stats = run_ensemble(cfg, args.R, workers=args.workers)
    csv_path = Path(args.csv) if args.csv else resolve_output(None, "ensemble.csv")
    write_ensemble_csv(stats, csv_path)
    summary = stats.summary()
    summary.update(csv=str(csv_path), config_hash=cfg.hash())
    write_metadata(csv_path, {**summary, "config": cfg.to_dict(), "J": stats.J})
    _emit(summary)
    return 0


def cmd_emit_figures(args) -> int:
    noisy = {"auto": None, "yes": True, "no": False}[args.noisy]
    paths = emit_figures(args.csv, args.out_dir, args.segment, noisy=noisy)
    _emit({"svg": [str(p) for p in paths]})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levelgas", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_config(sp):
        sp.add_argument("config", help="JSON run configuration")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field, e.g. integrator.dt=2e-3 (repeatable)")

    r = sub.add_parser("run", help="integrate one trajectory and write its CSV")
    with_config(r)
    r.add_argument("--csv", help="output CSV path")
    r.add_argument("--svg-dir", help="also write figures into this directory")
    r.add_argument("--segment", type=float, default=DEFAULT_SEGMENT,
                   help="occupation panel length in t (0 for one panel)")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle-compare", help="compare against direct von Neumann evolution")
    with_config(o)
    o.add_argument("--report", help="write the JSON report here")
    o.add_argument("--entry-tol", type=float)
    o.add_argument("--level-tol", type=float)
    o.set_defaults(func=cmd_oracle_compare)

    e = sub.add_parser("ensemble", help="run R realizations and write per-time statistics")
    with_config(e)
    e.add_argument("-R", type=int, required=True, help="number of realizations")
    e.add_argument("--seed", type=int, help="master seed (overrides the config)")
    e.add_argument("--workers", type=int, help="worker processes (default: CPU count)")
    e.add_argument("--csv", help="output CSV path")
    e.set_defaults(func=cmd_ensemble)

    f = sub.add_parser("emit-figures", help="render SVG figures from trajectory CSVs")
    f.add_argument("csv", nargs="+", help="trajectory CSV files")
    f.add_argument("--out-dir", required=True)
    f.add_argument("--segment", type=float, default=DEFAULT_SEGMENT)
    f.add_argument("--noisy", choices=("auto", "yes", "no"), default="auto",
                   help="label as noisy; 'auto' reads the CSV's metadata sidecar")
    f.set_defaults(func=cmd_emit_figures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LevelGasError, OSError) as exc:
        category = getattr(exc, "category", "io")
        print(json.dumps({"error": category, "message": str(exc)}), file=sys.stderr)
        return EXIT_CODES.get(category, EXIT_CODES["error"])


if __name__ == "__main__":
    sys.exit(main())
