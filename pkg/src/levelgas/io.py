"""CSV serialization of trajectories and ensemble statistics.

Trajectory columns, in this order:
t, lambda, x_0..x_{N-1}, occ_0..occ_{N-1}, re_coh_u_w, im_coh_u_w (u < w,
row-major), purity, trace_err. Every number is written with 17 significant
digits so a double survives the round trip unchanged.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch

FLOAT_FMT = ".17g"


def fmt(v: float) -> str:
    return format(float(v), FLOAT_FMT)


def pairs(n: int) -> list[tuple[int, int]]:
    return [(u, w) for u in range(n) for w in range(u + 1, n)]


def trajectory_columns(n: int) -> list[str]:
    cols = ["t", "lambda"]
    cols += [f"x_{i}" for i in range(n)]
    cols += [f"occ_{i}" for i in range(n)]
    for u, w in pairs(n):
        cols += [f"re_coh_{u}_{w}", f"im_coh_{u}_{w}"]
    return cols + ["purity", "trace_err"]


def ensemble_columns(n: int) -> list[str]:
    cols = ["t", "lambda"]
    cols += [f"mean_occ_{i}" for i in range(n)]
    cols += [f"std_occ_{i}" for i in range(n)]
    return cols + ["mean_purity", "std_purity", "purity_of_mean"]


def trajectory_rows(traj):
    n = traj.dim
    occ = traj.occupations
    pur = traj.purity
    terr = traj.trace_error
    pr = pairs(n)
    for k in range(len(traj)):
        row = [traj.t[k], traj.lam[k], *traj.x[k], *occ[k]]
        for u, w in pr:
            c = traj.rho[k, u, w]
            row += [c.real, c.imag]
        row += [pur[k], terr[k]]
        yield row


def _write(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_trajectory_csv(traj, path) -> Path:
    return _write(path, trajectory_columns(traj.dim), trajectory_rows(traj))


def write_ensemble_csv(stats, path) -> Path:
    n = stats.mean_occ.shape[1]
    rows = (
        [stats.t[k], stats.lam[k], *stats.mean_occ[k], *stats.std_occ[k],
         stats.mean_purity[k], stats.std_purity[k], stats.purity_of_mean[k]]
        for k in range(len(stats.t))
    )
    return _write(path, ensemble_columns(n), rows)


def metadata_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_metadata(csv_path, meta: dict) -> Path:
    p = metadata_path(csv_path)
    p.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_json_default) + "\n")
    return p


def read_metadata(csv_path) -> dict | None:
    p = metadata_path(csv_path)
    if not p.exists():
        return None
    return json.loads(p.read_text())


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


@dataclass
class CsvTrajectory:
    t: np.ndarray
    lam: np.ndarray
    x: np.ndarray
    occ: np.ndarray
    coh: np.ndarray  # complex, (samples, pairs)
    purity: np.ndarray
    trace_err: np.ndarray

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def __len__(self):
        return len(self.t)


def _dim_from_header(header: list[str]) -> int:
    n = sum(1 for c in header if c.startswith("x_"))
    if n < 1 or header != trajectory_columns(n):
        raise SchemaMismatch(f"unexpected trajectory CSV header: {','.join(header[:6])}...")
    return n


def read_trajectory_csv(path) -> CsvTrajectory:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaMismatch(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaMismatch(f"{path} is empty")
    n = _dim_from_header(rows[0])
    body = rows[1:]
    if not body:
        raise SchemaMismatch(f"{path} has a header but no samples")
    width = len(rows[0])
    try:
        data = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise SchemaMismatch(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != width:
        raise SchemaMismatch(f"{path}: ragged rows")
    c = 2
    x = data[:, c:c + n]
    c += n
    occ = data[:, c:c + n]
    c += n
    p = len(pairs(n))
    coh = data[:, c:c + 2 * p:2] + 1j * data[:, c + 1:c + 2 * p:2]
    c += 2 * p
    return CsvTrajectory(data[:, 0], data[:, 1], x, occ, coh, data[:, c], data[:, c + 1])
