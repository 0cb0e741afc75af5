"""Level and occupation figures from trajectory CSVs.

A noiseless CSV gives ``fig1_levels.svg`` and ``fig2_occupations.svg``; a
noisy one (per its metadata sidecar) gives ``fig3_levels_noisy.svg`` and
``fig4_occupations_noisy.svg``. The level figure has two panels, the levels
themselves and their displacement x_n(t) - x_n(t0), because the drift is tiny
next to the level spacing. Occupations may be split into fixed-length time
segments, each panel scaled on its own.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import SchemaMismatch
from .io import CsvTrajectory, read_metadata, read_trajectory_csv
from .svg import Panel, render

DEFAULT_SEGMENT = 25.0


def level_panels(tr: CsvTrajectory) -> list[Panel]:
    labels = [f"level {i + 1}" for i in range(tr.dim)]
    x = tr.x
    return [
        Panel(tr.t, list(x.T), labels, "t", "energy", "levels x_n(t)"),
        Panel(tr.t, list((x - x[0]).T), labels, "t", "energy shift", "displacement x_n(t) - x_n(t0)"),
    ]


def segments(t: np.ndarray, length: float | None) -> list[np.ndarray]:
    """Index arrays covering consecutive windows [t0 + k L, t0 + (k+1) L)."""
    if length is None or length <= 0 or len(t) < 2:
        return [np.arange(len(t))]
    k = np.floor((t - t[0]) / length + 1e-9).astype(int)
    out = [np.flatnonzero(k == j) for j in np.unique(k)]
    if len(out) > 1 and len(out[-1]) == 1:
        last = out.pop()
        out[-1] = np.r_[out[-1], last]
    # share the boundary sample with the previous window so curves join
    return [out[0]] + [np.r_[idx[0] - 1, idx] for idx in out[1:]]


def occupation_panels(tr: CsvTrajectory, segment: float | None) -> list[Panel]:
    labels = [f"state {i + 1}" for i in range(tr.dim)]
    panels = []
    for idx in segments(tr.t, segment):
        title = f"t in [{tr.t[idx[0]]:.4g}, {tr.t[idx[-1]]:.4g}]"
        panels.append(Panel(tr.t[idx], list(tr.occ[idx].T), labels, "t", "occupation", title))
    return panels


def is_noisy(csv_path) -> bool:
    meta = read_metadata(csv_path)
    return bool(meta) and meta.get("noise_kind", "none") != "none"


def emit_figures(csv_paths, out_dir, segment: float | None = DEFAULT_SEGMENT,
                 noisy: bool | None = None) -> list[Path]:
    """Write the level and occupation SVGs for each CSV; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    used = set()
    for csv_path in csv_paths:
        tr = read_trajectory_csv(csv_path)
        if not len(tr):
            raise SchemaMismatch(f"{csv_path} has no samples")
        flag = is_noisy(csv_path) if noisy is None else noisy
        names = (("fig3_levels_noisy.svg", "fig4_occupations_noisy.svg") if flag
                 else ("fig1_levels.svg", "fig2_occupations.svg"))
        if names[0] in used:
            stem = Path(csv_path).stem
            names = tuple(f"{stem}_{n}" for n in names)
        used.update(names)
        kind = "with noise" if flag else "noiseless"
        levels = render(level_panels(tr), f"Energy levels ({kind})")
        occ = render(occupation_panels(tr, segment), f"Occupation numbers ({kind})")
        for name, text in zip(names, (levels, occ)):
            p = out_dir / name
            p.write_text(text)
            written.append(p)
    return written
