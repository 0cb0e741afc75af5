"""Minimal self-contained SVG line plots (no plotting stack needed).

Each data series is a ``<g class="curve">`` holding a polyline, or circles
when the series has a single sample. Panels stack vertically and each gets
its own y range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
WIDTH = 720
PANEL_H = 260
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 90, 130, 36, 46


@dataclass
class Panel:
    x: np.ndarray
    ys: list  # one array per series
    labels: list
    xlabel: str
    ylabel: str
    title: str = ""


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return []
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(count, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return ticks


def _fmt_tick(v: float, span: float) -> str:
    if span == 0:
        return f"{v:.6g}"
    if abs(v) >= 1e5:
        return f"{v:.3e}"
    digits = min(12, max(0, -math.floor(math.log10(span)) + 2))
    return f"{v:.{digits}f}"


def _range(arrays):
    vals = np.concatenate([np.ravel(a) for a in arrays])
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        return 0.0, 1.0
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        pad = abs(lo) * 1e-3 or 1.0
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _panel_svg(p: Panel, top: float) -> list[str]:
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = PANEL_H - MARGIN_T - MARGIN_B
    x0, y0 = MARGIN_L, top + MARGIN_T
    xlo, xhi = _range([p.x])
    ylo, yhi = _range(p.ys)

    def sx(v):
        return x0 + (v - xlo) / (xhi - xlo) * plot_w

    def sy(v):
        return y0 + plot_h - (v - ylo) / (yhi - ylo) * plot_h

    out = ['<g class="panel">']
    if p.title:
        out.append(f'<text x="{x0}" y="{top + 22:.1f}" font-size="14">{escape(p.title)}</text>')
    out.append(f'<rect class="frame" x="{x0}" y="{y0:.1f}" width="{plot_w}" height="{plot_h}" '
               f'fill="none" stroke="#333"/>')
    for tv in nice_ticks(xlo, xhi):
        X = sx(tv)
        out.append(f'<line x1="{X:.2f}" y1="{y0 + plot_h:.1f}" x2="{X:.2f}" y2="{y0 + plot_h + 5:.1f}" stroke="#333"/>')
        out.append(f'<text class="xtick" x="{X:.2f}" y="{y0 + plot_h + 18:.1f}" font-size="11" '
                   f'text-anchor="middle">{_fmt_tick(tv, xhi - xlo)}</text>')
    for tv in nice_ticks(ylo, yhi):
        Y = sy(tv)
        out.append(f'<line x1="{x0 - 5}" y1="{Y:.2f}" x2="{x0}" y2="{Y:.2f}" stroke="#333"/>')
        out.append(f'<text class="ytick" x="{x0 - 8}" y="{Y + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{_fmt_tick(tv, yhi - ylo)}</text>')
    out.append(f'<text class="xlabel" x="{x0 + plot_w / 2:.1f}" y="{y0 + plot_h + 38:.1f}" '
               f'font-size="13" text-anchor="middle">{escape(p.xlabel)}</text>')
    cy = y0 + plot_h / 2
    out.append(f'<text class="ylabel" x="18" y="{cy:.1f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {cy:.1f})">{escape(p.ylabel)}</text>')
    for i, (y, label) in enumerate(zip(p.ys, p.labels)):
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<g class="curve" data-label="{escape(label)}" stroke="{color}" fill="{color}">')
        if len(p.x) == 1:
            out.append(f'<circle cx="{sx(p.x[0]):.2f}" cy="{sy(y[0]):.2f}" r="3"/>')
        else:
            pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(p.x, y))
            out.append(f'<polyline points="{pts}" fill="none" stroke-width="1.5"/>')
        out.append("</g>")
        ly = y0 + 14 + 16 * i
        out.append(f'<text class="legend" x="{x0 + plot_w + 12}" y="{ly:.1f}" font-size="12" '
                   f'fill="{color}">{escape(label)}</text>')
    out.append("</g>")
    return out


def render(panels: list[Panel], title: str = "") -> str:
    head = 30 if title else 0
    height = head + PANEL_H * len(panels)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
           f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">',
           f'<rect width="{WIDTH}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text class="title" x="{WIDTH / 2}" y="22" font-size="15" '
                   f'text-anchor="middle">{escape(title)}</text>')
    for k, p in enumerate(panels):
        out.extend(_panel_svg(p, head + k * PANEL_H))
    out.append("</svg>")
    return "\n".join(out) + "\n"
