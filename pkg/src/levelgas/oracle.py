"""Reference dynamics by direct diagonalisation.

``direct_evolve`` integrates drho/dt = -i[H(t), rho] in the fixed
(computational) basis with plain numpy RK4, then rotates rho into the
instantaneous eigenbasis, tracking eigenvector phases and ordering from grid
point to grid point. It shares no code with the level-gas kernels.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

from .errors import AmbiguousAlignment, GridMismatch
from .linalg import MIN_OVERLAP, EigenSystem, gauge_align
from .models import HamiltonianSpec, Schedule

MAX_BISECTIONS = 40


@dataclass
class OracleTrajectory:
    t: np.ndarray
    lam: np.ndarray
    levels: np.ndarray  # eigenvalues in tracked (aligned) order
    rho_fixed: np.ndarray
    rho: np.ndarray  # in the tracked instantaneous eigenbasis
    vectors: np.ndarray

    def __len__(self):
        return len(self.t)

    @property
    def occupations(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho, axis1=1, axis2=2))

    @property
    def purity(self) -> np.ndarray:
        return np.sum(np.abs(self.rho_fixed) ** 2, axis=(1, 2))


@dataclass
class ComparisonReport:
    max_abs_entry_diff: float
    rms_diff: float
    max_level_diff: float
    worst_t: float
    worst_entry: tuple[int, int]
    worst_level_t: float
    samples: int
    near_crossing_samples: int = 0
    near_crossing_max_diff: float = 0.0

    def passes(self, entry_tol: float, level_tol: float) -> bool:
        return self.max_abs_entry_diff <= entry_tol and self.max_level_diff <= level_tol

    def to_json(self, **extra) -> str:
        d = asdict(self)
        d["worst_entry"] = list(self.worst_entry)
        d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True)


def eigen_levels(spec: HamiltonianSpec, schedule: Schedule, grid) -> np.ndarray:
    """Ascending eigenvalues of H(lambda(t)) on every grid time."""
    lam = schedule.lam(grid)
    hs = spec.H0[None] + (lam * spec.Z)[:, None, None] * spec.Hb[None]
    return np.linalg.eigvalsh(hs)


class _NoisePath:
    """dh(lambda), linear in lambda within each grid step."""

    def __init__(self, lam_grid, increments, dh0):
        self.lam = lam_grid
        self.inc = increments
        self.rate = increments / np.diff(lam_grid)[:, None, None]
        n = increments.shape[1]
        start = np.zeros((len(increments) + 1, n, n), dtype=complex)
        start[0] = dh0
        start[1:] = dh0 + np.cumsum(increments, axis=0)
        self.start = start

    def at(self, k: int, lam: float) -> np.ndarray:
        return self.start[k] + (lam - self.lam[k]) * self.rate[k]


def _transport(frame: np.ndarray, h_of, s0: float, s1: float, depth: int = 0, t=None) -> EigenSystem:
    """Carry the eigenframe from parameter s0 to s1, bisecting when a single
    jump is too large to match eigenvectors unambiguously.

    A match that reorders the levels means the jump stepped over a close
    approach diabatically, so it is bisected too; only a crossing that
    survives MAX_BISECTIONS halvings is followed through.
    """
    fresh = np.linalg.eigh(h_of(s1))
    try:
        aligned = gauge_align(frame, EigenSystem(*fresh), t)
        if depth >= MAX_BISECTIONS or np.all(np.diff(aligned.values) > 0):
            return aligned
    except AmbiguousAlignment:
        if depth >= MAX_BISECTIONS:
            raise
    mid = 0.5 * (s0 + s1)
    half = _transport(frame, h_of, s0, mid, depth + 1, t)
    return _transport(half.vectors, h_of, mid, s1, depth + 1, t)


@njit(cache=True)
def _von_neumann_rk4(h_start, h_mid, h_end, steps_h, rho, out):
    """Classical RK4 for drho/dt = -i[H, rho]; out[k] is rho after step k."""
    for k in range(h_start.shape[0]):
        h = steps_h[k]
        ha, hm, he = h_start[k], h_mid[k], h_end[k]
        k1 = -1j * (ha @ rho - rho @ ha)
        r = rho + (0.5 * h) * k1
        k2 = -1j * (hm @ r - r @ hm)
        r = rho + (0.5 * h) * k2
        k3 = -1j * (hm @ r - r @ hm)
        r = rho + h * k3
        k4 = -1j * (he @ r - r @ he)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k] = rho
    return rho


def _match_columns(reference: np.ndarray, vectors: np.ndarray):
    """perm, phases with vectors[:, i] ~= reference[:, perm[i]] * phases[i]."""
    ov = reference.conj().T @ vectors
    perm = np.argmax(np.abs(ov), axis=0)
    ph = ov[perm, np.arange(len(perm))]
    return perm, ph / np.abs(ph)


def direct_evolve(spec: HamiltonianSpec, schedule: Schedule, rho0_fixed, dt: float, stride: int,
                  basis0: np.ndarray, noise_increments=None, dh0=None,
                  chunk: int = 4096) -> OracleTrajectory:
    """Classical RK4 on the fixed-basis von Neumann equation over the t0..t1
    grid, sampled every ``stride`` steps.

    ``basis0`` fixes the eigenvector gauge at t0; it must be the basis the
    compared run used for its initial state.
    """
    steps = int(round((schedule.t1 - schedule.t0) / dt))
    grid = schedule.t0 + np.arange(steps + 1) * dt
    grid[-1] = schedule.t1
    half = grid[:-1] + 0.5 * (grid[1:] - grid[:-1])
    lam_grid = schedule.lam(grid)
    lam_half = schedule.lam(half)
    n = spec.dim
    hb = spec.Z * spec.Hb
    noise = None
    if noise_increments is not None:
        dh0 = np.zeros((n, n), dtype=complex) if dh0 is None else np.asarray(dh0, dtype=complex)
        noise = _NoisePath(lam_grid, np.asarray(noise_increments), dh0)

    def hamiltonians(lo, hi):
        # H at the start, midpoint and end of steps lo..hi-1
        hs = spec.H0 + lam_grid[lo:hi, None, None] * hb
        hm = spec.H0 + lam_half[lo:hi, None, None] * hb
        he = spec.H0 + lam_grid[lo + 1:hi + 1, None, None] * hb
        if noise is not None:
            base = noise.start[lo:hi]
            rate = noise.rate[lo:hi]
            hs = hs + base
            hm = hm + base + (lam_half[lo:hi] - lam_grid[lo:hi])[:, None, None] * rate
            he = he + base + (lam_grid[lo + 1:hi + 1] - lam_grid[lo:hi])[:, None, None] * rate
        return hs, hm, he

    def segment(k):
        def h_of(lam):
            h = spec.H0 + lam * hb
            return h if noise is None else h + noise.at(k, lam)
        return h_of

    record_at = set(range(stride, steps + 1, stride)) | {steps}
    rho = np.array(rho0_fixed, dtype=complex)
    basis0 = np.asarray(basis0, dtype=complex)
    values0 = np.linalg.eigvalsh(hamiltonians(0, 1)[0][0])
    t_rec, lam_rec, lv_rec, rf_rec, re_rec, vec_rec = [], [], [], [], [], []

    def record(i, vals, vecs, rho):
        rho = 0.5 * (rho + rho.conj().T)
        t_rec.append(grid[i])
        lam_rec.append(lam_grid[i])
        lv_rec.append(vals)
        rf_rec.append(rho)
        re_rec.append(vecs.conj().T @ rho @ vecs)
        vec_rec.append(vecs.copy())

    record(0, values0, basis0, rho)
    # tracked frame at grid point k is prev_vecs[:, perm] * phase
    prev_vecs, perm, phase = basis0, np.arange(n), np.ones(n, dtype=complex)
    for lo in range(0, steps, chunk):
        hi = min(lo + chunk, steps)
        hs, hm, he = hamiltonians(lo, hi)
        rhos = np.empty((hi - lo, n, n), dtype=complex)
        rho = _von_neumann_rk4(hs, hm, he, grid[lo + 1:hi + 1] - grid[lo:hi], rho, rhos)
        vals_end, vecs_end = np.linalg.eigh(he)
        chain = np.concatenate([prev_vecs[None], vecs_end], axis=0)
        # overlap of each eigenvector with its predecessor
        step_overlap = np.einsum("kij,kij->kj", chain[:-1].conj(), chain[1:])
        k = lo
        while k < hi:
            j = k - lo
            o = step_overlap[j:, perm]
            good = np.abs(o).min(axis=1) > MIN_OVERLAP
            run = len(good) if good.all() else int(np.argmin(good))
            if run:
                rel = o[:run].conj() / np.abs(o[:run])
                phases = phase * np.cumprod(rel, axis=0)
                for r in range(run):
                    i = k + r
                    if i + 1 in record_at:
                        record(i + 1, vals_end[i - lo][perm], vecs_end[i - lo][:, perm] * phases[r],
                               rhos[i - lo])
                phase = phases[-1]
                k += run
                continue
            # ambiguous single step: transport the frame through the segment
            frame = chain[j][:, perm] * phase
            es = _transport(frame, segment(k), lam_grid[k], lam_grid[k + 1], t=grid[k + 1])
            perm, phase = _match_columns(vecs_end[j], es.vectors)
            if k + 1 in record_at:
                record(k + 1, es.values, es.vectors, rhos[j])
            k += 1
        prev_vecs = vecs_end[-1]
    return OracleTrajectory(np.array(t_rec), np.array(lam_rec), np.array(lv_rec),
                            np.array(rf_rec), np.array(re_rec), np.array(vec_rec))


def compare(a, b: OracleTrajectory, crossing_gap: float = 0.0) -> ComparisonReport:
    """Entry-wise rho and level deviations of trajectory ``a`` from ``b``.

    Samples whose smallest level gap is below ``crossing_gap`` are reported
    separately and left out of the headline metrics.
    """
    if len(a.t) != len(b.t) or not np.allclose(a.t, b.t, rtol=0, atol=1e-9):
        raise GridMismatch(f"time grids differ ({len(a.t)} vs {len(b.t)} samples)")
    diff = np.abs(a.rho - b.rho)
    level_diff = np.abs(a.x - b.levels)
    gaps = np.min(np.diff(np.sort(b.levels, axis=1), axis=1), axis=1) if b.levels.shape[1] > 1 else np.full(len(b.t), np.inf)
    near = gaps < crossing_gap
    keep = ~near
    if not np.any(keep):
        keep = np.ones_like(near)
    d = diff[keep]
    idx = np.unravel_index(int(np.argmax(d)), d.shape)
    t_keep = a.t[keep]
    ld = level_diff[keep]
    lidx = np.unravel_index(int(np.argmax(ld)), ld.shape)
    return ComparisonReport(
        max_abs_entry_diff=float(d.max()),
        rms_diff=float(math.sqrt(np.mean(d**2))),
        max_level_diff=float(ld.max()),
        worst_t=float(t_keep[idx[0]]),
        worst_entry=(int(idx[1]), int(idx[2])),
        worst_level_t=float(t_keep[lidx[0]]),
        samples=int(len(a.t)),
        near_crossing_samples=int(near.sum()),
        near_crossing_max_diff=float(diff[near].max()) if near.any() else 0.0,
    )
