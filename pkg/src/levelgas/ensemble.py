"""Ensembles of independent realizations with per-time statistics.

Realizations may run in worker processes, but results are reduced strictly in
realization order, so the statistics do not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .errors import ConfigError, DegenerateLevels
from .runner import realization, run_config


@dataclass
class Failure:
    index: int
    J: float | None
    t: float | None
    message: str


@dataclass
class EnsembleStats:
    t: np.ndarray
    lam: np.ndarray
    mean_occ: np.ndarray
    std_occ: np.ndarray
    mean_purity: np.ndarray  # mean of per-realization purities
    std_purity: np.ndarray
    purity_of_mean: np.ndarray  # tr(rho_bar^2), rho_bar averaged over realizations
    R: int
    completed: int
    master_seed: int
    failures: list[Failure] = field(default_factory=list)
    J: list = field(default_factory=list)
    # largest |purity - 1| of any single realization at any sample
    max_purity_deviation: float = 0.0

    def summary(self) -> dict:
        return {
            "R": self.R,
            "completed": self.completed,
            "failed": len(self.failures),
            "master_seed": self.master_seed,
            "failures": [vars(f) for f in self.failures],
            "purity_of_mean_start": float(self.purity_of_mean[0]),
            "purity_of_mean_end": float(self.purity_of_mean[-1]),
            "max_realization_purity_deviation": self.max_purity_deviation,
        }


def _run_one(cfg_dict: dict, index: int):
    cfg = RunConfig.from_dict(cfg_dict)
    try:
        traj = run_config(cfg, index).trajectory
    except DegenerateLevels as exc:
        return index, realization(cfg, index).J, None, exc
    return index, traj.metadata["J"], traj, None


def _results(cfg: RunConfig, R: int, workers: int):
    d = cfg.to_dict()
    if workers <= 1:
        for i in range(R):
            yield _run_one(d, i)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_one, [d] * R, range(R), chunksize=max(1, R // (4 * workers)))


def run_ensemble(cfg: RunConfig, R: int, workers: int | None = None) -> EnsembleStats:
    """R realizations of ``cfg`` (seeded from ``cfg.seed``)."""
    if R < 1:
        raise ConfigError(f"ensemble size must be >= 1, got {R}")
    if workers is None:
        workers = os.cpu_count() or 1
    failures = []
    js = []
    occ_sum = occ_sq = pur_sum = pur_sq = rho_sum = None
    t = lam = None
    done = 0
    worst = 0.0
    # pool.map yields in submission order, so this loop is the ordered reduce
    for index, J, traj, exc in _results(cfg, R, workers):
        js.append(J)
        if exc is not None:
            failures.append(Failure(index, J, exc.t, str(exc)))
            continue
        occ, pur, rho = traj.occupations, traj.purity, traj.rho
        if occ_sum is None:
            t, lam = traj.t, traj.lam
            occ_sum, occ_sq = np.zeros_like(occ), np.zeros_like(occ)
            pur_sum, pur_sq = np.zeros_like(pur), np.zeros_like(pur)
            rho_sum = np.zeros_like(rho)
        occ_sum += occ
        occ_sq += occ * occ
        pur_sum += pur
        pur_sq += pur * pur
        rho_sum += rho
        worst = max(worst, float(np.max(np.abs(pur - 1.0))))
        done += 1
    if done == 0:
        raise DegenerateLevels(f"all {R} realizations failed; first: {failures[0].message}")
    mean_occ = occ_sum / done
    mean_pur = pur_sum / done
    rho_bar = rho_sum / done
    return EnsembleStats(
        t=t, lam=lam, mean_occ=mean_occ,
        std_occ=np.sqrt(np.maximum(occ_sq / done - mean_occ**2, 0.0)),
        mean_purity=mean_pur,
        std_purity=np.sqrt(np.maximum(pur_sq / done - mean_pur**2, 0.0)),
        purity_of_mean=np.sum(np.abs(rho_bar) ** 2, axis=(1, 2)),
        R=R, completed=done, master_seed=cfg.seed, failures=failures, J=js,
        max_purity_deviation=worst,
    )
