"""From a RunConfig to trajectories and oracle comparisons.

Randomness: a run's seed material is a ``numpy.random.SeedSequence``. It is
spawned into two children, the first drawing J (Gaussian mode) and the second
seeding the noise stream. A single run uses ``SeedSequence(config.seed)``;
ensemble realization i uses child i of that sequence, so any realization can
be re-run on its own from (seed, index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig, matrix_from_json
from .integrator import RunResult, StepOptions, simulate
from .models import HamiltonianSpec, build_two_qubit_ising, uniform_rho0
from .noise import NoiseProcess, zero_noise
from .oracle import ComparisonReport, OracleTrajectory, compare, direct_evolve


@dataclass(frozen=True)
class Realization:
    index: int | None
    J: float | None
    noise_seed: np.random.SeedSequence


def realization(cfg: RunConfig, index: int | None = None) -> Realization:
    root = np.random.SeedSequence(cfg.seed)
    seq = root if index is None else root.spawn(index + 1)[index]
    j_seq, noise_seq = seq.spawn(2)
    J = None
    if cfg.model.type == "ising":
        if cfg.model.j_mode == "fixed":
            J = cfg.model.J
        else:
            J = float(np.random.default_rng(j_seq).normal(cfg.model.j_mean, cfg.model.j_std))
    return Realization(index, J, noise_seq)


def build_spec(cfg: RunConfig, J: float | None = None) -> HamiltonianSpec:
    m = cfg.model
    if m.type == "ising":
        return build_two_qubit_ising(m.J if J is None else J, m.h1, m.h2, m.Z)
    return HamiltonianSpec(matrix_from_json(m.H0, "model.H0"), matrix_from_json(m.Hb, "model.Hb"), m.Z)


def build_noise(cfg: RunConfig, seed) -> NoiseProcess:
    n = cfg.dim
    if cfg.noise.kind == "none":
        return zero_noise(n)
    return NoiseProcess(cfg.noise.kind, n, cfg.noise.sigma, cfg.noise.gamma, seed=seed)


def build_rho0(cfg: RunConfig) -> np.ndarray:
    if cfg.rho0.kind == "uniform":
        return uniform_rho0(cfg.dim)
    return matrix_from_json(cfg.rho0.matrix, "rho0.matrix")


def step_options(cfg: RunConfig) -> StepOptions:
    i = cfg.integrator
    return StepOptions(floor=i.floor, strict=i.strict, sign=i.sign, window=cfg.window.build(),
                       max_rotation=i.max_rotation)


def run_config(cfg: RunConfig, index: int | None = None, keep_noise: bool = False) -> RunResult:
    """Run one realization; metadata records everything needed to redo it."""
    r = realization(cfg, index)
    spec = build_spec(cfg, r.J)
    meta = {"config_hash": cfg.hash(), "seed": cfg.seed, "realization": index, "J": r.J}
    i = cfg.integrator
    return simulate(spec, cfg.schedule.build(), build_rho0(cfg), build_noise(cfg, r.noise_seed),
                    dt=i.dt, stride=i.stride, method=i.method, opts=step_options(cfg),
                    keep_noise=keep_noise, metadata=meta)


def run_trajectory(cfg: RunConfig):
    return run_config(cfg).trajectory


@dataclass
class OracleComparison:
    report: ComparisonReport
    passed: bool
    result: RunResult
    oracle: OracleTrajectory


def oracle_compare(cfg: RunConfig, index: int | None = None) -> OracleComparison:
    """Both pipelines on one grid; the oracle replays the run's noise path."""
    result = run_config(cfg, index, keep_noise=True)
    r = realization(cfg, index)
    spec = build_spec(cfg, r.J)
    v0 = result.basis0
    rho_fixed = v0 @ build_rho0(cfg) @ v0.conj().T
    oracle = direct_evolve(spec, cfg.schedule.build(), rho_fixed, cfg.integrator.dt, cfg.integrator.stride,
                           v0, noise_increments=result.noise_increments)
    report = compare(result.trajectory, oracle, crossing_gap=cfg.oracle.crossing_gap)
    passed = report.passes(cfg.oracle.entry_tol, cfg.oracle.level_tol)
    return OracleComparison(report, passed, result, oracle)
