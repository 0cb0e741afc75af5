"""Time stepping of the coupled (level gas, rho) system on a shared t grid.

The gas evolves in lambda; on the t grid its rates are scaled by
lambda_dot (chain rule). Noise is drawn once per grid step and held as a path
that is linear in lambda across the step; both the gas and rho see the same
realisation. The eigenframe (eigenvectors in the fixed basis) is carried along
so the fixed-basis noise can be expressed in the instantaneous eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ConfigError, DegenerateLevels, NonPositiveStep
from .levels import DEFAULT_FLOOR, LevelState, gas_hamiltonian, init_levels
from .master import FULL, SIGN, WindowSpec
from .models import HamiltonianSpec, Schedule
from .noise import NoiseProcess, zero_noise

METHODS = {"rk4": 0, "euler": 1}


@dataclass(frozen=True)
class StepOptions:
    floor: float = DEFAULT_FLOOR
    strict: bool = True
    sign: float = SIGN
    window: WindowSpec = FULL
    # largest turn of the coupling (radians) allowed per substep; 0 disables.
    # Only close approaches trigger substeps; smooth noiseless runs take none.
    max_rotation: float = 0.02


@dataclass
class CoupledState:
    t: float
    levels: LevelState
    rho: np.ndarray
    noise: NoiseProcess
    frame: np.ndarray  # eigenvectors as columns, fixed basis


@dataclass
class Trajectory:
    t: np.ndarray
    lam: np.ndarray
    x: np.ndarray
    v: np.ndarray
    l: np.ndarray
    rho: np.ndarray
    vectors: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    @property
    def occupations(self) -> np.ndarray:
        return np.real(np.diagonal(self.rho, axis1=1, axis2=2))

    @property
    def purity(self) -> np.ndarray:
        return np.sum(np.abs(self.rho) ** 2, axis=(1, 2))

    @property
    def trace_error(self) -> np.ndarray:
        return np.abs(np.trace(self.rho, axis1=1, axis2=2) - 1.0)

    @property
    def hermiticity_error(self) -> np.ndarray:
        return np.max(np.abs(self.rho - np.conj(np.swapaxes(self.rho, 1, 2))), axis=(1, 2))

    def level_state(self, i: int) -> LevelState:
        return LevelState(self.x[i].copy(), self.v[i].copy(), self.l[i].copy())

    def gas_energy(self, floor: float = DEFAULT_FLOOR) -> np.ndarray:
        return np.array([gas_hamiltonian(self.level_state(i), floor) for i in range(len(self))])


def pack(levels: LevelState, rho, frame) -> np.ndarray:
    return np.concatenate([
        np.asarray(levels.x, dtype=complex),
        np.asarray(levels.v, dtype=complex),
        np.asarray(levels.l, dtype=complex).ravel(),
        np.asarray(rho, dtype=complex).ravel(),
        np.asarray(frame, dtype=complex).ravel(),
    ])


def _unpack_many(ys: np.ndarray, n: int):
    nn = n * n
    x = ys[:, :n].real.copy()
    v = ys[:, n:2 * n].real.copy()
    l = ys[:, 2 * n:2 * n + nn].reshape(-1, n, n).copy()
    rho = ys[:, 2 * n + nn:2 * n + 2 * nn].reshape(-1, n, n).copy()
    vec = ys[:, 2 * n + 2 * nn:].reshape(-1, n, n).copy()
    return x, v, l, rho, vec


def unpack(y: np.ndarray, n: int) -> tuple[LevelState, np.ndarray, np.ndarray]:
    x, v, l, rho, vec = _unpack_many(y[None], n)
    return LevelState(x[0], v[0], l[0]), rho[0], vec[0]


def _kernel_args(schedule: Schedule, opts: StepOptions):
    w = opts.window
    return (schedule.params(), float(opts.floor), bool(opts.strict), float(opts.sign),
            w.code, w.eps, bool(w.drop_far_coherences))


def _step(method: str, state: CoupledState, dt: float, schedule: Schedule,
          opts: StepOptions) -> CoupledState:
    if dt <= 0:
        raise NonPositiveStep(f"dt must be positive, got {dt}")
    t_next = state.t + dt
    if t_next > schedule.t1 * (1 + 1e-12):
        raise ConfigError(f"step to t={t_next} overruns schedule end {schedule.t1}")
    n = state.levels.dim
    noisy = state.noise.kind != "none"
    e = np.zeros((n, n), dtype=complex)
    if noisy:
        lam0, _ = schedule.evaluate(state.t, check=False)
        lam1, _ = schedule.evaluate(t_next, check=False)
        inc = state.noise.increment(lam1 - lam0)
        e = inc.dh_dot
    sched, floor, strict, sign, mode, eps, drop = _kernel_args(schedule, opts)
    y = pack(state.levels, state.rho, state.frame)
    out = np.empty_like(y)
    status, _, _ = K.advance_step(METHODS[method], float(state.t), float(t_next), y, n, sched, e,
                                  noisy, floor, strict, sign, mode, eps, drop,
                                  float(opts.max_rotation), K.make_work(n), out)
    if status == K.DEGENERATE:
        raise DegenerateLevels(f"gap below floor {opts.floor:.1e}", t=state.t)
    if status == K.SUBSTEP_BUDGET:
        raise DegenerateLevels("substep budget exhausted near a level crossing", t=state.t)
    levels, rho, frame = unpack(out, n)
    return CoupledState(t_next, levels, rho, state.noise, frame)


def rk4_step(state: CoupledState, dt: float, schedule: Schedule,
             opts: StepOptions = StepOptions()) -> CoupledState:
    """Classical RK4 step; with noise, RK4 along the step's linear noise path."""
    return _step("rk4", state, dt, schedule, opts)


def euler_maruyama_step(state: CoupledState, dt: float, schedule: Schedule,
                        opts: StepOptions = StepOptions()) -> CoupledState:
    """First-order step; the noise term is the drawn increment itself."""
    return _step("euler", state, dt, schedule, opts)


def time_grid(schedule: Schedule, dt: float) -> tuple[int, np.ndarray]:
    """Number of steps and the grid t_k = t0 + k dt, ending exactly at t1."""
    if dt <= 0:
        raise NonPositiveStep(f"dt must be positive, got {dt}")
    span = schedule.t1 - schedule.t0
    steps = int(round(span / dt))
    if steps < 1 or abs(steps * dt - span) > 1e-9 * max(span, 1.0):
        raise ConfigError(f"dt={dt} does not divide [{schedule.t0}, {schedule.t1}]")
    grid = schedule.t0 + np.arange(steps + 1) * dt
    grid[-1] = schedule.t1
    return steps, grid


def lambda_on(schedule: Schedule, times) -> np.ndarray:
    return schedule.lam(times)


@dataclass
class RunResult:
    trajectory: Trajectory
    noise_increments: np.ndarray | None
    basis0: np.ndarray


def simulate(spec: HamiltonianSpec, schedule: Schedule, rho0, noise: NoiseProcess | None = None,
             dt: float = 1e-3, stride: int = 100, method: str = "rk4",
             opts: StepOptions = StepOptions(), keep_noise: bool = False,
             metadata: dict | None = None) -> RunResult:
    """Integrate from t0 to t1 and record every ``stride`` grid steps.

    ``rho0`` is given in the eigenbasis of H(lambda(t0)) (+ the noise value
    at t0). The eigenvectors used for that basis are returned as ``basis0``.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown integrator {method!r}")
    if stride < 1:
        raise ConfigError("stride must be >= 1")
    noise = zero_noise(spec.dim) if noise is None else noise
    steps, grid = time_grid(schedule, dt)
    lam = lambda_on(schedule, grid)
    noisy = noise.kind != "none"
    dh0 = noise.current.copy() if noisy else None
    lam0 = lam[0]
    levels, es = init_levels(spec, lam0, dh0, return_basis=True)
    rho0 = np.asarray(rho0, dtype=complex)
    n = spec.dim
    if noisy:
        dlams = np.diff(lam)
        increments = noise.path(dlams)
    else:
        dlams = np.ones(1)
        increments = np.zeros((1, n, n), dtype=complex)
    y0 = pack(levels, rho0, es.vectors)
    n_rec = steps // stride + 2
    rec_t = np.empty(n_rec)
    rec_y = np.empty((n_rec, y0.size), dtype=complex)
    sched, floor, strict, sign, mode, eps, drop = _kernel_args(schedule, opts)
    status, t_fail, count, substeps, herm = K.run_loop(
        METHODS[method], float(schedule.t0), float(dt), steps, float(schedule.t1), y0, n, sched,
        increments, dlams, noisy, floor, strict, sign, mode, eps, drop, float(opts.max_rotation),
        int(stride), rec_t, rec_y)
    if status == K.DEGENERATE:
        raise DegenerateLevels(f"gap below floor {opts.floor:.1e}", t=float(t_fail))
    if status == K.SUBSTEP_BUDGET:
        raise DegenerateLevels("substep budget exhausted near a level crossing", t=float(t_fail))
    rec_t = rec_t[:count]
    x, v, l, rho, vec = _unpack_many(rec_y[:count], n)
    meta = dict(metadata or {})
    meta.update(integrator=method, dt=dt, stride=stride, sign=opts.sign, steps=steps,
                substeps=int(substeps), max_hermitize_change=float(herm),
                noise_kind=noise.kind)
    traj = Trajectory(rec_t, lambda_on(schedule, rec_t), x, v, l, rho, vec, meta)
    return RunResult(traj, increments if (keep_noise and noisy) else None, es.vectors)


def initial_state(spec: HamiltonianSpec, schedule: Schedule, rho0, noise: NoiseProcess | None = None) -> CoupledState:
    noise = zero_noise(spec.dim) if noise is None else noise
    lam0, _ = schedule.evaluate(schedule.t0)
    dh0 = noise.current.copy() if noise.kind != "none" else None
    levels, es = init_levels(spec, lam0, dh0, return_basis=True)
    return CoupledState(schedule.t0, levels, np.asarray(rho0, dtype=complex), noise, es.vectors)

