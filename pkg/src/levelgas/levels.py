"""The level gas: eigenvalues x, velocities v and relative angular momenta l
of H(lambda) = H0 + lambda Z Hb (+ dh), and their lambda-derivatives.

Noise enters only through the noise *rate* ``e = d(dh)/dlambda``, taken in
the instantaneous eigenbasis (e_mn = <m|d(dh)/dlambda|n>). Within a grid step
the noise path is linear in lambda, so the fixed-basis rate is the step
increment divided by the step's dlambda; the integrator rotates it into the
eigenbasis at every stage. With ``e`` as the rate, the noisy equations are

    dx_m = v_m + e_mm
    dv_m = sum_n 2|l_mn|^2/(x_m-x_n)^3 + 2 Re(l_mn e_nm)/(x_m-x_n)^2
    dl_mn = sum_{k != m,n} l_mk l_kn (1/(x_m-x_k)^2 - 1/(x_k-x_n)^2)
            + (x_m-x_n) (l_mk e_kn - e_mk l_kn) / ((x_m-x_k)(x_n-x_k))
            - e_mn (v_m - v_n) + l_mn (e_mm - e_nn)/(x_m-x_n)

which reduce to the noiseless gas when ``e`` vanishes and track the exact
spectrum of H0 + lambda Z Hb + dh(lambda).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegenerateLevels
from .linalg import EigenSystem, as_hermitian, eigh
from .models import HamiltonianSpec, hamiltonian_at

DEFAULT_FLOOR = 1e-12
INIT_GAP_RTOL = 1e-10


@dataclass(frozen=True)
class LevelState:
    x: np.ndarray
    v: np.ndarray
    l: np.ndarray

    @property
    def dim(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class LevelDerivative:
    dx: np.ndarray
    dv: np.ndarray
    dl: np.ndarray


def min_gap(x) -> float:
    x = np.sort(np.asarray(x, dtype=float))
    return float(np.min(np.diff(x))) if len(x) > 1 else np.inf


def levels_from_eigensystem(es: EigenSystem, bias: np.ndarray) -> LevelState:
    """x, v, l of the gas for eigenpairs ``es`` and perturbation ``bias`` = Z Hb."""
    b = es.vectors.conj().T @ bias @ es.vectors
    x = es.values.astype(float)
    v = np.real(np.diag(b)).copy()
    l = (x[:, None] - x[None, :]) * b
    iu = np.triu_indices(len(x), 1)
    l[iu[1], iu[0]] = -l[iu].conj()
    np.fill_diagonal(l, 0.0)
    return LevelState(x, v, l)


def init_levels(spec: HamiltonianSpec, lambda0: float, dh=None,
                return_basis: bool = False):
    """Gas coordinates at ``lambda0`` from a direct diagonalisation.

    With ``return_basis`` the eigensystem used is returned as well, so callers
    can map states between the eigenbasis and the fixed basis consistently.
    """
    h = hamiltonian_at(spec, lambda0, dh)
    es = eigh(h)
    scale = max(np.linalg.norm(h, 2), 1.0)
    gap = min_gap(es.values)
    if gap <= INIT_GAP_RTOL * scale:
        raise DegenerateLevels(f"minimum gap {gap:.3e} at lambda={lambda0}")
    state = levels_from_eigensystem(es, spec.bias)
    return (state, es) if return_basis else state


def _gaps(x, floor, strict):
    inv = np.empty((len(x), len(x)))
    status, i, j = K.inverse_gaps(np.asarray(x, dtype=float), floor, strict, inv)
    if status != K.OK:
        raise DegenerateLevels(f"gap below floor {floor:.1e}", pair=(int(i), int(j)))
    return inv


def _rates(s: LevelState, e, noisy, floor, strict) -> LevelDerivative:
    n = s.dim
    inv = _gaps(s.x, floor, strict)
    dx, dv = np.empty(n), np.empty(n)
    dl = np.empty((n, n), dtype=complex)
    K.level_rates(np.asarray(s.x, dtype=float), np.asarray(s.v, dtype=float),
                  np.asarray(s.l, dtype=complex), inv, e, noisy, dx, dv, dl)
    return LevelDerivative(dx, dv, dl)


def pechukas_rhs(s: LevelState, floor: float = DEFAULT_FLOOR, strict: bool = True) -> LevelDerivative:
    zero = np.zeros((s.dim, s.dim), dtype=complex)
    return _rates(s, zero, False, floor, strict)


def stochastic_pechukas_rhs(s: LevelState, dh_rate, floor: float = DEFAULT_FLOOR,
                            strict: bool = True) -> LevelDerivative:
    """Noisy gas derivative for noise rate ``dh_rate`` = d(dh)/dlambda,
    given in the eigenbasis of ``s``."""
    e = as_hermitian(dh_rate)
    return _rates(s, e, True, floor, strict)


def gas_hamiltonian(s: LevelState, floor: float = DEFAULT_FLOOR) -> float:
    """0.5 sum v^2 + 0.5 sum_{m != n} |l_mn|^2/(x_m - x_n)^2."""
    inv = _gaps(s.x, floor, True)
    kinetic = 0.5 * float(np.sum(np.asarray(s.v) ** 2))
    potential = 0.5 * float(np.sum(np.abs(s.l) ** 2 * inv**2))
    return kinetic + potential


def total_momentum(s: LevelState) -> float:
    return float(np.sum(s.v))
