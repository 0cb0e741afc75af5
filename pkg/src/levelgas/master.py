"""Density-matrix dynamics in the instantaneous eigenbasis.

With the coupling matrix

    g_un = l_un/(x_u - x_n)^2 + e_un/(x_u - x_n)    (u != n),   g_uu = 0,

where ``e`` is the noise rate d(dh)/dlambda in the instantaneous eigenbasis,
the evolution is

    d rho/dt = SIGN * lam_dot * (g rho - rho g) - i [diag(x), rho].

``g`` is anti-Hermitian, so the right-hand side is Hermitian and traceless.
SIGN = +1 is the convention that reproduces direct von Neumann evolution
(see ``scripts/sign_audit.py``); the opposite sign is kept selectable for
that audit.

Windowing keeps only the couplings g_un with |u - n| <= eps (index mode) or
|x_u - x_n| <= eps (energy mode), which restricts every n-sum of the
occupation equation to the window around the level in question.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .levels import DEFAULT_FLOOR, LevelState, _gaps
from .linalg import as_hermitian

SIGN = 1.0


@dataclass(frozen=True)
class WindowSpec:
    """Coupling window; ``epsilon=None`` means unbounded."""

    epsilon: float | None = None
    mode: str = "index"
    drop_far_coherences: bool = False

    def __post_init__(self):
        if self.mode not in ("index", "energy"):
            raise ValueError(f"window mode must be 'index' or 'energy', got {self.mode!r}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("window epsilon must be non-negative")
        if self.mode == "index" and self.epsilon is not None and self.epsilon != int(self.epsilon):
            raise ValueError("index window epsilon must be an integer")

    @property
    def code(self) -> int:
        if self.epsilon is None or (self.mode == "energy" and math.isinf(self.epsilon)):
            return K.WINDOW_FULL
        return K.WINDOW_INDEX if self.mode == "index" else K.WINDOW_ENERGY

    @property
    def eps(self) -> float:
        return -1.0 if self.epsilon is None else float(self.epsilon)


FULL = WindowSpec()


def _rhs(s: LevelState, rho, lambda_dot, e, noisy, window: WindowSpec, sign, floor, strict):
    n = s.dim
    x = np.asarray(s.x, dtype=float)
    inv = _gaps(x, floor, strict)
    mask = np.empty((n, n))
    K.window_mask(x, window.code, window.eps, mask)
    g = np.empty((n, n), dtype=complex)
    K.coupling(np.asarray(s.l, dtype=complex), inv, e, noisy, mask, g)
    out = np.empty((n, n), dtype=complex)
    K.rho_rates(x, np.asarray(rho, dtype=complex), g, float(lambda_dot), float(sign),
                window.code, window.eps, window.drop_far_coherences, out)
    return out


def rho_rhs(s: LevelState, rho, lambda_dot: float, sign: float = SIGN,
            floor: float = DEFAULT_FLOOR, strict: bool = True) -> np.ndarray:
    """d rho/dt for the closed system."""
    zero = np.zeros((s.dim, s.dim), dtype=complex)
    return _rhs(s, rho, lambda_dot, zero, False, FULL, sign, floor, strict)


def rho_rhs_noisy(s: LevelState, rho, lambda_dot: float, dh_rate, sign: float = SIGN,
                  floor: float = DEFAULT_FLOOR, strict: bool = True) -> np.ndarray:
    """d rho/dt including the noise coupling e_un/(x_u - x_n)."""
    return _rhs(s, rho, lambda_dot, as_hermitian(dh_rate), True, FULL, sign, floor, strict)


def rho_rhs_windowed(s: LevelState, rho, lambda_dot: float, dh_rate, window: WindowSpec,
                     sign: float = SIGN, floor: float = DEFAULT_FLOOR,
                     strict: bool = True) -> np.ndarray:
    return _rhs(s, rho, lambda_dot, as_hermitian(dh_rate), True, window, sign, floor, strict)


def occupation_rhs(s: LevelState, rho, lambda_dot: float, dh_rate, window: WindowSpec = FULL,
                   sign: float = SIGN, floor: float = DEFAULT_FLOOR,
                   strict: bool = True) -> np.ndarray:
    """d rho_ww/dt as a real vector, summed explicitly over the window:

        sign * lam_dot * sum_n [(l_wn rho_nw - rho_wn l_nw)/(x_w - x_n)^2
                                + (e_wn rho_nw + rho_wn e_nw)/(x_w - x_n)]

    Both numerators are twice a real part, so the result is real.
    """
    x = np.asarray(s.x, dtype=float)
    n = len(x)
    inv = _gaps(x, floor, strict)
    e = as_hermitian(dh_rate)
    rho = np.asarray(rho, dtype=complex)
    l = np.asarray(s.l, dtype=complex)
    mask = np.empty((n, n))
    K.window_mask(x, window.code, window.eps, mask)
    np.fill_diagonal(mask, 0.0)
    rho_t = rho.T
    coherent = (l * rho_t - rho * l.T) * inv**2
    noisy = (e * rho_t + rho * e.T) * inv
    out = sign * lambda_dot * np.sum(mask * (coherent + noisy), axis=1)
    return out.real.copy()
