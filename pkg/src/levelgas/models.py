"""Hamiltonian specifications, the two-qubit Ising instance, initial states
and the lambda(t) driving schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidSchedule, OutOfRange
from .linalg import as_hermitian

SCHEDULE_KINDS = ("log", "linear", "constant")
SCHEDULE_CODES = {kind: code for code, kind in enumerate(SCHEDULE_KINDS)}

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class HamiltonianSpec:
    """H(lambda) = H0 + lambda * Z * Hb."""

    H0: np.ndarray
    Hb: np.ndarray
    Z: float = 1.0

    def __post_init__(self):
        h0 = as_hermitian(self.H0)
        hb = as_hermitian(self.Hb)
        if h0.shape != hb.shape:
            raise DimensionMismatch(f"H0 {h0.shape} and Hb {hb.shape} differ in shape")
        object.__setattr__(self, "H0", h0)
        object.__setattr__(self, "Hb", hb)
        object.__setattr__(self, "Z", float(self.Z))

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    @property
    def bias(self) -> np.ndarray:
        """The scaled perturbation Z * Hb."""
        return self.Z * self.Hb


@dataclass(frozen=True)
class Schedule:
    """lambda(t) on [t0, t1].

    ``log``: lambda = A * log_base(B t); ``linear``: lambda = A t;
    ``constant``: lambda = A.
    """

    kind: str = "log"
    A: float = 1e-3
    B: float = 0.1
    t0: float = 10.1
    t1: float = 100.0
    log_base: str = "e"

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise InvalidSchedule(f"unknown schedule kind {self.kind!r}")
        if self.log_base not in ("e", "10"):
            raise InvalidSchedule(f"log_base must be 'e' or '10', got {self.log_base!r}")
        if not self.t0 < self.t1:
            raise InvalidSchedule(f"need t0 < t1, got [{self.t0}, {self.t1}]")
        if self.kind == "log" and not (self.B * self.t0 > 0 and self.B * self.t1 > 0):
            raise InvalidSchedule("log schedule requires B*t > 0 on [t0, t1]")

    @property
    def code(self) -> int:
        return SCHEDULE_CODES[self.kind]

    @property
    def log_scale(self) -> float:
        """Factor turning a natural log into the configured base."""
        return 1.0 if self.log_base == "e" else 1.0 / math.log(10.0)

    def params(self) -> tuple[int, float, float, float]:
        """Flat tuple consumed by the compiled kernels."""
        return self.code, float(self.A), float(self.B), self.log_scale

    def evaluate(self, t: float, check: bool = True) -> tuple[float, float]:
        """Return ``(lambda, dlambda/dt)`` at ``t``."""
        if check and not (self.t0 <= t <= self.t1):
            raise OutOfRange(f"t={t} outside [{self.t0}, {self.t1}]")
        if self.kind == "log":
            arg = self.B * t
            if arg <= 0:
                raise InvalidSchedule(f"log schedule undefined at t={t} (B*t={arg})")
            c = self.A * self.log_scale
            return c * math.log(arg), c / t
        if self.kind == "linear":
            return self.A * t, self.A
        return self.A, 0.0

    def lam(self, t) -> np.ndarray:
        """Vectorised lambda(t), unchecked."""
        t = np.asarray(t, dtype=float)
        if self.kind == "log":
            return self.A * self.log_scale * np.log(self.B * t)
        if self.kind == "linear":
            return self.A * t
        return np.full_like(t, self.A)


def schedule_eval(s: Schedule, t: float) -> tuple[float, float]:
    return s.evaluate(t)


def build_two_qubit_ising(J: float, h1: float, h2: float, Z: float) -> HamiltonianSpec:
    """J s1z s2z + lambda Z (h1 s1x + h2 s2x) on the basis |00>,|01>,|10>,|11>."""
    h0 = J * np.kron(PAULI_Z, PAULI_Z)
    hb = h1 * np.kron(PAULI_X, IDENTITY_2) + h2 * np.kron(IDENTITY_2, PAULI_X)
    return HamiltonianSpec(h0, hb, Z)


def ising_levels(J: float, h1: float, h2: float, Z: float, lam) -> np.ndarray:
    """Closed-form ascending spectrum +-sqrt(J^2 + (lam Z (h1 +- h2))^2)."""
    lam = np.asarray(lam, dtype=float)
    a = np.sqrt(J**2 + (lam * Z * (h1 + h2)) ** 2)
    b = np.sqrt(J**2 + (lam * Z * (h1 - h2)) ** 2)
    return np.sort(np.stack([-a, -b, b, a], axis=-1), axis=-1)


def uniform_rho0(n: int) -> np.ndarray:
    """Projector onto the equal-amplitude superposition: every entry 1/n."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return np.full((n, n), 1.0 / n, dtype=complex)


def hamiltonian_at(spec: HamiltonianSpec, lam: float, dh=None) -> np.ndarray:
    h = spec.H0 + lam * spec.Z * spec.Hb
    if dh is not None:
        dh = np.asarray(dh, dtype=complex)
        if dh.shape != h.shape:
            raise DimensionMismatch(f"noise shape {dh.shape} != Hamiltonian shape {h.shape}")
        h = h + dh
    return h
