"""Dense Hermitian helpers: diagonalisation, eigenvector gauge tracking, purity.

Hermitian operators are plain ``complex128`` numpy arrays; nothing here wraps
them in a class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousAlignment, DimensionMismatch, NonHermitianInput

HERMITIAN_TOL = 1e-8
MIN_OVERLAP = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with eigenvectors stored column-wise."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def hermiticity_error(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return ``(A + A^dagger) / 2`` as a complex array."""
    a = np.asarray(a, dtype=complex)
    return 0.5 * (a + a.conj().T)


def as_hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a square matrix as Hermitian and return a symmetrised copy."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    err = hermiticity_error(a)
    if err > tol:
        raise NonHermitianInput(f"max |H - H^dagger| = {err:.3e} exceeds {tol:.1e}")
    return hermitize(a)


def eigh(h, tol: float = HERMITIAN_TOL) -> EigenSystem:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    err = hermiticity_error(h)
    if err > tol:
        raise NonHermitianInput(f"max |H - H^dagger| = {err:.3e} exceeds {tol:.1e}")
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(values, vectors)


def reconstruct(es: EigenSystem) -> np.ndarray:
    v = es.vectors
    return (v * es.values) @ v.conj().T


def gauge_align(reference: np.ndarray, fresh: EigenSystem, t: float | None = None) -> EigenSystem:
    """Match ``fresh`` eigenvectors to the columns of ``reference``.

    Columns are permuted by maximum overlap and rephased so that
    ``<ref_k|aligned_k>`` is real and non-negative. Eigenvalues follow their
    columns.
    """
    reference = np.asarray(reference)
    if reference.shape != fresh.vectors.shape:
        raise DimensionMismatch(f"frame shape {reference.shape} != {fresh.vectors.shape}")
    overlap = reference.conj().T @ fresh.vectors
    mag = np.abs(overlap)
    perm = np.argmax(mag, axis=1)
    best = mag[np.arange(mag.shape[0]), perm]
    if np.any(best < MIN_OVERLAP):
        raise AmbiguousAlignment(f"best eigenvector overlap {best.min():.3f} < 1/sqrt(2)", t)
    if len(set(perm.tolist())) != len(perm) or np.any(np.argmax(mag, axis=0)[perm] != np.arange(len(perm))):
        raise AmbiguousAlignment("eigenvector overlaps do not define a unique matching", t)
    picked = overlap[np.arange(len(perm)), perm]
    phases = picked / np.abs(picked)
    vectors = fresh.vectors[:, perm] * phases.conj()
    return EigenSystem(fresh.values[perm], vectors)


def purity(rho) -> float:
    """tr(rho^2) for a Hermitian rho; real by construction."""
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho) ** 2))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * hermitize(a)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.trace(rho).real)
