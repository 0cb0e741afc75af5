"""Hermitian noise processes delta_h(lambda) indexed by the driving parameter.

Increments use a GUE-style convention: diagonal entries ~ N(0, sigma^2 dlam),
off-diagonal entries (x + iy)/sqrt(2) with x, y ~ N(0, sigma^2 dlam), so that
E|dh_mn|^2 = sigma^2 dlam for every entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NonPositiveStep

NOISE_KINDS = ("none", "wiener", "ornstein_uhlenbeck")


@dataclass(frozen=True)
class NoiseIncrement:
    d_dh: np.ndarray
    dh_dot: np.ndarray


def hermitian_from_normals(z: np.ndarray, n: int) -> np.ndarray:
    """Map ``n*n`` standard normals (last axis) to Hermitian matrices."""
    z = np.asarray(z, dtype=float)
    lead = z.shape[:-1]
    iu = np.triu_indices(n, 1)
    p = len(iu[0])
    out = np.zeros(lead + (n, n), dtype=complex)
    idx = np.arange(n)
    out[..., idx, idx] = z[..., :n]
    upper = (z[..., n : n + p] + 1j * z[..., n + p :]) / np.sqrt(2.0)
    out[..., iu[0], iu[1]] = upper
    out[..., iu[1], iu[0]] = upper.conj()
    return out


class NoiseProcess:
    """Stateful delta_h generator; one instance per trajectory."""

    def __init__(self, kind: str, dim: int, sigma: float = 0.0, gamma: float = 0.0,
                 seed=None, initial=None):
        if kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {kind!r}")
        if sigma < 0 or gamma < 0:
            raise ValueError("sigma and gamma must be non-negative")
        self.kind = kind
        self.dim = int(dim)
        self.sigma = float(sigma)
        self.gamma = float(gamma)
        self.rng = np.random.default_rng(seed)
        if initial is None:
            self.current = np.zeros((self.dim, self.dim), dtype=complex)
        else:
            if kind == "none" and np.any(initial):
                raise ValueError("a 'none' process must start at zero")
            self.current = np.array(initial, dtype=complex)

    def __repr__(self):
        return f"NoiseProcess({self.kind!r}, dim={self.dim}, sigma={self.sigma}, gamma={self.gamma})"

    def _normals(self, size):
        return self.rng.standard_normal(size)

    def _wiener(self, d_lambda: float, z: np.ndarray) -> np.ndarray:
        return self.sigma * np.sqrt(d_lambda) * hermitian_from_normals(z, self.dim)

    def increment(self, d_lambda: float) -> NoiseIncrement:
        if self.kind == "wiener":
            return sample_wiener_increment(self, d_lambda)
        if self.kind == "ornstein_uhlenbeck":
            return ou_step(self, d_lambda)
        zero = np.zeros((self.dim, self.dim), dtype=complex)
        return NoiseIncrement(zero, zero.copy())

    def path(self, d_lambdas) -> np.ndarray:
        """Draw one increment per entry of ``d_lambdas``; returns shape (K, N, N).

        Equivalent, bit for bit, to calling :meth:`increment` K times.
        """
        d_lambdas = np.asarray(d_lambdas, dtype=float)
        k, n = len(d_lambdas), self.dim
        if self.kind == "none":
            return np.zeros((k, n, n), dtype=complex)
        if np.any(d_lambdas <= 0):
            raise NonPositiveStep("noise requires strictly increasing lambda on every step")
        z = self._normals((k, n * n))
        if self.kind == "wiener":
            dw = self.sigma * np.sqrt(d_lambdas)[:, None, None] * hermitian_from_normals(z, n)
            self.current = self.current + dw.sum(axis=0)
            return dw
        w = self.sigma * np.sqrt(d_lambdas)[:, None, None] * hermitian_from_normals(z, n)
        out = np.empty((k, n, n), dtype=complex)
        self.current = _ou_recursion(self.current.copy(), w, self.gamma, d_lambdas, out)
        return out

    def _ou_delta(self, d_lambda: float, z: np.ndarray) -> np.ndarray:
        return -self.gamma * self.current * d_lambda + self._wiener(d_lambda, z)


@njit(cache=True)
def _ou_recursion(current, w, gamma, d_lambdas, out):
    # same operation order as _ou_delta, so path() matches repeated increment()
    for i in range(len(d_lambdas)):
        d = -gamma * current * d_lambdas[i] + w[i]
        out[i] = d
        current = current + d
    return current


def sample_wiener_increment(p: NoiseProcess, d_lambda: float) -> NoiseIncrement:
    if d_lambda <= 0:
        raise NonPositiveStep(f"d_lambda must be positive, got {d_lambda}")
    d = p._wiener(d_lambda, p._normals(p.dim * p.dim))
    p.current = p.current + d
    return NoiseIncrement(d, d / d_lambda)


def ou_step(p: NoiseProcess, d_lambda: float) -> NoiseIncrement:
    """Euler-Maruyama step of d(dh) = -gamma dh dlam + sigma dW."""
    if d_lambda <= 0:
        raise NonPositiveStep(f"d_lambda must be positive, got {d_lambda}")
    d = p._ou_delta(d_lambda, p._normals(p.dim * p.dim))
    p.current = p.current + d
    return NoiseIncrement(d, d / d_lambda)


def zero_noise(n: int) -> NoiseProcess:
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return NoiseProcess("none", n)
