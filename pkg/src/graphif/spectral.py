"""Laplacian eigenbasis, graph Fourier transform and spectral kernels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import HypothesisViolationError, InvalidInputError, NumericFailureError

__all__ = [
    "SpectralBasis",
    "SpectralKernel",
    "eigendecompose",
    "gft",
    "igft",
    "graph_convolve",
    "hann",
    "hann_spectral_kernel",
    "spectral_sifting_limit",
    "zero_threshold",
]

ZERO_REL = 1e-12


def hann(x):
    """Hann taper ``(1 + cos(pi x)) / 2`` on ``|x| < 1``, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, 0.5 * (1.0 + np.cos(np.pi * x)), 0.0)


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Ascending Laplacian eigenvalues and the matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def zero_modes(self) -> np.ndarray:
        lam = self.eigenvalues
        return np.abs(lam) <= zero_threshold(lam)


def zero_threshold(eigenvalues) -> float:
    lam = np.asarray(eigenvalues)
    top = float(lam[-1]) if lam.size else 0.0
    return ZERO_REL * max(1.0, top)


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """Per-eigenvalue filter values and the cutoff that generated them."""

    values: np.ndarray
    cutoff: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def eigendecompose(L) -> SpectralBasis:
    """Full symmetric eigendecomposition of a Laplacian.

    Eigenvalues are returned in ascending order (stable for ties) and each
    eigenvector is sign-normalised so that its largest-magnitude entry is
    positive, which makes the output reproducible across calls.
    """
    if sp.issparse(L):
        L = L.toarray()
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise InvalidInputError("matrix has non-finite entries")
    asym = np.max(np.abs(L - L.T)) if L.size else 0.0
    if asym > 1e-10:
        raise InvalidInputError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
    try:
        lam, U = _eigh_laplacian(L) if _has_zero_row_sums(L) else np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"eigensolver failed: {exc}") from exc
    order = np.argsort(lam, kind="stable")
    lam, U = lam[order], U[:, order]
    pivot = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivot, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U = U * signs
    lam.setflags(write=False)
    U.setflags(write=False)
    return SpectralBasis(lam, U)


def _has_zero_row_sums(L) -> bool:
    n = L.shape[0]
    return n > 1 and np.max(np.abs(L.sum(axis=1))) <= 1e-12 * n * max(1.0, np.max(np.abs(L)))


def _eigh_laplacian(L):
    """``eigh`` with the constant null vector split off exactly.

    A Householder reflection ``H`` maps ``1/sqrt(n)`` to ``e_0``; the trailing
    block of ``H L H`` holds the rest of the spectrum, so every other
    eigenvector is orthogonal to constants up to rounding of ``H`` alone.
    """
    n = L.shape[0]
    u = np.full(n, 1.0 / np.sqrt(n))
    u[0] -= 1.0
    u /= np.linalg.norm(u)
    LH = L - 2.0 * np.outer(L @ u, u)
    M = LH - 2.0 * np.outer(u, u @ LH)
    mu, V = np.linalg.eigh((M[1:, 1:] + M[1:, 1:].T) / 2)
    U = np.zeros((n, n))
    U[1:, 1:] = V
    U[0, 0] = 1.0
    U -= 2.0 * np.outer(u, u @ U)
    return np.concatenate([[0.0], mu]), U


def _check(basis: SpectralBasis, x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != basis.n:
        raise InvalidInputError(f"{name} has length {x.shape[0]}, basis has {basis.n} modes")
    return x


def gft(basis: SpectralBasis, s) -> np.ndarray:
    """Spectral coefficients ``U^T s``."""
    return basis.eigenvectors.T @ _check(basis, s, "signal")


def igft(basis: SpectralBasis, s_hat) -> np.ndarray:
    """Vertex-domain signal ``U s_hat``."""
    return basis.eigenvectors @ _check(basis, s_hat, "spectrum")


def graph_convolve(basis: SpectralBasis, s, v) -> np.ndarray:
    return igft(basis, gft(basis, s) * gft(basis, v))


def hann_spectral_kernel(basis: SpectralBasis, cutoff: float) -> SpectralKernel:
    """Low-pass kernel ``hann(lambda_i / cutoff)``; zero modes get exactly 1."""
    cutoff = float(cutoff)
    if not np.isfinite(cutoff) or cutoff <= 0:
        raise InvalidInputError(f"kernel cutoff must be positive, got {cutoff}")
    values = hann(basis.eigenvalues / cutoff)
    values[basis.zero_modes()] = 1.0
    return SpectralKernel(values, cutoff)


def spectral_sifting_limit(kernel: SpectralKernel, zero_tol: float = ZERO_REL) -> SpectralKernel:
    """Indicator of the modes the sifting iteration leaves untouched.

    Modes with a (numerically) zero kernel value are fixed points of
    ``s -> s - w * s``; every mode with a value in (0, 2) decays to zero.
    """
    w = kernel.values
    bad = (w < 0) | (w >= 2)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise HypothesisViolationError(
            f"kernel value {w[i]!r} at mode {i} lies outside [0, 2); sifting does not converge"
        )
    return SpectralKernel((w <= zero_tol).astype(float), kernel.cutoff)
