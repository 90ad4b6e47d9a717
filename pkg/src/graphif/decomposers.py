"""Concrete decomposers: distance-based IF, graph-Fourier IF and classical 1D FIF."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import (
    InvalidInputError,
    NumericFailureError,
    OuterLoopTerminal,
    WindowDegenerateError,
    WindowSupportError,
)
from .graph import Graph, as_signal, count_extrema, laplacian
from .sifting import (
    AveragingOperator,
    DecompositionResult,
    DiagonalOperator,
    StoppingRule,
    extract_imfs,
    sift,
)
from .spectral import (
    SpectralBasis,
    SpectralKernel,
    eigendecompose,
    gft,
    hann,
    hann_spectral_kernel,
    igft,
)

__all__ = [
    "NU_DEFAULT",
    "WindowOperator",
    "FifKernel",
    "db_window_length",
    "fif_window_length",
    "build_window_operator",
    "sinkhorn_symmetric",
    "db_if",
    "domain_extent",
    "gft_if",
    "auto_gft_cutoff",
    "fif_kernel",
    "fif_1d",
    "count_extrema_1d",
]

NU_DEFAULT = 1.6
SPARSE_DENSITY = 0.25


def db_window_length(
    extent: float, extrema_count: int, nu: float = NU_DEFAULT, dim: int = 1
) -> float:
    """Window length ``2 nu extent / k`` for a signal with ``k`` extrema.

    In ``dim`` dimensions the extrema fill a volume, so the typical spacing
    between them is ``extent / k ** (1 / dim)`` and that replaces ``extent / k``.
    """
    if extrema_count < 2:
        raise OuterLoopTerminal(f"{extrema_count} extrema: no window needed")
    if not extent > 0 or not nu > 0:
        raise InvalidInputError("extent and nu must be positive")
    return 2.0 * nu * extent / extrema_count ** (1.0 / dim)


def fif_window_length(n: int, extrema_count: int, nu: float = NU_DEFAULT) -> int:
    """Discrete FIF rule ``2 floor(nu n / k)``."""
    if extrema_count < 2:
        raise OuterLoopTerminal(f"{extrema_count} extrema: no window needed")
    return 2 * int(math.floor(nu * n / extrema_count))


class WindowOperator(AveragingOperator):
    """Averaging operator ``W = B B`` built from windowed distances.

    ``B`` is kept either dense or as a CSR matrix; ``W`` is never formed,
    :meth:`apply` multiplies by ``B`` twice.
    """

    def __init__(self, base, window_length: float, mode: str, descriptor: dict | None = None):
        self.base = base
        self.window_length = float(window_length)
        self.mode = mode
        self.sparse = sp.issparse(base)
        self.descriptor = descriptor or {
            "kind": "window",
            "window_length": self.window_length,
            "mode": mode,
            "sparse": self.sparse,
        }

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def apply(self, s):
        return self.base @ (self.base @ s)

    def dense_base(self) -> np.ndarray:
        return self.base.toarray() if self.sparse else np.asarray(self.base)

    def dense(self) -> np.ndarray:
        """Explicit ``W``, for analysis only."""
        B = self.dense_base()
        return B @ B


def sinkhorn_symmetric(K, tol: float = 1e-12, max_sweeps: int = 10_000):
    """Scale a symmetric non-negative matrix to a symmetric doubly stochastic one.

    Each sweep performs a row normalisation followed by a column
    normalisation and keeps the geometric mean of the two scalings, which
    removes the period-two oscillation of plain alternating normalisation on
    symmetric input. Returns ``(B, sweeps)`` with ``B = diag(x) K diag(x)``.
    """
    x = np.ones(K.shape[0])
    dev = np.inf
    for sweep in range(1, max_sweeps + 1):
        r = 1.0 / (K @ x)
        c = 1.0 / (K @ r)
        x = np.sqrt(r * c)
        dev = np.max(np.abs(x * (K @ x) - 1.0))
        if dev <= tol:
            break
    else:
        raise NumericFailureError(
            f"doubly stochastic scaling did not converge in {max_sweeps} sweeps (deviation {dev:.3e})"
        )
    if sp.issparse(K):
        B = (sp.diags_array(x) @ K @ sp.diags_array(x)).tocsr()
    else:
        B = x[:, None] * K * x[None, :]
    return (B + B.T) / 2, sweep


def build_window_operator(
    C,
    window_length: float,
    mode: str = "row_stochastic",
    sparse: bool | None = None,
    window: Callable = hann,
) -> WindowOperator:
    """Base window matrix ``B[i, j] = w(C[i, j] / l)`` normalised per ``mode``.

    ``row_stochastic`` divides every row by its sum. ``symmetrized`` rescales
    the kernel to a symmetric doubly stochastic matrix, so that ``W = B B`` is
    symmetric positive semi-definite with spectrum in [0, 1].

    ``sparse=None`` stores ``B`` in CSR form when at most a quarter of its
    entries are non-zero.
    """
    C = np.asarray(C, dtype=float)
    l = float(window_length)
    if not l > 0 or not np.isfinite(l):
        raise InvalidInputError(f"window length must be positive, got {window_length}")
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidInputError(f"distance matrix must be square, got shape {C.shape}")
    if mode not in ("row_stochastic", "symmetrized"):
        raise InvalidInputError(f"unknown window mode {mode!r}")
    K = window(C / l)
    sums = K.sum(axis=1)
    if np.any(sums <= 0):
        v = int(np.flatnonzero(sums <= 0)[0])
        raise WindowSupportError(f"window of length {l:.6g} is empty around vertex {v}")
    if sparse is None:
        sparse = np.count_nonzero(K) <= SPARSE_DENSITY * K.size
    if mode == "row_stochastic":
        B = K / sums[:, None]
        if sparse:
            B = sp.csr_array(B)
        extra = {}
    else:
        if np.max(np.abs(K - K.T)) > 1e-12:
            raise InvalidInputError("symmetrized mode needs a symmetric distance matrix")
        B, sweeps = sinkhorn_symmetric(sp.csr_array(K) if sparse else K)
        extra = {"sinkhorn_sweeps": sweeps}
    op = WindowOperator(B, l, mode)
    op.descriptor.update(extra)
    return op


def domain_extent(g: Graph) -> tuple[float, int]:
    """Extent and dimension used by the window rule.

    Angles on the circle span ``2 pi``; planar embeddings use the square root
    of the bounding-box area.
    """
    emb = g.embedding
    if emb is None:
        raise InvalidInputError("graph has no embedding; pass extent explicitly")
    if emb.ndim == 1 or emb.shape[1] == 1:
        return 2.0 * math.pi, 1
    span = emb.max(axis=0) - emb.min(axis=0)
    return float(np.prod(span) ** (1.0 / emb.shape[1])), emb.shape[1]


def db_if(
    g: Graph,
    C,
    s,
    nu: float = NU_DEFAULT,
    rule: StoppingRule = StoppingRule(),
    max_imfs: int = 10,
    mode: str = "row_stochastic",
    extent: float | None = None,
    sparse: bool | None = None,
    force_imfs: bool = False,
    dim: int | None = None,
) -> DecompositionResult:
    """Distance-based iterative filtering.

    For every IMF the window length follows from the extrema count of the
    current residual, ``B`` is rebuilt from ``C`` and the residual is sifted
    with ``W = B B``. Without an explicit ``extent`` it is taken from the
    graph embedding (or the largest distance when there is none).
    """
    s = as_signal(g, s)
    C = np.asarray(C, dtype=float)
    if C.shape != (g.n, g.n):
        raise InvalidInputError(f"distance matrix shape {C.shape} does not match n={g.n}")
    if extent is None:
        if g.embedding is not None:
            extent, dim = domain_extent(g)
        else:
            extent, dim = float(C.max()), 0
    elif dim is None:
        dim = 1
    # anything but the interval rule is a heuristic of this package
    experimental = dim != 1

    def extract(residual, k, _index):
        l = db_window_length(extent, k, nu, max(dim, 1))
        op = build_window_operator(C, l, mode, sparse=sparse)
        imf, iters = sift(op, residual, rule)
        desc = {
            "method": "db_if",
            **op.descriptor,
            "nu": nu,
            "extent": extent,
            "dim": dim,
            "experimental": experimental,
        }
        return imf, iters, desc

    return extract_imfs(
        s, lambda r: count_extrema(g, r), extract, max_imfs, force_imfs, method="db_if"
    )


def auto_gft_cutoff(basis: SpectralBasis, extrema_count: int) -> float:
    """Heuristic cutoff: the eigenvalue at index ``k`` (clamped to the spectrum).

    On a ring, frequency ``f`` sits near eigenvalue index ``2 f`` and ``k``
    extrema correspond to about ``k / 2`` periods.
    """
    if extrema_count < 2:
        raise OuterLoopTerminal(f"{extrema_count} extrema: no kernel needed")
    idx = min(basis.n - 1, max(1, int(extrema_count)))
    return float(basis.eigenvalues[idx])


def gft_if(
    g: Graph,
    s,
    cutoff: float | Sequence[float] | str = "auto",
    rule: StoppingRule = StoppingRule(),
    max_imfs: int = 10,
    basis: SpectralBasis | None = None,
    kernel: Callable[[SpectralBasis, float], SpectralKernel] = hann_spectral_kernel,
    force_imfs: bool = False,
) -> DecompositionResult:
    """Graph Fourier transform iterative filtering.

    ``cutoff`` is either ``"auto"`` or a schedule of kernel cutoffs, one per
    IMF (a single number is a one-entry schedule); extraction stops when the
    schedule runs out. Sifting runs on spectral coefficients and each IMF is
    transformed back once. The kernel and IMF spectrum of every extraction are
    kept in ``result.info["spectra"]``.
    """
    s = as_signal(g, s)
    if basis is None:
        basis = eigendecompose(laplacian(g))
    if basis.n != g.n:
        raise InvalidInputError("spectral basis does not match the graph")
    if isinstance(cutoff, str):
        if cutoff != "auto":
            raise InvalidInputError(f"cutoff must be 'auto' or numeric, got {cutoff!r}")
        schedule = None
    else:
        schedule = [float(c) for c in np.atleast_1d(np.asarray(cutoff, dtype=float))]
        for c in schedule:
            if not c > 0:
                raise InvalidInputError(f"kernel cutoff must be positive, got {c}")
    spectra = []

    def extract(residual, k, index):
        if schedule is None:
            l, experimental = auto_gft_cutoff(basis, k), True
        elif index < len(schedule):
            l, experimental = schedule[index], False
        else:
            return None
        w = kernel(basis, l)
        s_hat, iters = sift(DiagonalOperator(w.values), gft(basis, residual), rule)
        spectra.append({"kernel": w.values, "imf": s_hat})
        desc = {
            "method": "gft_if",
            "kind": "spectral",
            "cutoff": l,
            "auto": schedule is None,
            "experimental": experimental,
        }
        return igft(basis, s_hat), iters, desc

    res = extract_imfs(
        s, lambda r: count_extrema(g, r), extract, max_imfs, force_imfs, method="gft_if"
    )
    res.info["eigenvalues"] = basis.eigenvalues
    res.info["spectra"] = spectra
    return res


@dataclass(frozen=True, eq=False)
class FifKernel:
    """Real-FFT kernel ``v_hat ** 2`` of a unit-sum Hann base window of half-width ``l``."""

    values: np.ndarray
    window_length: int
    base: np.ndarray


def fif_kernel(n: int, window_length: int, window: Callable = hann) -> FifKernel:
    l = int(window_length)
    if l < 1:
        raise WindowDegenerateError(f"window length {l} is degenerate")
    offsets = np.arange(-l, l + 1)
    v = window(offsets / l)
    v = v / v.sum()
    base = np.zeros(n)
    np.add.at(base, offsets % n, v)
    v_hat = np.fft.rfft(base).real
    return FifKernel(v_hat * v_hat, l, base)


def count_extrema_1d(values) -> int:
    """Strict interior maxima and minima of a sequence."""
    x = np.asarray(values, dtype=float)
    if len(x) < 3:
        return 0
    mid, left, right = x[1:-1], x[:-2], x[2:]
    return int(np.count_nonzero((mid > left) & (mid > right)) + np.count_nonzero((mid < left) & (mid < right)))


def fif_1d(
    values,
    nu: float = NU_DEFAULT,
    rule: StoppingRule = StoppingRule(),
    max_imfs: int = 10,
    force_imfs: bool = False,
) -> DecompositionResult:
    """Fast iterative filtering of an equispaced sequence, sifting on RFFT coefficients."""
    s = np.asarray(values, dtype=float).reshape(-1)
    n = len(s)
    if n < 3:
        raise InvalidInputError(f"need at least 3 samples, got {n}")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("signal contains non-finite values")
    # rfft coefficients other than DC and Nyquist stand for two conjugate bins
    weights = np.full(n // 2 + 1, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0

    def norm(x):
        return math.sqrt(float(np.sum(weights * np.abs(x) ** 2)))

    kernels = []

    def extract(residual, k, _index):
        l = fif_window_length(n, k, nu)
        if l < 1:
            raise WindowDegenerateError(
                f"window length rule gives 0 for n={n}, k={k}, nu={nu}"
            )
        w = fif_kernel(n, l)
        kernels.append(w.values)
        s_hat, iters = sift(DiagonalOperator(w.values), np.fft.rfft(residual), rule, norm=norm)
        desc = {"method": "fif", "kind": "fft", "window_length": l, "nu": nu}
        return np.fft.irfft(s_hat, n=n), iters, desc

    res = extract_imfs(s, count_extrema_1d, extract, max_imfs, force_imfs, method="fif")
    res.info["kernels"] = kernels
    return res
