"""Generic discrete iterative filtering: the sifting loop, the outer IMF loop and
the closed-form limit of the sifting iteration for normal operators."""

from __future__ import annotations

import hashlib
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import (
    DivergenceError,
    GraphIFError,
    HypothesisViolationError,
    InvalidInputError,
    NonConvergenceError,
)
from .graph import Graph, as_signal, count_extrema

__all__ = [
    "AveragingOperator",
    "MatrixOperator",
    "DiagonalOperator",
    "StoppingRule",
    "IMFMeta",
    "DecompositionResult",
    "sift",
    "decompose",
    "extract_imfs",
    "sifting_limit",
    "checksum",
]

DIVERGENCE_FACTOR = 1e6


class AveragingOperator:
    """Linear moving-average operator ``s -> W s``.

    Subclasses implement :meth:`apply` and fill :attr:`descriptor` with the
    parameters that produced them (kind, window length or cutoff, ...).
    """

    descriptor: dict

    def apply(self, s: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, s):
        return self.apply(s)


class MatrixOperator(AveragingOperator):
    """Explicit (dense or sparse) matrix."""

    def __init__(self, W, descriptor: dict | None = None):
        self.W = W if sp.issparse(W) else np.asarray(W)
        if self.W.ndim != 2 or self.W.shape[0] != self.W.shape[1]:
            raise InvalidInputError(f"operator must be square, got shape {self.W.shape}")
        self.descriptor = descriptor or {"kind": "matrix"}

    def apply(self, s):
        return self.W @ s


class DiagonalOperator(AveragingOperator):
    """Pointwise multiplication, i.e. a filter acting on transform coefficients."""

    def __init__(self, weights, descriptor: dict | None = None):
        self.weights = np.asarray(weights)
        self.descriptor = descriptor or {"kind": "diagonal"}

    def apply(self, s):
        return self.weights * s


@dataclass(frozen=True)
class StoppingRule:
    """When to stop the sifting loop.

    ``relative_change`` stops once ``||s_{m+1} - s_m|| <= delta ||s_m||`` (or the
    iterate vanishes); ``fixed_iterations`` always runs ``max_iterations`` steps.
    """

    mode: str = "relative_change"
    max_iterations: int = 200
    delta: float = 1e-3

    def __post_init__(self):
        if self.mode not in ("relative_change", "fixed_iterations"):
            raise InvalidInputError(f"unknown stopping mode {self.mode!r}")
        if int(self.max_iterations) < 1:
            raise InvalidInputError("max_iterations must be at least 1")
        if self.mode == "relative_change" and not self.delta > 0:
            raise InvalidInputError("delta must be positive")

    @classmethod
    def fixed(cls, iterations: int = 10) -> "StoppingRule":
        return cls("fixed_iterations", iterations)

    def to_dict(self) -> dict:
        return asdict(self)


def sift(
    op: AveragingOperator | Callable,
    s0,
    rule: StoppingRule = StoppingRule(),
    norm: Callable = np.linalg.norm,
) -> tuple[np.ndarray, int]:
    """Run ``s_{m+1} = s_m - W s_m`` until ``rule`` fires.

    Returns the last iterate and the number of steps taken. Works on real
    vertex-domain signals as well as complex transform coefficients.

    Raises
    ------
    DivergenceError
        If the iterate becomes non-finite or grows beyond ``1e6 * ||s0||``,
        which means the operator violates the convergence hypotheses.
    """
    apply = op.apply if isinstance(op, AveragingOperator) else op
    s = np.array(s0, copy=True)
    if s.dtype.kind not in "fc":
        s = s.astype(float)
    bound = DIVERGENCE_FACTOR * norm(s)

    def check(m, x):
        nx = norm(x)
        if not np.isfinite(nx) or (bound > 0 and nx > bound):
            raise DivergenceError(
                f"sifting diverged at iteration {m}: norm grew to {nx:.3e} "
                f"(limit {bound:.3e})"
            )
        return nx

    if rule.mode == "fixed_iterations":
        m_max = int(rule.max_iterations)
        for m in range(1, m_max + 1):
            s = s - apply(s)
            if m % 16 == 0 or m == m_max:
                check(m, s)
        return s, m_max

    norm_s = norm(s)
    for m in range(1, int(rule.max_iterations) + 1):
        ws = apply(s)
        s = s - ws
        norm_new = check(m, s)
        if norm_new == 0 or norm(ws) <= rule.delta * norm_s:
            return s, m
        norm_s = norm_new
    return s, int(rule.max_iterations)


@dataclass
class IMFMeta:
    iterations: int
    descriptor: dict
    seconds: float
    extrema: int

    def to_dict(self) -> dict:
        return asdict(self)


def checksum(s) -> str:
    return hashlib.sha256(np.ascontiguousarray(s, dtype="<f8").tobytes()).hexdigest()


@dataclass
class DecompositionResult:
    """IMFs in extraction order plus the final residual."""

    imfs: list[np.ndarray]
    residual: np.ndarray
    meta: list[IMFMeta] = field(default_factory=list)
    input_checksum: str = ""
    method: str = ""
    info: dict = field(default_factory=dict)

    @property
    def components(self) -> list[np.ndarray]:
        return [*self.imfs, self.residual]

    def reconstruct(self) -> np.ndarray:
        return np.sum(self.components, axis=0)

    def as_array(self) -> np.ndarray:
        """Shape (n, K + 1): one column per IMF and the residual last."""
        return np.column_stack(self.components)


def extract_imfs(
    s: np.ndarray,
    count: Callable[[np.ndarray], int],
    extract: Callable[[np.ndarray, int, int], tuple[np.ndarray, int, dict]],
    max_imfs: int = 10,
    force_imfs: bool = False,
    method: str = "",
) -> DecompositionResult:
    """Outer loop shared by every decomposer.

    ``extract(residual, extrema, index)`` returns ``(imf, iterations,
    descriptor)`` or ``None`` to stop early. The loop ends when the residual has fewer than two extrema
    or ``max_imfs`` IMFs are extracted; ``force_imfs`` ignores the extrema
    test and always extracts ``max_imfs`` (used for timing runs).
    """
    s = np.asarray(s, dtype=float)
    if int(max_imfs) < 1:
        raise InvalidInputError("max_imfs must be at least 1")
    residual = s.copy()
    imfs, meta = [], []
    while len(imfs) < max_imfs:
        k = count(residual)
        if k < 2:
            if not force_imfs:
                break
            k = 2
        t0 = time.perf_counter()
        try:
            out = extract(residual, k, len(imfs))
        except GraphIFError as exc:
            exc.args = (f"while extracting IMF {len(imfs)}: {exc}",)
            exc.imf_index = len(imfs)
            raise
        if out is None:
            break
        imf, iters, desc = out
        meta.append(IMFMeta(int(iters), desc, time.perf_counter() - t0, int(k)))
        imfs.append(imf)
        residual = residual - imf
    return DecompositionResult(imfs, residual, meta, checksum(s), method)


def decompose(
    operator_factory: Callable[[np.ndarray, int], AveragingOperator],
    s,
    g: Graph,
    rule: StoppingRule = StoppingRule(),
    max_imfs: int = 10,
    force_imfs: bool = False,
) -> DecompositionResult:
    """Iterative filtering with an operator rebuilt once per IMF from the residual."""
    s = as_signal(g, s)

    def extract(residual, k, _index):
        op = operator_factory(residual, k)
        imf, iters = sift(op, residual, rule)
        return imf, iters, dict(getattr(op, "descriptor", {}))

    return extract_imfs(
        s, lambda r: count_extrema(g, r), extract, max_imfs, force_imfs, method="generic"
    )


def _limit_tol(eigvals, zero_tol):
    if zero_tol is not None:
        return float(zero_tol)
    rho = float(np.max(np.abs(eigvals))) if len(eigvals) else 0.0
    return 1e-12 * max(1.0, rho)


def sifting_limit(W, s0, zero_tol: float | None = None) -> np.ndarray:
    """Limit of ``s_{m+1} = (I - W) s_m`` for a normal operator ``W``.

    Projects ``s0`` onto the null space of ``W`` along its eigenvectors. The
    default zero tolerance is ``1e-12 * max(1, spectral radius)``.

    Raises
    ------
    HypothesisViolationError
        If ``W`` is not normal.
    NonConvergenceError
        If some eigenvalue is neither zero nor inside the disc ``|1 - z| < 1``.
    """
    if sp.issparse(W):
        W = W.toarray()
    W = np.asarray(W, dtype=float)
    s0 = np.asarray(s0, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] != s0.shape[0]:
        raise InvalidInputError("operator and signal dimensions do not match")
    scale = max(1.0, float(np.max(np.abs(W))) ** 2) if W.size else 1.0
    if np.max(np.abs(W @ W.T - W.T @ W), initial=0.0) > 1e-8 * scale:
        raise HypothesisViolationError("operator is not normal; the sifting limit is not characterised")
    if np.max(np.abs(W - W.T), initial=0.0) <= 1e-12 * scale:
        lam, Q = np.linalg.eigh((W + W.T) / 2)
    else:
        T, Q = scipy.linalg.schur(W, output="complex")
        lam = np.diag(T)
    tol = _limit_tol(lam, zero_tol)
    is_zero = np.abs(lam) <= tol
    ok = is_zero | (np.abs(1.0 - lam) < 1.0)
    if not ok.all():
        bad = lam[~ok][0]
        raise NonConvergenceError(
            f"eigenvalue {bad!r} violates |1 - lambda| < 1; the sifting loop does not converge"
        )
    out = Q @ (is_zero * (Q.conj().T @ s0))
    return out.real if np.iscomplexobj(out) else out
