"""Synthetic test signals, the timing harness and the sifting-limit check."""

from __future__ import annotations

import math
import platform
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .decomposers import db_if, fif_1d, gft_if
from .distances import circular_distance_matrix
from .errors import DivergenceError, NonConvergenceError
from .graph import build_ring_graph, laplacian
from .sifting import StoppingRule, sift, sifting_limit
from .spectral import eigendecompose

__all__ = [
    "ring_b0",
    "ring_b1",
    "plane_b0",
    "plane_b1",
    "random_angles",
    "random_plane_points",
    "random_symmetric_operator",
    "BenchmarkRow",
    "BenchmarkReport",
    "run_benchmark",
    "limit_check",
]

TWO_PI = 2.0 * math.pi


def ring_b0(x):
    """Fast chirp of the 1D example."""
    x = np.asarray(x, dtype=float)
    return 0.5 * np.sin((30.0 - 5.0 / TWO_PI * x) * x + 1.0)


def ring_b1(x):
    """Slow chirp of the 1D example."""
    x = np.asarray(x, dtype=float)
    return np.sin((2.0 + 2.0 / TWO_PI * x) * x - 1.5)


def plane_b0(x, y):
    return 0.5 * np.sin(5.0 * np.asarray(x) + 5.0 * np.asarray(y))


def plane_b1(x, y):
    return np.cos(np.asarray(x) - np.asarray(y))


def random_angles(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` sorted, distinct uniform angles in [0, 2 pi)."""
    while True:
        theta = np.sort(rng.uniform(0.0, TWO_PI, n))
        if np.all(np.diff(theta) > 0):
            return theta


def random_plane_points(n: int, rng: np.random.Generator, side: float = TWO_PI) -> np.ndarray:
    while True:
        p = rng.uniform(0.0, side, (n, 2))
        if len(np.unique(p, axis=0)) == n:
            return p


def random_symmetric_operator(
    n: int,
    rng: np.random.Generator,
    high: float = 1.9,
    low: float = 0.01,
    zero_fraction: float = 0.25,
) -> tuple[np.ndarray, np.ndarray]:
    """Random symmetric matrix with a prescribed spectrum in ``{0} U [low, high]``.

    Exact zeros exercise the modes that survive sifting; ``low`` keeps every
    other mode far enough from zero to be resolved by a finite iteration.
    """
    lam = rng.uniform(low, high, n)
    lam[rng.random(n) < zero_fraction] = 0.0
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * lam) @ Q.T, lam


def limit_check(
    trials: int = 100,
    n: int = 8,
    seed: int = 0,
    iterations: int = 10_000,
    high: float = 1.9,
) -> dict:
    """Compare long sifting runs with the closed-form limit on random operators.

    Also runs one operator with an eigenvalue of 2.1 (must diverge) and the
    zero operator (limit must equal the input exactly).
    """
    rng = np.random.default_rng(seed)
    rule = StoppingRule.fixed(iterations)
    errors = []
    for _ in range(trials):
        W, _lam = random_symmetric_operator(n, rng, high=high)
        s0 = rng.standard_normal(n)
        it, _ = sift(lambda x, W=W: W @ x, s0, rule)
        lim = sifting_limit(W, s0)
        errors.append(float(np.linalg.norm(it - lim) / np.linalg.norm(s0)))

    W_bad, _ = random_symmetric_operator(n, rng, high=high, zero_fraction=0.0)
    lam, Q = np.linalg.eigh(W_bad)
    lam[-1] = 2.1
    W_bad = (Q * lam) @ Q.T
    s0 = rng.standard_normal(n)
    divergence = False
    try:
        sift(lambda x: W_bad @ x, s0, rule)
    except DivergenceError:
        divergence = True
    limit_rejects = False
    try:
        sifting_limit(W_bad, s0)
    except NonConvergenceError:
        limit_rejects = True

    s0 = rng.standard_normal(n)
    zero_exact = bool(np.array_equal(sifting_limit(np.zeros((n, n)), s0), s0))
    return {
        "trials": trials,
        "n": n,
        "seed": seed,
        "iterations": iterations,
        "max_relative_error": max(errors) if errors else 0.0,
        "errors": errors,
        "violation_divergence_detected": divergence,
        "violation_limit_rejected": limit_rejects,
        "zero_operator_exact": zero_exact,
    }


@dataclass
class BenchmarkRow:
    n: int
    method: str
    precompute_seconds: float | None
    run_seconds: float | None
    status: str = "ok"
    detail: str = ""


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)
    environment: str = ""
    iterations: int = 10
    imfs: int = 10

    def get(self, n: int, method: str) -> BenchmarkRow:
        return next(r for r in self.rows if r.n == n and r.method == method)

    def to_dict(self) -> dict:
        return {
            "environment": self.environment,
            "iterations": self.iterations,
            "imfs": self.imfs,
            "rows": [asdict(r) for r in self.rows],
        }


def _environment() -> str:
    return f"{platform.processor() or platform.machine()}; {platform.platform()}; python {platform.python_version()}"


def _timed(fn):
    t0 = time.process_time()
    out = fn()
    return time.process_time() - t0, out


def run_benchmark(
    sizes=(128, 512, 2048),
    methods=("gft_if", "db_if", "fif"),
    iterations: int = 10,
    imfs: int = 10,
    seed: int = 0,
    dense: bool = True,
    warmup: bool = True,
) -> BenchmarkReport:
    """CPU time of precomputation and of a fixed-size decomposition run.

    Each (n, method) cell runs sequentially: an optional discarded warm-up,
    then the timed precomputation (eigendecomposition for GFT-IF, distance
    matrix for DB-IF, nothing for FIF) and the timed run with ``iterations``
    sifting steps and exactly ``imfs`` IMFs.
    """
    if list(sizes) != sorted(sizes):
        raise ValueError("benchmark sizes must be ascending")
    rule = StoppingRule.fixed(iterations)
    report = BenchmarkReport(environment=_environment(), iterations=iterations, imfs=imfs)
    rng = np.random.default_rng(seed)
    for n in sizes:
        theta = random_angles(n, rng)
        g = build_ring_graph(theta, 2)
        s = ring_b0(theta) + ring_b1(theta)
        grid = np.arange(n) * TWO_PI / n
        s_eq = ring_b0(grid) + ring_b1(grid)
        for method in methods:
            if method == "gft_if":
                pre = lambda: eigendecompose(laplacian(g))  # noqa: E731
                run = lambda basis: gft_if(  # noqa: E731
                    g, s, "auto", rule, imfs, basis=basis, force_imfs=True
                )
            elif method == "db_if":
                pre = lambda: circular_distance_matrix(theta)  # noqa: E731
                run = lambda C: db_if(  # noqa: E731
                    g, C, s, rule=rule, max_imfs=imfs, sparse=False if dense else None, force_imfs=True
                )
            elif method == "fif":
                pre = None
                run = lambda _: fif_1d(s_eq, rule=rule, max_imfs=imfs, force_imfs=True)  # noqa: E731
            else:
                raise ValueError(f"unknown method {method!r}")
            try:
                if warmup:
                    run(pre() if pre else None)
                t_pre, data = _timed(pre) if pre else (0.0, None)
                t_run, _ = _timed(lambda: run(data))
                report.rows.append(BenchmarkRow(n, method, t_pre, t_run))
            except MemoryError as exc:
                report.rows.append(BenchmarkRow(n, method, None, None, "failed", f"out of memory: {exc}"))
    return report
