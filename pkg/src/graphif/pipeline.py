"""Run configuration and the file-driven pipelines behind the command line."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import io
from .decomposers import NU_DEFAULT, auto_gft_cutoff, db_if, fif_1d, gft_if
from .distances import circular_distance_matrix, euclidean_distance_matrix, shortest_path_matrix
from .errors import DataIOError, InvalidInputError
from .experiments import (
    plane_b0,
    plane_b1,
    random_angles,
    random_plane_points,
    ring_b0,
    ring_b1,
)
from .graph import Graph, build_delaunay_graph, build_ring_graph, count_extrema, laplacian
from .sifting import DecompositionResult, StoppingRule
from .spectral import eigendecompose, gft, hann_spectral_kernel

__all__ = [
    "RunConfig",
    "Problem",
    "generate_example",
    "ingest",
    "load_problem",
    "run_decompose",
    "run_spectrum",
]

TWO_PI = 2.0 * math.pi
METHODS = ("gft_if", "db_if", "fif")


@dataclass
class RunConfig:
    """Everything needed to reproduce a decomposition run from input files."""

    method: str = "db_if"
    graph: str = "ring"
    bundle: str | None = None
    points: str | None = None
    signal: str | None = None
    edges: str | None = None
    neighbors_per_side: int = 2
    nu: float = NU_DEFAULT
    cutoff: list[float] | str = "auto"
    mode: str = "row_stochastic"
    stopping: dict = field(default_factory=lambda: StoppingRule().to_dict())
    max_imfs: int = 10
    distance: str = "embedding"
    distance_file: str | None = None
    edge_length: str = "inverse_weight"
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.graph not in ("ring", "delaunay", "edges"):
            raise InvalidInputError(f"unknown graph kind {self.graph!r}")
        if isinstance(self.cutoff, str):
            if self.cutoff != "auto":
                raise InvalidInputError(f"cutoff must be 'auto' or numbers, got {self.cutoff!r}")
        else:
            self.cutoff = [float(c) for c in np.atleast_1d(self.cutoff)]
            if any(not c > 0 for c in self.cutoff):
                raise InvalidInputError(f"kernel cutoffs must be positive, got {self.cutoff}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidInputError("seed must be an unsigned 64-bit integer")
        self.rule()

    def rule(self) -> StoppingRule:
        return StoppingRule(**self.stopping)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataIOError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_json(text)


@dataclass
class Problem:
    """A signal bound to a graph, vertex order shared by both."""

    graph: Graph
    signal: np.ndarray
    ids: np.ndarray
    kind: str
    equispaced: bool = False


def generate_example(example: int, n: int, seed: int, out_dir) -> dict[str, Path]:
    """Write points, signal and ground-truth component files for example 1 or 2.

    Example 1 also gets an ``equispaced/`` copy sampled on a regular grid, for
    the FIF baseline.
    """
    if n < 8:
        raise InvalidInputError(f"n must be at least 8, got {n}")
    rng = np.random.default_rng(seed)
    out = Path(out_dir)
    ids = np.arange(n)
    written = {}

    def emit(folder, coords, b0, b1):
        paths = {
            "points": folder / "points.csv",
            "signal": folder / "signal.csv",
            "b0": folder / "b0.csv",
            "b1": folder / "b1.csv",
        }
        io.write_points(paths["points"], ids, coords)
        io.write_signal(paths["signal"], ids, b0 + b1)
        io.write_signal(paths["b0"], ids, b0)
        io.write_signal(paths["b1"], ids, b1)
        return paths

    if example == 1:
        theta = random_angles(n, rng)
        written.update(emit(out, theta, ring_b0(theta), ring_b1(theta)))
        grid = ids * TWO_PI / n
        eq = emit(out / "equispaced", grid, ring_b0(grid), ring_b1(grid))
        written.update({f"equispaced_{k}": v for k, v in eq.items()})
    elif example == 2:
        p = random_plane_points(n, rng)
        written.update(emit(out, p, plane_b0(p[:, 0], p[:, 1]), plane_b1(p[:, 0], p[:, 1])))
    else:
        raise InvalidInputError(f"example must be 1 or 2, got {example}")
    return written


def _ring_angles(x: np.ndarray) -> tuple[np.ndarray, dict | None]:
    """Use 1D coordinates as angles, rescaling them onto the circle when needed.

    Rescaled samples span ``2 pi * (n - 1) / n`` so that the wrap-around gap
    equals the mean sample spacing.
    """
    if x.min() >= 0 and x.max() < TWO_PI:
        return x, None
    n = len(x)
    t0 = float(x.min())
    period = float(x.max() - t0) * n / (n - 1)
    if not period > 0:
        raise InvalidInputError("1D coordinates are all equal")
    return (x - t0) * (TWO_PI / period), {"origin": t0, "period": period}


def _is_equispaced(x: np.ndarray) -> bool:
    if len(x) < 3:
        return True
    d = np.diff(x)
    return bool(np.all(d > 0) and np.ptp(d) <= 1e-9 * max(abs(float(x[-1] - x[0])), 1e-300))


def _build(kind: str, coords: np.ndarray, neighbors: int):
    """Build a graph from coordinates; returns the graph and the vertex permutation."""
    if kind == "ring":
        if coords.ndim != 1:
            raise InvalidInputError("a ring graph needs 1D coordinates")
        order = np.argsort(coords, kind="stable")
        angles, mapping = _ring_angles(coords[order])
        return build_ring_graph(angles, neighbors), order, mapping
    if kind == "delaunay":
        if coords.ndim != 2:
            raise InvalidInputError("a Delaunay graph needs 2D coordinates")
        return build_delaunay_graph(coords), np.arange(len(coords)), None
    raise InvalidInputError(f"cannot build a {kind!r} graph from coordinates")


def ingest(points_csv, signal_csv, graph: str, out_dir, neighbors_per_side: int = 2) -> Path:
    """Bind a signal to points, build the graph and write a run-ready bundle directory."""
    pid, coords = io.read_points(points_csv)
    sid, values = io.read_signal(signal_csv)
    values = io.bind_signal(pid, sid, values)
    g, order, mapping = _build(graph, coords, neighbors_per_side)
    out = Path(out_dir)
    io.write_points(out / "points.csv", pid[order], g.embedding)
    io.write_signal(out / "signal.csv", pid[order], values[order])
    io.write_edges(out / "edges.csv", g)
    io.write_json(
        out / "bundle.json",
        {
            "graph": graph,
            "n": g.n,
            "num_edges": g.num_edges,
            "connected": g.connected,
            "neighbors_per_side": neighbors_per_side if graph == "ring" else None,
            "angle_map": mapping,
            "equispaced": bool(coords.ndim == 1 and _is_equispaced(np.sort(coords))),
            "source": {"points": str(points_csv), "signal": str(signal_csv)},
        },
    )
    return out


def _load_bundle(path) -> Problem:
    folder = Path(path)
    try:
        meta = json.loads((folder / "bundle.json").read_text())
    except OSError as exc:
        raise DataIOError(f"cannot read bundle {folder}: {exc.strerror}") from None
    pid, coords = io.read_points(folder / "points.csv")
    sid, values = io.read_signal(folder / "signal.csv")
    values = io.bind_signal(pid, sid, values)
    g0 = io.read_edges(folder / "edges.csv", n=len(pid))
    g = Graph(g0.n, g0.edges, g0.weights, embedding=coords)
    return Problem(g, values, pid, meta["graph"], bool(meta.get("equispaced", False)))


def load_problem(cfg: RunConfig) -> Problem:
    if cfg.bundle:
        return _load_bundle(cfg.bundle)
    if not cfg.signal:
        raise InvalidInputError("config needs a bundle or a signal file")
    sid, values = io.read_signal(cfg.signal)
    if cfg.graph == "edges":
        if not cfg.edges:
            raise InvalidInputError("graph 'edges' needs an edge-list file")
        order = np.argsort(sid)
        g = io.read_edges(cfg.edges, n=len(sid))
        if not np.array_equal(sid[order], np.arange(len(sid))):
            raise InvalidInputError("edge-list graphs need signal ids 0..n-1")
        coords = None
        if cfg.points:
            pid, coords = io.read_points(cfg.points)
            coords = coords[np.argsort(pid)]
            g = Graph(g.n, g.edges, g.weights, embedding=coords)
        return Problem(g, values[order], sid[order], "edges")
    if not cfg.points:
        if cfg.method == "fif":
            order = np.argsort(sid)
            n = len(sid)
            g = build_ring_graph(np.arange(n) * TWO_PI / n, 1)
            return Problem(g, values[order], sid[order], "ring", equispaced=True)
        raise InvalidInputError(f"graph {cfg.graph!r} needs a points file")
    pid, coords = io.read_points(cfg.points)
    values = io.bind_signal(pid, sid, values)
    g, order, _ = _build(cfg.graph, coords, cfg.neighbors_per_side)
    equi = coords.ndim == 1 and _is_equispaced(coords[order])
    return Problem(g, values[order], pid[order], cfg.graph, equispaced=equi)


def _distance_matrix(cfg: RunConfig, prob: Problem) -> np.ndarray:
    if cfg.distance_file:
        C = io.read_distance_matrix(cfg.distance_file)
        if C.shape != (prob.graph.n, prob.graph.n):
            raise InvalidInputError(f"distance matrix is {C.shape}, graph has {prob.graph.n} vertices")
        return C
    if cfg.distance == "embedding":
        emb = prob.graph.embedding
        if emb is None:
            raise InvalidInputError("graph has no embedding; choose a shortest-path distance")
        return circular_distance_matrix(emb) if emb.ndim == 1 else euclidean_distance_matrix(emb)
    if cfg.distance in ("dijkstra", "floyd_warshall"):
        return shortest_path_matrix(prob.graph, cfg.distance, cfg.edge_length)
    raise InvalidInputError(f"unknown distance {cfg.distance!r}")


def decompose_problem(cfg: RunConfig, prob: Problem) -> DecompositionResult:
    rule = cfg.rule()
    if cfg.method == "fif":
        if not prob.equispaced:
            raise InvalidInputError(
                "FIF needs equispaced samples; use gft_if or db_if for non-uniformly sampled data"
            )
        return fif_1d(prob.signal, cfg.nu, rule, cfg.max_imfs)
    if cfg.method == "db_if":
        C = _distance_matrix(cfg, prob)
        return db_if(prob.graph, C, prob.signal, cfg.nu, rule, cfg.max_imfs, cfg.mode)
    return gft_if(prob.graph, prob.signal, cfg.cutoff, rule, cfg.max_imfs)


def run_decompose(cfg: RunConfig) -> tuple[DecompositionResult, Path]:
    """Run the configured method and write ``imfs.csv``/``imfs.json`` (plus spectra for GFT-IF)."""
    prob = load_problem(cfg)
    result = decompose_problem(cfg, prob)
    out = Path(cfg.out)
    io.write_decomposition(out, result, prob.ids, extra={"config": cfg.to_dict()})
    if cfg.method == "gft_if":
        io.write_imf_spectra(out, result)
    return result, out


def run_spectrum(cfg: RunConfig) -> Path:
    """Write ``spectrum.csv`` with the signal's GFT and the configured Hann kernel."""
    prob = load_problem(cfg)
    basis = eigendecompose(laplacian(prob.graph))
    if cfg.cutoff == "auto":
        l = auto_gft_cutoff(basis, max(count_extrema(prob.graph, prob.signal), 2))
    else:
        l = cfg.cutoff[0]
    kernel = hann_spectral_kernel(basis, l)
    path = Path(cfg.out) / "spectrum.csv"
    io.write_spectrum(path, basis.eigenvalues, gft(basis, prob.signal), kernel.values)
    return path
