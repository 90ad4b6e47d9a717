"""Weighted undirected graphs, the experiment graph builders, Laplacian and extrema."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .delaunay import delaunay_triangles
from .errors import InvalidInputError, IsolatedVertexError

__all__ = [
    "Graph",
    "DisconnectedGraphWarning",
    "build_ring_graph",
    "build_delaunay_graph",
    "laplacian",
    "count_extrema",
    "as_signal",
]

TWO_PI = 2.0 * math.pi


class DisconnectedGraphWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with strictly positive edge weights.

    Attributes
    ----------
    n : int
        Number of vertices.
    edges : ndarray, shape (m, 2)
        Unordered vertex pairs stored with ``i < j``, sorted lexicographically.
    weights : ndarray, shape (m,)
        Edge weights, aligned with ``edges``.
    embedding : ndarray or None
        Vertex coordinates: shape (n,) for angles on the circle, (n, 2) for
        points in the plane.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray
    embedding: np.ndarray | None = None
    connected: bool = field(init=False)

    def __post_init__(self):
        n = int(self.n)
        edges = np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if n < 1:
            raise InvalidInputError("a graph needs at least one vertex")
        if len(edges) != len(weights):
            raise InvalidInputError("edges and weights differ in length")
        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise InvalidInputError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise InvalidInputError("self-loops are not allowed")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidInputError("edge weights must be finite and strictly positive")
        edges = np.sort(edges, axis=1)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges, weights = edges[order], weights[order]
        if len(edges) > 1:
            dup = np.all(edges[1:] == edges[:-1], axis=1)
            if dup.any():
                i, j = edges[1:][dup][0]
                raise InvalidInputError(f"duplicate edge ({i}, {j})")
        emb = self.embedding
        if emb is not None:
            emb = np.asarray(emb, dtype=float)
            if emb.shape[0] != n or emb.ndim not in (1, 2):
                raise InvalidInputError(f"embedding shape {emb.shape} does not match n={n}")
            emb.setflags(write=False)
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "embedding", emb)
        ncomp = connected_components(self.adjacency, directed=False)[0]
        object.__setattr__(self, "connected", ncomp == 1)
        if ncomp > 1:
            warnings.warn(
                f"graph has {ncomp} connected components", DisconnectedGraphWarning, stacklevel=3
            )

    @cached_property
    def adjacency(self) -> sp.csr_array:
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.concatenate([self.weights, self.weights])
        return sp.csr_array((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degree(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbor_counts(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)


def as_signal(g: Graph, s) -> np.ndarray:
    """Validate ``s`` as a finite signal on the vertices of ``g``."""
    s = np.asarray(s, dtype=float)
    if s.shape != (g.n,):
        raise InvalidInputError(f"signal has shape {s.shape}, graph has {g.n} vertices")
    if not np.all(np.isfinite(s)):
        raise InvalidInputError("signal contains non-finite values")
    return s


def circular_gap(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b))
    return np.minimum(d, TWO_PI - d)


def build_ring_graph(angles, neighbors_per_side: int = 2) -> Graph:
    """Connect each angle to its ``neighbors_per_side`` circular neighbours on either side.

    Edge weights are the reciprocal arc length between the two angles.
    """
    theta = np.asarray(angles, dtype=float).reshape(-1)
    p = int(neighbors_per_side)
    if p < 1:
        raise InvalidInputError("neighbors_per_side must be a positive integer")
    n = len(theta)
    if n < 2 * p + 1:
        raise InvalidInputError(
            f"a ring with {p} neighbours per side needs at least {2 * p + 1} vertices, got {n}"
        )
    if not np.all(np.isfinite(theta)) or theta.min() < 0 or theta.max() >= TWO_PI:
        raise InvalidInputError("angles must lie in [0, 2*pi)")
    if np.any(np.diff(theta) <= 0):
        raise InvalidInputError("angles must be strictly increasing")
    idx = np.arange(n)
    i = np.concatenate([idx] * p)
    j = np.concatenate([(idx + k) % n for k in range(1, p + 1)])
    w = 1.0 / circular_gap(theta[i], theta[j])
    return Graph(n, np.column_stack([i, j]), w, embedding=theta)


def build_delaunay_graph(points) -> Graph:
    """Delaunay triangulation of 2D points, edges weighted by reciprocal Euclidean length."""
    pts = np.asarray(points, dtype=float)
    tris = delaunay_triangles(pts)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.unique(np.sort(e, axis=1), axis=0)
    w = 1.0 / np.linalg.norm(pts[e[:, 0]] - pts[e[:, 1]], axis=1)
    return Graph(len(pts), e, w, embedding=pts)


def laplacian(g: Graph) -> sp.csr_array:
    """Combinatorial Laplacian ``D - A`` as a sparse matrix."""
    return (sp.diags_array(g.degree) - g.adjacency).tocsr()


def count_extrema(g: Graph, s) -> int:
    """Strict local maxima plus strict local minima with respect to graph neighbours."""
    s = as_signal(g, s)
    adj = g.adjacency
    counts = np.diff(adj.indptr)
    if np.any(counts == 0):
        v = int(np.flatnonzero(counts == 0)[0])
        raise IsolatedVertexError(f"vertex {v} has no neighbours; extremum undefined")
    vals = s[adj.indices]
    starts = adj.indptr[:-1]
    nb_max = np.maximum.reduceat(vals, starts)
    nb_min = np.minimum.reduceat(vals, starts)
    return int(np.count_nonzero(s > nb_max) + np.count_nonzero(s < nb_min))
