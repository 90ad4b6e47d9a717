"""Dense vertex-distance matrices for distance-based filtering."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import InvalidInputError, UnreachablePairError
from .graph import Graph

__all__ = [
    "circular_distance_matrix",
    "euclidean_distance_matrix",
    "shortest_path_matrix",
    "dijkstra_all_pairs",
    "floyd_warshall",
    "edge_lengths",
]


def circular_distance_matrix(angles) -> np.ndarray:
    """Arc distance in radians between every pair of angles on the unit circle."""
    theta = np.asarray(angles, dtype=float).reshape(-1)
    if not np.all(np.isfinite(theta)) or (theta.size and (theta.min() < 0 or theta.max() >= 2 * math.pi)):
        raise InvalidInputError("angles must lie in [0, 2*pi)")
    d = np.abs(theta[:, None] - theta[None, :])
    return np.minimum(d, 2 * math.pi - d)


def euclidean_distance_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or not np.all(np.isfinite(pts)):
        raise InvalidInputError("points must be a finite (n, d) array")
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def edge_lengths(g: Graph, edge_length: str = "inverse_weight") -> np.ndarray:
    if edge_length == "inverse_weight":
        return 1.0 / g.weights
    if edge_length == "weight":
        return g.weights.copy()
    raise InvalidInputError(f"unknown edge_length mode {edge_length!r}")


def dijkstra_all_pairs(g: Graph, lengths: np.ndarray) -> np.ndarray:
    """One binary-heap Dijkstra run per source vertex."""
    n = g.n
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for (i, j), w in zip(g.edges.tolist(), lengths.tolist()):
        nbrs[i].append((j, w))
        nbrs[j].append((i, w))
    out = np.full((n, n), math.inf)
    for src in range(n):
        dist = out[src]
        dist[src] = 0.0
        done = [False] * n
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, w in nbrs[u]:
                nd = d + w
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return out


def floyd_warshall(g: Graph, lengths: np.ndarray) -> np.ndarray:
    n = g.n
    D = np.full((n, n), math.inf)
    np.fill_diagonal(D, 0.0)
    i, j = g.edges[:, 0], g.edges[:, 1]
    D[i, j] = np.minimum(D[i, j], lengths)
    D[j, i] = D[i, j]
    for k in range(n):
        np.minimum(D, D[:, k, None] + D[None, k, :], out=D)
    return D


def shortest_path_matrix(
    g: Graph, method: str = "dijkstra", edge_length: str = "inverse_weight"
) -> np.ndarray:
    """All-pairs shortest-path distances.

    ``edge_length="inverse_weight"`` turns similarity weights ``1/d`` back into
    metric lengths ``d``; ``"weight"`` uses the weights as lengths directly.
    """
    lengths = edge_lengths(g, edge_length)
    if method == "dijkstra":
        D = dijkstra_all_pairs(g, lengths)
    elif method == "floyd_warshall":
        D = floyd_warshall(g, lengths)
    else:
        raise InvalidInputError(f"unknown shortest-path method {method!r}")
    unreachable = np.argwhere(np.isinf(D))
    if len(unreachable):
        i, j = unreachable[0]
        raise UnreachablePairError(int(i), int(j))
    # paths are summed in different orders by the two methods; pin exact symmetry
    return np.minimum(D, D.T)
