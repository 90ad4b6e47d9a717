"""Bowyer-Watson incremental Delaunay triangulation.

Predicates are evaluated in floating point with a static error bound; when the
sign cannot be certified the determinant is recomputed exactly with rationals.
Exact cocircular ties are resolved toward "not inside", which for index-ordered
insertion is a deterministic symbolic perturbation: the earlier triangle wins.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import InvalidInputError, TriangulationError

_EPS = np.finfo(float).eps / 2
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS

__all__ = ["orient2d", "incircle", "delaunay_triangles", "convex_hull_size"]


def _orient_exact(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (Fraction(float(v)) for v in (*a, *b, *c))
    det = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (det > 0) - (det < 0)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of (a, b, c): +1 counter-clockwise, -1 clockwise, 0 collinear."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _CCW_BOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    return _orient_exact(a, b, c)


def _incircle_exact(a, b, c, d) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = (Fraction(float(v)) for v in (*a, *b, *c, *d))
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (det > 0) - (det < 0)


def _incircle_filtered(abc: np.ndarray, d: np.ndarray):
    """Vectorised in-circle determinant and its forward error bound.

    ``abc`` has shape (m, 3, 2) with counter-clockwise triangles; a positive
    determinant means ``d`` lies strictly inside the circumcircle.
    """
    rel = abc - d
    adx, ady = rel[:, 0, 0], rel[:, 0, 1]
    bdx, bdy = rel[:, 1, 0], rel[:, 1, 1]
    cdx, cdy = rel[:, 2, 0], rel[:, 2, 1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
        + (np.abs(cdxady) + np.abs(adxcdy)) * blift
        + (np.abs(adxbdy) + np.abs(bdxady)) * clift
    )
    return det, _ICC_BOUND * permanent


def incircle(a, b, c, d) -> int:
    """+1 if ``d`` is strictly inside the circumcircle of counter-clockwise (a, b, c)."""
    abc = np.array([[a, b, c]], dtype=float)
    det, err = _incircle_filtered(abc, np.asarray(d, dtype=float))
    if abs(det[0]) > err[0]:
        return 1 if det[0] > 0 else -1
    return _incircle_exact(a, b, c, d)


def convex_hull_size(points: np.ndarray) -> int:
    """Number of points on the convex hull boundary, collinear boundary points included."""
    pts = [tuple(p) for p in points]
    order = sorted(range(len(pts)), key=lambda i: pts[i])

    def chain(idx):
        out: list[int] = []
        for i in idx:
            # keep collinear points: pop only on strict clockwise turns
            while len(out) >= 2 and orient2d(pts[out[-2]], pts[out[-1]], pts[i]) < 0:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    return len(set(lower[:-1] + upper[:-1]))


def _validate(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidInputError(f"expected an (n, 2) array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InvalidInputError("point coordinates must be finite")
    n = len(pts)
    if n < 3:
        raise TriangulationError(f"need at least 3 points, got {n}")
    uniq, first = np.unique(pts, axis=0, return_index=True)
    if len(uniq) != n:
        seen = set(first.tolist())
        dup = next(i for i in range(n) if i not in seen)
        raise InvalidInputError(f"duplicate point at index {dup}: {tuple(pts[dup])}")
    a = pts[0]
    b = pts[1]
    if not any(orient2d(a, b, pts[i]) != 0 for i in range(2, n)):
        raise TriangulationError("all points are collinear")
    return pts


def _bowyer_watson(pts: np.ndarray, scale: float) -> np.ndarray:
    n = len(pts)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center = (lo + hi) / 2
    size = max(float(np.max(hi - lo)), 1e-300)
    big = scale * size
    super_pts = center + big * np.array([[-3.0, -3.0], [3.0, -3.0], [0.0, 3.0]])
    allpts = np.vstack([pts, super_pts])
    tris = np.array([[n, n + 1, n + 2]], dtype=np.intp)

    for p in range(n):
        d = allpts[p]
        det, err = _incircle_filtered(allpts[tris], d)
        bad = det > err
        for t in np.flatnonzero(np.abs(det) <= err):
            a, b, c = allpts[tris[t]]
            bad[t] = _incircle_exact(a, b, c, d) > 0
        bad_tris = tris[bad]

        edges = {}
        for a, b, c in bad_tris.tolist():
            for e in ((a, b), (b, c), (c, a)):
                edges[e] = True
        boundary = [e for e in edges if (e[1], e[0]) not in edges]
        new = np.array([(a, b, p) for a, b in boundary], dtype=np.intp)
        tris = np.vstack([tris[~bad], new])

    keep = np.all(tris < n, axis=1)
    return tris[keep]


def delaunay_triangles(points) -> np.ndarray:
    """Triangulate ``points`` and return an (m, 3) array of counter-clockwise vertex triples.

    Raises
    ------
    TriangulationError
        If fewer than three points are given or all points are collinear.
    InvalidInputError
        If two points coincide or coordinates are not finite.
    """
    pts = _validate(points)
    n = len(pts)
    expected = 2 * n - 2 - convex_hull_size(pts)
    scale = 1e3
    # The finite super triangle can hide hull triangles with huge circumcircles;
    # grow it until the triangle count matches the Euler bound.
    for _ in range(8):
        tris = _bowyer_watson(pts, scale)
        if len(tris) == expected:
            break
        scale *= 1e4
    else:
        raise TriangulationError(
            f"triangulation incomplete: {len(tris)} triangles, expected {expected}"
        )
    order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))
    return tris[order]
