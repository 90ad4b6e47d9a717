from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import Delaunay

from graphif.delaunay import convex_hull_size, delaunay_triangles, incircle, orient2d
from graphif.errors import InvalidInputError, TriangulationError


def edge_set(tris):
    out = set()
    for a, b, c in tris:
        for i, j in ((a, b), (b, c), (a, c)):
            out.add((min(i, j), max(i, j)))
    return out


def brute_force_empty_circles(pts, tris):
    """Exact rational in-circle test of every point against every triangle."""
    P = [(Fraction(x), Fraction(y)) for x, y in pts]
    for a, b, c in tris:
        ax, ay = P[a]
        bx, by = P[b]
        cx, cy = P[c]
        for d, (dx, dy) in enumerate(P):
            if d in (a, b, c):
                continue
            m = [
                [ax - dx, ay - dy, (ax - dx) ** 2 + (ay - dy) ** 2],
                [bx - dx, by - dy, (bx - dx) ** 2 + (by - dy) ** 2],
                [cx - dx, cy - dy, (cx - dx) ** 2 + (cy - dy) ** 2],
            ]
            det = (
                m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
            )
            if det > 0:
                return False
    return True


class TestPredicates:
    def test_orient_signs(self):
        assert orient2d((0, 0), (1, 0), (0, 1)) == 1
        assert orient2d((0, 0), (0, 1), (1, 0)) == -1
        assert orient2d((0, 0), (1, 1), (2, 2)) == 0

    def test_incircle_exact_on_cocircular_points(self):
        # four corners of a square lie on one circle
        assert incircle((0, 0), (1, 0), (1, 1), (0, 1)) == 0
        assert incircle((0, 0), (1, 0), (0, 1), (0.5, 0.5)) == 1
        assert incircle((0, 0), (1, 0), (0, 1), (5, 5)) == -1

    def test_incircle_near_degenerate(self):
        # tiny perturbation off the circle must still be classified correctly
        eps = 2.0**-40
        assert incircle((0, 0), (1, 0), (1, 1), (0, 1 - eps)) == 1
        assert incircle((0, 0), (1, 0), (1, 1), (0, 1 + eps)) == -1


class TestDelaunay:
    def test_single_triangle(self):
        tris = delaunay_triangles([[0, 0], [1, 0], [0, 1]])
        assert tris.shape == (1, 3)

    def test_unit_square_two_triangles(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        tris = delaunay_triangles(pts)
        assert len(tris) == 2
        assert len(edge_set(tris)) == 5
        assert brute_force_empty_circles(pts, tris)

    def test_grid_cocircular(self):
        x, y = np.meshgrid(np.arange(5.0), np.arange(5.0))
        pts = np.column_stack([x.ravel(), y.ravel()])
        tris = delaunay_triangles(pts)
        assert len(tris) == 32
        assert brute_force_empty_circles(pts, tris)

    @pytest.mark.parametrize("n,seed", [(10, 0), (60, 1), (500, 2)])
    def test_empty_circumcircle(self, n, seed):
        pts = np.random.default_rng(seed).uniform(0, 2 * np.pi, (n, 2))
        tris = delaunay_triangles(pts)
        h = convex_hull_size(pts)
        assert len(tris) == 2 * n - 2 - h
        if n <= 60:
            assert brute_force_empty_circles(pts, tris)
        else:
            # vectorised float check against a margin, exact check was done above at small n
            a, b, c = (pts[tris[:, k]] for k in range(3))
            for d in pts:
                ad, bd, cd = a - d, b - d, c - d
                det = (
                    (ad[:, 0] * ad[:, 0] + ad[:, 1] * ad[:, 1]) * (bd[:, 0] * cd[:, 1] - cd[:, 0] * bd[:, 1])
                    - (bd[:, 0] * bd[:, 0] + bd[:, 1] * bd[:, 1]) * (ad[:, 0] * cd[:, 1] - cd[:, 0] * ad[:, 1])
                    + (cd[:, 0] * cd[:, 0] + cd[:, 1] * cd[:, 1]) * (ad[:, 0] * bd[:, 1] - bd[:, 0] * ad[:, 1])
                )
                assert np.all(det <= 1e-9)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_scipy_edges(self, seed):
        pts = np.random.default_rng(seed).random((300, 2))
        ref = Delaunay(pts).simplices
        assert edge_set(delaunay_triangles(pts)) == edge_set(ref)

    def test_triangles_counter_clockwise(self, rng):
        pts = rng.random((80, 2))
        for a, b, c in delaunay_triangles(pts):
            assert orient2d(pts[a], pts[b], pts[c]) == 1

    def test_deterministic(self, rng):
        pts = rng.random((200, 2))
        assert np.array_equal(delaunay_triangles(pts), delaunay_triangles(pts.copy()))

    def test_collinear_rejected(self):
        with pytest.raises(TriangulationError):
            delaunay_triangles([[0, 0], [1, 1], [2, 2], [3, 3]])

    def test_too_few_points(self):
        with pytest.raises(TriangulationError):
            delaunay_triangles([[0, 0], [1, 1]])

    def test_duplicates_rejected(self):
        with pytest.raises(InvalidInputError):
            delaunay_triangles([[0, 0], [1, 0], [0, 1], [1, 0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            delaunay_triangles([[0, 0], [1, 0], [0, np.nan]])

    @settings(max_examples=25, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(0, 12), st.integers(0, 12)), min_size=3, max_size=30, unique=True
        )
    )
    def test_integer_lattice_subsets(self, pts):
        """Lots of cocircular and collinear configurations."""
        pts = np.array(pts, dtype=float)
        if np.linalg.matrix_rank(pts[1:] - pts[0]) < 2:
            with pytest.raises(TriangulationError):
                delaunay_triangles(pts)
            return
        tris = delaunay_triangles(pts)
        assert len(tris) == 2 * len(pts) - 2 - convex_hull_size(pts)
        assert brute_force_empty_circles(pts, tris)
