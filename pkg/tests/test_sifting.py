import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphif.decomposers import build_window_operator, db_window_length, domain_extent
from graphif.distances import circular_distance_matrix
from graphif.errors import (
    DivergenceError,
    HypothesisViolationError,
    InvalidInputError,
    NonConvergenceError,
    WindowSupportError,
)
from graphif.experiments import random_symmetric_operator, ring_b0, ring_b1
from graphif.graph import build_ring_graph
from graphif.sifting import (
    DiagonalOperator,
    MatrixOperator,
    StoppingRule,
    checksum,
    decompose,
    extract_imfs,
    sift,
    sifting_limit,
)

from conftest import random_ring_angles


class TestStoppingRule:
    def test_defaults(self):
        r = StoppingRule()
        assert (r.mode, r.max_iterations, r.delta) == ("relative_change", 200, 1e-3)
        assert StoppingRule.fixed().max_iterations == 10

    @pytest.mark.parametrize(
        "kwargs", [{"mode": "forever"}, {"max_iterations": 0}, {"delta": 0.0}, {"delta": -1.0}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInputError):
            StoppingRule(**kwargs)

    def test_fixed_mode_ignores_delta(self):
        assert StoppingRule("fixed_iterations", 5, 0.0).max_iterations == 5

    def test_round_trip(self):
        r = StoppingRule("fixed_iterations", 7, 0.5)
        assert StoppingRule(**r.to_dict()) == r


class TestSift:
    def test_identity_operator(self):
        s, m = sift(MatrixOperator(np.eye(3)), np.array([1.0, 2.0, 3.0]))
        assert m == 1 and np.all(s == 0)

    def test_zero_operator(self):
        s0 = np.array([1.0, -2.0])
        s, m = sift(MatrixOperator(np.zeros((2, 2))), s0)
        assert m == 1 and np.array_equal(s, s0)

    def test_geometric_decay(self):
        s, m = sift(DiagonalOperator([0.5, 0.0]), np.array([1.0, 1.0]), StoppingRule.fixed(50))
        assert m == 50
        assert s[0] == 0.5**50 and s[1] == 1.0

    def test_relative_change_stops_early(self):
        s, m = sift(DiagonalOperator([0.5, 0.0]), np.array([1.0, 1.0]), StoppingRule(delta=1e-3))
        # ||W s_m|| = 0.5^(m+1) <= 1e-3 * ||s_m||
        assert m == 10
        assert s[0] == 0.5**10

    def test_max_iterations_cap(self):
        s, m = sift(DiagonalOperator([1e-6]), np.array([1.0]), StoppingRule(max_iterations=3, delta=1e-12))
        assert m == 3

    def test_divergence_detected(self):
        with pytest.raises(DivergenceError):
            sift(DiagonalOperator([2.5]), np.array([1.0]), StoppingRule.fixed(100))
        with pytest.raises(DivergenceError):
            sift(DiagonalOperator([2.5]), np.array([1.0]), StoppingRule(max_iterations=100, delta=1e-15))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_nonfinite_detected(self):
        with pytest.raises(DivergenceError):
            sift(lambda x: x * np.inf, np.array([1.0]), StoppingRule.fixed(3))

    def test_complex_coefficients(self):
        s, _ = sift(DiagonalOperator([0.5, 0.0]), np.array([1 + 1j, 2j]), StoppingRule.fixed(3))
        np.testing.assert_allclose(s, [(1 + 1j) / 8, 2j])

    def test_monotone_convergence_to_limit(self, rng):
        W, _ = random_symmetric_operator(8, rng)
        s0 = rng.standard_normal(8)
        lim = sifting_limit(W, s0)
        s, prev = s0.copy(), np.inf
        for _ in range(300):
            s = s - W @ s
            err = np.linalg.norm(s - lim)
            assert err <= prev + 1e-14
            prev = err

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
    def test_operator_linearity(self, seed, a, b):
        rng = np.random.default_rng(seed)
        theta = random_ring_angles(40, seed)
        op = build_window_operator(circular_distance_matrix(theta), 1.0)
        x, y = rng.standard_normal((2, 40))
        np.testing.assert_allclose(op(a * x + b * y), a * op(x) + b * op(y), atol=1e-10)


class TestSiftingLimit:
    def test_identity(self):
        assert np.all(sifting_limit(np.eye(4), np.ones(4)) == 0)

    def test_zero(self, rng):
        s0 = rng.standard_normal(5)
        assert np.array_equal(sifting_limit(np.zeros((5, 5)), s0), s0)

    def test_long_iteration_oracle(self, rng):
        for _ in range(10):
            W, _ = random_symmetric_operator(8, rng)
            s0 = rng.standard_normal(8)
            it, _ = sift(MatrixOperator(W), s0, StoppingRule.fixed(10_000))
            assert np.linalg.norm(it - sifting_limit(W, s0)) <= 1e-6 * np.linalg.norm(s0)

    def test_idempotent_at_limit(self, rng):
        W, _ = random_symmetric_operator(8, rng)
        lim = sifting_limit(W, rng.standard_normal(8))
        assert np.linalg.norm(W @ lim) <= 1e-12 * max(1.0, np.linalg.norm(lim))

    def test_normal_nonsymmetric(self, rng):
        # rotation-scaled block: eigenvalues 0.5 +- 0.3i, normal but not symmetric
        W = np.zeros((3, 3))
        W[:2, :2] = [[0.5, -0.3], [0.3, 0.5]]
        s0 = rng.standard_normal(3)
        lim = sifting_limit(W, s0)
        np.testing.assert_allclose(lim, [0, 0, s0[2]], atol=1e-14)
        it, _ = sift(MatrixOperator(W), s0, StoppingRule.fixed(2000))
        np.testing.assert_allclose(it, lim, atol=1e-12)

    def test_non_normal_rejected(self):
        with pytest.raises(HypothesisViolationError):
            sifting_limit(np.array([[0.5, 1.0], [0.0, 0.5]]), np.ones(2))

    def test_eigenvalue_two_rejected(self, rng):
        W, lam = random_symmetric_operator(6, rng, zero_fraction=0.0)
        lam_, Q = np.linalg.eigh(W)
        lam_[-1] = 2.1
        with pytest.raises(NonConvergenceError, match="2.1"):
            sifting_limit((Q * lam_) @ Q.T, np.ones(6))

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NonConvergenceError):
            sifting_limit(np.diag([0.5, -0.1]), np.ones(2))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            sifting_limit(np.eye(3), np.ones(2))


@pytest.fixture(scope="module")
def ring():
    theta = random_ring_angles(512, 21)
    return build_ring_graph(theta, 2), theta, circular_distance_matrix(theta)


class TestOuterLoop:
    def factory(self, C, nu=1.6):
        return lambda r, k: build_window_operator(C, db_window_length(2 * np.pi, k, nu))

    def test_constant_signal_no_imfs(self, ring):
        g, _, C = ring
        res = decompose(self.factory(C), np.full(g.n, 3.0), g)
        assert res.imfs == [] and np.array_equal(res.residual, np.full(g.n, 3.0))

    def test_monotone_signal_has_two_extrema_on_ring(self, ring):
        """A closed ring has a wrap-around maximum and minimum, so one IMF is extracted."""
        g, theta, C = ring
        res = decompose(self.factory(C), theta, g, max_imfs=10)
        assert res.meta[0].extrema == 2

    def test_example_signal_telescopes(self, ring):
        g, theta, C = ring
        s = ring_b0(theta) + ring_b1(theta)
        res = decompose(self.factory(C), s, g, max_imfs=10)
        assert 2 <= len(res.imfs) <= 10
        assert np.linalg.norm(res.reconstruct() - s) <= 1e-10 * np.linalg.norm(s)
        assert res.input_checksum == checksum(s)
        assert all(m.iterations >= 1 and m.extrema >= 2 for m in res.meta)

    def test_max_imfs_cap(self, ring):
        g, theta, C = ring
        s = ring_b0(theta) + ring_b1(theta)
        res = decompose(self.factory(C), s, g, max_imfs=1)
        assert len(res.imfs) == 1
        assert np.linalg.norm(res.imfs[0] + res.residual - s) <= 1e-10 * np.linalg.norm(s)
        assert res.as_array().shape == (g.n, 2)

    def test_factory_error_carries_imf_index(self, ring):
        g, theta, C = ring
        s = ring_b0(theta) + ring_b1(theta)

        def factory(r, k):
            factory.calls += 1
            if factory.calls == 2:
                raise WindowSupportError("window is empty around vertex 7")
            return build_window_operator(C, 1.0)

        factory.calls = 0
        with pytest.raises(WindowSupportError) as exc:
            decompose(factory, s, g)
        assert exc.value.imf_index == 1
        assert "IMF 1" in str(exc.value)

    def test_force_imfs(self):
        s = np.ones(10)
        res = extract_imfs(s, lambda r: 0, lambda r, k, i: (0.5 * r, 1, {}), max_imfs=3, force_imfs=True)
        assert len(res.imfs) == 3 and all(m.extrema == 2 for m in res.meta)

    def test_rejects_zero_cap(self):
        with pytest.raises(InvalidInputError):
            extract_imfs(np.ones(3), lambda r: 5, lambda r, k, i: None, max_imfs=0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6))
    def test_reconstruction_property(self, seed, cap):
        rng = np.random.default_rng(seed)
        theta = random_ring_angles(64, seed)
        g = build_ring_graph(theta, 2)
        C = circular_distance_matrix(theta)
        s = rng.standard_normal(64) * 10.0 ** rng.integers(-3, 4)
        res = decompose(self.factory(C), s, g, max_imfs=cap)
        assert len(res.imfs) <= cap
        assert np.linalg.norm(res.reconstruct() - s) <= 1e-10 * np.linalg.norm(s)
