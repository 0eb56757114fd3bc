import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkinit.exceptions import NumericError, ParameterError, ShapeError
from shrinkinit.numerics import (
    as_matrix,
    gaussian_matrix,
    matmul,
    orthogonal_factor,
    pinv,
    svd_full,
)


def naive_matmul(a, b):
    out = np.zeros((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            for k in range(a.shape[1]):
                out[i, j] += a[i, k] * b[k, j]
    return out


def random_matrix(rng, rows, cols, rank=None):
    if rank is None:
        return rng.standard_normal((rows, cols))
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))


def check_penrose(a, ap, tol):
    assert np.abs(a @ ap @ a - a).max() <= tol
    assert np.abs(ap @ a @ ap - ap).max() <= tol
    assert np.abs((a @ ap).T - a @ ap).max() <= tol
    assert np.abs((ap @ a).T - ap @ a).max() <= tol


class TestMatmul:
    def test_identity(self, rng):
        a = rng.standard_normal((3, 4))
        np.testing.assert_array_equal(matmul(np.eye(3), a), a)

    def test_hand_computed(self):
        np.testing.assert_array_equal(matmul([[1, 2], [3, 4]], [[0], [1]]), [[2], [4]])

    def test_matches_triple_loop(self, rng):
        a, b = rng.standard_normal((5, 7)), rng.standard_normal((7, 3))
        np.testing.assert_allclose(matmul(a, b), naive_matmul(a, b), rtol=1e-13, atol=1e-13)

    def test_shape_error_names_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
            matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ShapeError):
        as_matrix(np.ones(3))
    with pytest.raises(ShapeError):
        as_matrix(np.ones((0, 3)))
    with pytest.raises(NumericError):
        as_matrix([[1.0, np.nan]])


class TestSvd:
    def test_diagonal(self):
        u, s, v = svd_full(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(s, [3.0, 1.0])
        np.testing.assert_allclose(u, np.eye(2))
        np.testing.assert_allclose(v, np.eye(2))

    def test_zero_matrix(self):
        u, s, v = svd_full(np.zeros((4, 2)))
        np.testing.assert_array_equal(s, [0.0, 0.0])
        np.testing.assert_allclose(u.T @ u, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(v.T @ v, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("shape", [(30, 20), (20, 30), (1, 5), (5, 1), (1, 1), (17, 17)])
    def test_reconstruction(self, rng, shape):
        a = rng.standard_normal(shape)
        res = svd_full(a)
        assert res.u.shape == (shape[0], shape[0])
        assert res.v.shape == (shape[1], shape[1])
        assert np.linalg.norm(a - res.reconstruct()) / np.linalg.norm(a) <= 1e-10
        # independent LAPACK route for the spectrum
        np.testing.assert_allclose(res.s, np.linalg.svd(a, compute_uv=False), rtol=1e-10, atol=1e-12)

    def test_sign_convention(self, rng):
        u, s, v = svd_full(rng.standard_normal((7, 5)))
        pivots = np.argmax(np.abs(u), axis=0)
        assert np.all(u[pivots, np.arange(7)] >= 0)

    def test_deterministic(self, rng):
        a = rng.standard_normal((9, 6))
        r1, r2 = svd_full(a), svd_full(a.copy())
        for x, y in zip(r1, r2):
            np.testing.assert_array_equal(x, y)

    def test_sweep_cap_raises_with_count(self, rng):
        with pytest.raises(NumericError) as info:
            svd_full(rng.standard_normal((12, 12)), max_sweeps=1)
        assert info.value.iteration == 1

    def test_rank_deficient(self, rng):
        a = random_matrix(rng, 20, 12, rank=3)
        u, s, v = svd_full(a)
        assert np.all(s[3:] <= 1e-12 * s[0])
        np.testing.assert_allclose(u.T @ u, np.eye(20), atol=1e-10)
        np.testing.assert_allclose(v.T @ v, np.eye(12), atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(
        rows=st.integers(1, 24),
        cols=st.integers(1, 24),
        rank=st.integers(0, 24),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_invariants_property(self, rows, cols, rank, seed):
        rng = np.random.default_rng(seed)
        rank = min(rank, rows, cols)
        a = random_matrix(rng, rows, cols, rank) if rank else np.zeros((rows, cols))
        u, s, v = svd_full(a)
        assert np.abs(u.T @ u - np.eye(rows)).max() <= 1e-10
        assert np.abs(v.T @ v - np.eye(cols)).max() <= 1e-10
        assert np.all(s >= 0) and np.all(np.diff(s) <= 0)
        scale = max(np.linalg.norm(a), 1e-300)
        assert np.linalg.norm(a - (u[:, : s.size] * s) @ v[:, : s.size].T) / scale <= 1e-10


class TestPinv:
    def test_diagonal_inverse(self):
        np.testing.assert_allclose(pinv([[2.0, 0.0], [0.0, 4.0]]), [[0.5, 0.0], [0.0, 0.25]])

    def test_rank_one(self):
        a = np.ones((2, 2))
        ap = pinv(a)
        np.testing.assert_allclose(ap, np.full((2, 2), 0.25), atol=1e-15)
        check_penrose(a, ap, 1e-12)

    def test_involution(self, rng):
        a = rng.standard_normal((6, 4))
        np.testing.assert_allclose(pinv(pinv(a)), a, atol=1e-8)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pinv(np.zeros((3, 2))), np.zeros((2, 3)))

    @pytest.mark.parametrize("shape,rank", [((8, 5), 5), ((5, 8), 2), ((10, 10), 4)])
    def test_penrose_conditions(self, rng, shape, rank):
        a = random_matrix(rng, *shape, rank=rank)
        check_penrose(a, pinv(a), 1e-8)


class TestOrthogonalFactor:
    def test_orthogonal_fixed_point(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        np.testing.assert_allclose(orthogonal_factor(q), q, atol=1e-10)

    def test_positive_diagonal(self):
        np.testing.assert_allclose(orthogonal_factor(np.diag([5.0, 0.2])), np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("shape", [(8, 5), (5, 8)])
    def test_unit_singular_values(self, rng, shape):
        w = orthogonal_factor(rng.standard_normal(shape))
        assert w.shape == shape
        np.testing.assert_allclose(np.linalg.svd(w, compute_uv=False), 1.0, atol=1e-10)


class TestGaussian:
    def test_seed_determinism(self):
        np.testing.assert_array_equal(gaussian_matrix(4, 3, 1.0, 42), gaussian_matrix(4, 3, 1.0, 42))

    def test_moments(self):
        g = gaussian_matrix(1000, 1000, 1.0, np.random.default_rng(7))
        assert abs(g.mean()) < 0.01
        assert abs(g.std() - 1.0) < 0.01

    def test_scaling(self):
        np.testing.assert_array_equal(gaussian_matrix(5, 5, 0.5, 3), 0.5 * gaussian_matrix(5, 5, 1.0, 3))

    @pytest.mark.parametrize("std", [0.0, -1.0])
    def test_bad_std(self, std):
        with pytest.raises(ParameterError):
            gaussian_matrix(2, 2, std, 0)


@settings(max_examples=30, deadline=None)
@given(rows=st.integers(1, 12), cols=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_orthogonal_multiplication_preserves_spectrum(rows, cols, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((rows, cols))
    left, _ = np.linalg.qr(rng.standard_normal((rows, rows)))
    right, _ = np.linalg.qr(rng.standard_normal((cols, cols)))
    s = svd_full(a).s
    np.testing.assert_allclose(svd_full(left @ a).s, s, atol=1e-10)
    np.testing.assert_allclose(svd_full(a @ right).s, s, atol=1e-10)
