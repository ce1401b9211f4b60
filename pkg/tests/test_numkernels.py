"""Lyapunov solve, symmetric eigendecomposition, and SVD truncation."""

import numpy as np
import pytest

from sysmor import (
    GramianResult,
    IllPosedLyapunov,
    RankOutOfRange,
    solve_lyapunov,
    svd_truncate,
    sym_eig_ascending,
)
from conftest import random_stable


class TestSolveLyapunov:
    def test_scalar_closed_form(self):
        # a p + p a = -q with a = -1, q = 1 gives p = 1/2.
        result = solve_lyapunov(np.array([[-1.0]]), np.array([[1.0]]))
        assert isinstance(result, GramianResult)
        assert result.P[0, 0] == pytest.approx(0.5, rel=1e-14)
        assert result.residual <= 1e-14

    def test_diagonal_closed_form(self):
        # For A = diag(a_i), Q = I the solution is P_ij = -delta_ij / (2 a_i).
        A = np.diag([-1.0, -2.0, -5.0])
        result = solve_lyapunov(A, np.eye(3))
        np.testing.assert_allclose(result.P, np.diag([0.5, 0.25, 0.1]), rtol=1e-13)

    def test_residual_small_for_dense_random(self):
        rng = np.random.default_rng(31)
        sys = random_stable(rng, n=50, q=3, p=3)
        result = solve_lyapunov(sys.A, sys.B @ sys.B.T)
        assert result.residual <= 1e-10
        # Controllability Gramian of a reachable stable system is PSD.
        np.testing.assert_allclose(result.P, result.P.T, atol=1e-14)
        assert np.min(np.linalg.eigvalsh(result.P)) >= -1e-12 * np.trace(result.P)

    def test_mirrored_spectrum_rejected(self):
        # lambda = +1 and lambda = -1 sum to zero: operator is singular.
        A = np.diag([1.0, -1.0])
        with pytest.raises(IllPosedLyapunov):
            solve_lyapunov(A, np.eye(2))

    def test_imaginary_axis_pole_rejected(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(IllPosedLyapunov):
            solve_lyapunov(A, np.eye(2))

    def test_empty_problem(self):
        result = solve_lyapunov(np.zeros((0, 0)), np.zeros((0, 0)))
        assert result.P.shape == (0, 0)
        assert result.residual == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            solve_lyapunov(np.eye(2) * -1.0, np.eye(3))

    def test_unsymmetric_q_is_symmetrized(self):
        rng = np.random.default_rng(32)
        A = -np.eye(2) + 0.1 * rng.standard_normal((2, 2))
        Q = np.array([[2.0, 0.5], [0.3, 1.0]])
        got = solve_lyapunov(A, Q).P
        ref = solve_lyapunov(A, 0.5 * (Q + Q.T)).P
        np.testing.assert_allclose(got, ref, rtol=1e-13)


class TestSymEig:
    def test_ascending_order_and_orthonormality(self):
        rng = np.random.default_rng(33)
        M = rng.standard_normal((8, 8))
        X = M @ M.T
        values, vectors = sym_eig_ascending(X)
        assert np.all(np.diff(values) >= 0)
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(8), atol=1e-12)
        np.testing.assert_allclose(X @ vectors, vectors * values, atol=1e-10)

    def test_known_spectrum(self):
        values, _ = sym_eig_ascending(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_allclose(values, [-1.0, 2.0, 3.0], atol=1e-14)

    def test_slightly_asymmetric_input_symmetrized(self):
        X = np.array([[1.0, 1e-13], [0.0, 2.0]])
        values, _ = sym_eig_ascending(X)
        np.testing.assert_allclose(values, [1.0, 2.0], atol=1e-12)


class TestSvdTruncate:
    def test_factors_reconstruct_best_rank(self):
        rng = np.random.default_rng(34)
        M = rng.standard_normal((6, 4))
        U, s, V = svd_truncate(M, 2)
        assert U.shape == (6, 2) and V.shape == (4, 2) and s.shape == (2,)
        assert s[0] >= s[1] >= 0
        np.testing.assert_allclose(U.T @ U, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(V.T @ V, np.eye(2), atol=1e-12)
        # Eckart-Young: the residual equals the discarded singular values.
        full = np.linalg.svd(M, compute_uv=False)
        err = np.linalg.norm(M - U @ np.diag(s) @ V.T, 2)
        assert err == pytest.approx(full[2], rel=1e-10)

    def test_full_rank_reproduces_matrix(self):
        rng = np.random.default_rng(35)
        M = rng.standard_normal((3, 5))
        U, s, V = svd_truncate(M, 3)
        np.testing.assert_allclose(U @ np.diag(s) @ V.T, M, atol=1e-12)

    def test_complex_input(self):
        rng = np.random.default_rng(36)
        M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        U, s, V = svd_truncate(M, 4)
        np.testing.assert_allclose(U @ np.diag(s) @ V.conj().T, M, atol=1e-12)

    def test_rank_bounds(self):
        M = np.ones((3, 2))
        with pytest.raises(RankOutOfRange):
            svd_truncate(M, 0)
        with pytest.raises(RankOutOfRange):
            svd_truncate(M, 3)
