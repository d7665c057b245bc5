"""Spectral kernels, Schatten norms, pairings."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadicop.core import DyadicMatrixFunction, constant_function, rademacher
from dyadicop.linalg import (
    hermitian_eig,
    lp_function_norm,
    modulus,
    positive_part,
    psd_dominates,
    schatten_norm,
    singular_values,
    trace_pairing,
)


def random_matrix(seed, dim):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def random_hermitian(seed, dim):
    A = random_matrix(seed, dim)
    return (A + A.conj().T) / 2


def haar_unitary(seed, dim):
    q, r = np.linalg.qr(random_matrix(seed, dim))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


matrix_params = st.tuples(st.integers(1, 6), st.integers(0, 2**31 - 1))


class TestHermitianEig:
    def test_identity(self):
        spec = hermitian_eig(np.eye(3))
        assert np.allclose(spec.eigenvalues, 1.0)

    def test_diagonal_descending(self):
        spec = hermitian_eig(np.diag([3.0, 1.0]))
        assert np.allclose(spec.eigenvalues, [3.0, 1.0])

    def test_pauli_x(self):
        spec = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(spec.eigenvalues, [1.0, -1.0])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.zeros((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @given(matrix_params)
    @settings(max_examples=40, deadline=None)
    def test_reconstruction_and_unitarity(self, params):
        dim, seed = params
        A = random_hermitian(seed, dim)
        spec = hermitian_eig(A)
        scale = max(np.linalg.norm(A), 1.0)
        for lam, v in zip(spec.eigenvalues, spec.eigenvectors.T):
            assert np.linalg.norm(A @ v - lam * v) <= 1e-10 * scale
        vhv = spec.eigenvectors.conj().T @ spec.eigenvectors
        assert np.abs(vhv - np.eye(dim)).max() <= 1e-10


class TestModulus:
    def test_diagonal(self):
        assert np.allclose(modulus(np.diag([-2.0, 3.0])), np.diag([2.0, 3.0]))

    def test_unitary_has_identity_modulus(self):
        U = haar_unitary(5, 4)
        assert np.abs(modulus(U) - np.eye(4)).max() <= 1e-10

    @given(matrix_params)
    @settings(max_examples=40, deadline=None)
    def test_defining_identity(self, params):
        dim, seed = params
        A = random_matrix(seed, dim)
        m = modulus(A)
        assert np.abs(m @ m - A.conj().T @ A).max() <= 1e-10 * max(1.0, np.linalg.norm(A) ** 2)

    def test_positive_part_of_signature(self):
        B = np.diag([2.0, -1.0, 0.5])
        assert np.allclose(positive_part(B), np.diag([2.0, 0.0, 0.5]))


class TestSchattenNorm:
    def test_identity_trace_norm(self):
        assert schatten_norm(np.eye(3), 1) == pytest.approx(3.0)

    def test_rank_one(self):
        u = np.array([1.0, 1j]) / np.sqrt(2)
        v = np.array([1.0, -1.0]) / np.sqrt(2)
        A = np.outer(u, v.conj())
        for p in [1, 1.5, 2, 4, np.inf]:
            assert schatten_norm(A, p) == pytest.approx(1.0)

    def test_frobenius(self):
        A = random_matrix(3, 4)
        assert schatten_norm(A, 2) == pytest.approx(np.sqrt((np.abs(A) ** 2).sum()))

    def test_rejects_quasi_norms(self):
        with pytest.raises(ValueError):
            schatten_norm(np.eye(2), 0.5)

    @given(matrix_params)
    @settings(max_examples=30, deadline=None)
    def test_unitary_invariance(self, params):
        dim, seed = params
        A = random_matrix(seed, dim)
        U = haar_unitary(seed + 1, dim)
        V = haar_unitary(seed + 2, dim)
        for p in [1, 4 / 3, 2, 4, np.inf]:
            assert schatten_norm(U @ A @ V, p) == pytest.approx(
                schatten_norm(A, p), rel=1e-9, abs=1e-10
            )

    @given(matrix_params)
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_p(self, params):
        dim, seed = params
        A = random_matrix(seed, dim)
        norms = [schatten_norm(A, p) for p in [1, 4 / 3, 2, 4, np.inf]]
        for a, b in zip(norms, norms[1:]):
            assert b <= a + 1e-10

    def test_singular_values_match_svd(self):
        A = random_matrix(17, 5)
        sv = np.linalg.svd(A, compute_uv=False)
        assert np.abs(singular_values(A) - sv).max() <= 1e-10


class TestPsdDominates:
    def test_double_identity(self):
        assert psd_dominates(2 * np.eye(2), np.eye(2))

    def test_incomparable_projections(self):
        assert not psd_dominates(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))

    def test_two_sided_domination_gives_psd(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            B = random_hermitian(rng.integers(2**31), 3)
            A = positive_part(B) + positive_part(-B)
            assert psd_dominates(A, B) and psd_dominates(A, -B)
            assert psd_dominates(A, np.zeros((3, 3)))


class TestLpFunctionNorm:
    def test_constant(self):
        C = random_matrix(0, 3)
        f = constant_function(C, n=2)
        for p in [1, 2, 3, np.inf]:
            assert lp_function_norm(f, p) == pytest.approx(schatten_norm(C, p))

    def test_scalar_rademacher(self):
        assert lp_function_norm(rademacher(1, 3), 2) == pytest.approx(1.0)

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            lp_function_norm(rademacher(1, 2), 0.7)

    @given(matrix_params, st.integers(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_hoelder_on_products(self, params, which):
        dim, seed = params
        rng = np.random.default_rng(seed)
        shape = (8, dim, dim)
        f = DyadicMatrixFunction(3, dim, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        g = DyadicMatrixFunction(3, dim, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        p, q, r = [(2, 2, 1), (4, 4, 2), (3, 6, 2), (np.inf, 2, 2), (np.inf, 1, 1)][which]
        prod = DyadicMatrixFunction(3, dim, f.values @ g.values)
        assert lp_function_norm(prod, r) <= lp_function_norm(f, p) * lp_function_norm(g, q) + 1e-9


class TestTracePairing:
    def test_identity_pairing(self):
        f = constant_function(np.eye(3), n=1)
        assert trace_pairing(f, f) == pytest.approx(3.0)

    def test_haar_orthogonality(self):
        assert abs(trace_pairing(rademacher(1, 2), rademacher(2, 2))) <= 1e-14

    def test_self_pairing_is_l2_squared(self):
        rng = np.random.default_rng(2)
        f = DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
        assert trace_pairing(f, f) == pytest.approx(lp_function_norm(f, 2) ** 2)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            f = DyadicMatrixFunction(2, 3, rng.standard_normal((4, 3, 3)) + 1j * rng.standard_normal((4, 3, 3)))
            g = DyadicMatrixFunction(2, 3, rng.standard_normal((4, 3, 3)) + 1j * rng.standard_normal((4, 3, 3)))
            assert abs(trace_pairing(f, g)) <= lp_function_norm(f, 2) * lp_function_norm(g, 2) + 1e-10

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            trace_pairing(rademacher(1, 2), rademacher(1, 3))


class TestDualityAtP2:
    def test_norming_functional(self):
        # sup over unit g of |<f, g>| is attained by g = f / ||f||_2
        rng = np.random.default_rng(9)
        f = DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
        nf = lp_function_norm(f, 2)
        g = f * (1.0 / nf)
        assert abs(trace_pairing(f, g)) == pytest.approx(nf, rel=1e-12)
