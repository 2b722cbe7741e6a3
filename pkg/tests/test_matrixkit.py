import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdgain.exceptions import DimensionError, NotHermitianError, NotPSDError
from fdgain.matrixkit import (
    dft_matrix,
    dft_tall,
    hermitian_eig,
    projection_matrix,
    psd_sqrt,
    trace_product,
)


def test_dft_small_cases():
    np.testing.assert_allclose(dft_matrix(1), [[1.0]])
    np.testing.assert_allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    # W = exp(-j pi/2) = -j, column n=1 holds W^m
    np.testing.assert_allclose(dft_matrix(4)[:, 1], 0.5 * np.array([1, -1j, -1, 1j]), atol=1e-15)


def test_dft_matches_numpy_fft():
    N = 12
    x = np.random.default_rng(3).standard_normal(N)
    np.testing.assert_allclose(dft_matrix(N) @ x, np.fft.fft(x, norm="ortho"), atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 7, 64, 255, 256])
def test_dft_unitary(N):
    F = dft_matrix(N)
    assert np.linalg.norm(F.conj().T @ F - np.eye(N)) <= 1e-10 * np.sqrt(N)


def test_dft_tall():
    np.testing.assert_allclose(dft_tall(4, 4), dft_matrix(4))
    F = dft_tall(4, 2)
    np.testing.assert_allclose(F.conj().T @ F, np.eye(2), atol=1e-12)
    F = dft_tall(8, 3)
    # trace of F F^H by explicit multiplication
    assert abs(np.trace(F @ F.conj().T) - 3) < 1e-12
    with pytest.raises(DimensionError):
        dft_tall(4, 5)


@pytest.mark.parametrize("N,L", [(8, 1), (8, 3), (16, 16), (64, 16)])
def test_projection_idempotent(N, L):
    B = projection_matrix(N, L)
    np.testing.assert_allclose(B @ B, B, atol=1e-9)
    assert abs(np.trace(B).real - L) < 1e-9
    lam = hermitian_eig(B).eigenvalues
    np.testing.assert_allclose(lam, [1.0] * L + [0.0] * (N - L), atol=1e-9)


def test_hermitian_eig_examples():
    np.testing.assert_allclose(hermitian_eig(np.eye(3)).eigenvalues, [1, 1, 1])
    np.testing.assert_allclose(hermitian_eig(np.ones((4, 4))).eigenvalues, [4, 0, 0, 0], atol=1e-12)


def test_hermitian_eig_exponential_3x3_against_characteristic_polynomial():
    a, b = 0.5, 0.25
    A = np.array([[1, a, b], [a, 1, a], [b, a, 1]])
    # det(A - x I) for this symmetric Toeplitz matrix, expanded by hand:
    # -(x^3) + 3x^2 - (3 - 2a^2 - b^2)x + (1 - 2a^2 - b^2 + 2a^2 b)
    coeffs = [-1.0, 3.0, -(3 - 2 * a**2 - b**2), 1 - 2 * a**2 - b**2 + 2 * a**2 * b]
    roots = np.sort(np.roots(coeffs).real)[::-1]
    np.testing.assert_allclose(hermitian_eig(A).eigenvalues, roots, rtol=1e-10)
    # antisymmetric eigenvector (1, 0, -1) gives 1 - b
    assert np.any(np.isclose(roots, 1 - b))


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        hermitian_eig(np.ones((2, 3)))


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return G + G.conj().T


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 24), seed=st.integers(0, 2**32 - 1))
def test_hermitian_eig_invariants(n, seed):
    A = random_hermitian(n, seed)
    lam, U = hermitian_eig(A)
    assert np.all(np.diff(lam) <= 0)
    assert np.linalg.norm((U * lam) @ U.conj().T - A) <= 1e-10 * np.linalg.norm(A)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-10 * np.sqrt(n)
    assert abs(lam.sum() - np.trace(A).real) <= 1e-9 * max(abs(np.trace(A)), 1.0)


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(5)), np.eye(5), atol=1e-12)
    np.testing.assert_allclose(psd_sqrt(4 * np.eye(2)), 2 * np.eye(2), atol=1e-12)
    S = psd_sqrt(np.ones((4, 4)))
    np.testing.assert_allclose(S, 0.5 * np.ones((4, 4)), atol=1e-12)
    np.testing.assert_allclose(S @ S.conj().T, np.ones((4, 4)), atol=1e-12)


def test_psd_sqrt_rejects_indefinite():
    with pytest.raises(NotPSDError) as info:
        psd_sqrt(np.diag([1.0, -0.5]))
    assert info.value.min_eigenvalue == pytest.approx(-0.5)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 16), rank=st.integers(1, 16), seed=st.integers(0, 2**32 - 1))
def test_psd_sqrt_reconstructs_rank_deficient(n, rank, seed):
    rng = np.random.default_rng(seed)
    rank = min(rank, n)
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    A = G @ G.conj().T
    S = psd_sqrt(A)
    assert np.linalg.norm(S @ S.conj().T - A) <= 1e-8 * np.linalg.norm(A)


def test_trace_product_examples():
    N, L = 32, 5
    B = projection_matrix(N, L)
    C = random_hermitian(N, 1)
    assert trace_product(np.eye(N), C) == pytest.approx(np.trace(C).real)
    assert trace_product(np.eye(N), B) == pytest.approx(L, abs=1e-9)
    assert trace_product(np.ones((N, N)), B) == pytest.approx(N, abs=1e-9)
    with pytest.raises(DimensionError):
        trace_product(np.eye(2), np.eye(3))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 20), seed=st.integers(0, 2**32 - 1))
def test_trace_product_commutes_and_matches_dense(n, seed):
    A = random_hermitian(n, seed)
    B = random_hermitian(n, seed + 1)
    t = trace_product(A, B)
    assert t == pytest.approx(trace_product(B, A), rel=1e-12, abs=1e-12)
    assert t == pytest.approx(np.trace(A @ B).real, rel=1e-10, abs=1e-10)
