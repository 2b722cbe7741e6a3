"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects with complex dtype. The
eigendecomposition is returned with eigenvalues in *nonincreasing* order
(largest first), which is the ordering the trace bounds in
:mod:`fdgain.analysis` are written against.
"""
from typing import NamedTuple

import numpy as np

from ._validation import as_complex_matrix, check_count, check_hermitian, check_taps
from .exceptions import DimensionError, NotPSDError


class HermitianEig(NamedTuple):
    """Eigenvalues (real, nonincreasing) and unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def dft_matrix(N):
    """Unitary N-point DFT matrix.

    Entry ``(m, n)`` (zero based) is ``exp(-2j*pi*m*n/N) / sqrt(N)``.
    """
    N = check_count(N, "N")
    idx = np.arange(N)
    # reduce the exponent mod N before scaling so large N stays accurate
    phase = np.outer(idx, idx) % N
    return np.exp(-2j * np.pi * phase / N) / np.sqrt(N)


def dft_tall(N, L):
    """First ``L`` columns of :func:`dft_matrix`, shape ``(N, L)``.

    The columns are orthonormal, so ``F.conj().T @ F == I_L``.
    """
    N, L = check_taps(N, L)
    m = np.arange(N)[:, None]
    n = np.arange(L)[None, :]
    return np.exp(-2j * np.pi * ((m * n) % N) / N) / np.sqrt(N)


def projection_matrix(N, L):
    """Rank-``L`` orthogonal projector ``F_{NxL} F_{NxL}^H`` onto the delay subspace."""
    F = dft_tall(N, L)
    return F @ F.conj().T


def hermitian_eig(A):
    """Eigendecomposition of a Hermitian matrix, largest eigenvalue first.

    Parameters
    ----------
    A : array_like, shape (N, N)
        Hermitian matrix. Asymmetry beyond ``1e-9 * ||A||_F`` is rejected.

    Returns
    -------
    HermitianEig
        ``eigenvalues`` sorted nonincreasing and the matching unitary
        ``eigenvectors`` (one per column).
    """
    A = check_hermitian(A)
    # symmetrize to stop LAPACK from reading only one triangle of a noisy input
    A = 0.5 * (A + A.conj().T)
    w, U = np.linalg.eigh(A)
    return HermitianEig(w[::-1].copy(), U[:, ::-1].copy())


def hermitian_eigvals(A):
    """Eigenvalues only, nonincreasing."""
    A = check_hermitian(A)
    return np.linalg.eigvalsh(0.5 * (A + A.conj().T))[::-1].copy()


def psd_sqrt(A, rtol=1e-9):
    """Hermitian PSD square root ``S`` with ``S @ S^H == A``.

    Eigenvalues with ``|lambda| <= rtol * lambda_max`` are treated as exact
    zeros so that rank-deficient covariances (e.g. the all-ones matrix) are
    accepted and their null space carries no roundoff energy.
    """
    eig = hermitian_eig(A)
    lam = eig.eigenvalues
    lam_max = max(lam[0], 0.0)
    if lam[-1] < -rtol * lam_max or (lam_max == 0.0 and lam[-1] < 0.0):
        raise NotPSDError(
            f"matrix is not positive semi-definite: most negative eigenvalue {lam[-1]:.6g}",
            min_eigenvalue=float(lam[-1]),
        )
    lam = np.where(np.abs(lam) <= rtol * lam_max, 0.0, lam)
    root = np.sqrt(lam)
    U = eig.eigenvectors
    return (U * root) @ U.conj().T


def trace_product(A, B):
    """``Re tr(A @ B)`` computed in O(N^2) without forming the product."""
    A = as_complex_matrix(A, "A", square=True)
    B = as_complex_matrix(B, "B", square=True)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch: {A.shape} vs {B.shape}")
    return float(np.sum(A * B.T).real)
