"""Input validation helpers shared by the numerical modules."""
import numbers

import numpy as np

from .exceptions import DimensionError, NotHermitianError, ParameterError


def as_complex_matrix(A, name="A", square=False):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    return A


def as_complex_vector(x, name="x"):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.size < 1:
        raise DimensionError(f"{name} must be a non-empty 1-D vector, got shape {x.shape}")
    return x


def check_hermitian(A, name="A", rtol=1e-9):
    A = as_complex_matrix(A, name, square=True)
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > rtol * max(scale, np.finfo(float).tiny):
        raise NotHermitianError(f"{name} is not Hermitian within relative tolerance {rtol:g}")
    return A


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_taps(N, L):
    """Validate a (subcarriers, taps) pair, ``1 <= L <= N``."""
    N = check_count(N, "N")
    L = check_count(L, "L")
    if L > N:
        raise DimensionError(f"L={L} taps cannot exceed N={N} subcarriers")
    return N, L


def check_positive(value, name, allow_zero=False):
    value = float(value)
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ParameterError(f"{name} must be finite and {bound}, got {value}")
    return value
