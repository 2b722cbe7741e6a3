"""Colored interference-plus-noise models.

The stacked noise of ``N_P`` pilot symbols has covariance
``sigma2 * kron(I_{N_P}, A)``: independent across OFDM symbols, correlated
across subcarriers through the unit-diagonal matrix ``A``. The power
``sigma2`` is applied once (not once per Kronecker factor).
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from ._validation import as_complex_vector, check_count, check_hermitian, check_positive
from .exceptions import DimensionError, NotPSDError, ParameterError
from .matrixkit import psd_sqrt


@dataclass(frozen=True, eq=False)
class InterferenceModel:
    """Normalized frequency covariance ``A`` and power ``sigma2``.

    ``sqrtA`` is the Hermitian PSD square root used by the sampler; it is
    computed once at construction.
    """

    A: np.ndarray
    sigma2: float = 1.0
    name: str = "custom"
    sqrtA: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = check_hermitian(self.A, "A")
        if not np.allclose(np.diag(A), 1.0, rtol=0, atol=1e-9):
            raise ParameterError("A must have unit diagonal")
        sigma2 = check_positive(self.sigma2, "sigma2")
        A = A.copy()
        A.setflags(write=False)
        root = psd_sqrt(A)
        root.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "sqrtA", root)

    @property
    def N(self):
        return self.A.shape[0]

    @property
    def covariance(self):
        """Frequency-domain covariance ``R_w = sigma2 * A``."""
        return self.sigma2 * self.A


def exponential_model(N, rho, sigma2=1.0):
    """``A[i, j] = rho ** |i - j|`` for ``0 <= rho <= 1``."""
    N = check_count(N, "N")
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho}")
    # numpy gives 0.0 ** 0 == 1.0, so rho == 0 yields the identity
    A = toeplitz(rho ** np.arange(N))
    return InterferenceModel(A, sigma2, name=f"exponential(rho={rho:g})")


def identity_model(N, sigma2=1.0):
    N = check_count(N, "N")
    return InterferenceModel(np.eye(N), sigma2, name="identity")


def all_ones_model(N, sigma2=1.0):
    N = check_count(N, "N")
    return InterferenceModel(np.ones((N, N)), sigma2, name="all-ones")


def toeplitz_model(r, sigma2=1.0):
    """Hermitian Toeplitz model from the first column ``r`` (``A[i, j] = r[i - j]``).

    ``r[0]`` must equal 1. Raises :class:`NotPSDError` naming the most
    negative eigenvalue when the resulting matrix is not PSD.
    """
    r = as_complex_vector(r, "r")
    if abs(r[0] - 1.0) > 1e-9:
        raise ParameterError(f"r[0] must be 1, got {r[0]}")
    r = r.copy()
    r[0] = 1.0
    # scipy's toeplitz conjugates the first row argument, giving r(-k) = r(k)*
    A = toeplitz(r)
    try:
        return InterferenceModel(A, sigma2, name="toeplitz")
    except NotPSDError as exc:
        raise NotPSDError(
            f"Toeplitz sequence does not define a PSD covariance "
            f"(most negative eigenvalue {exc.min_eigenvalue:.6g})",
            min_eigenvalue=exc.min_eigenvalue,
        ) from None


def complex_gaussian(rng, shape, var=1.0):
    """Circular complex Gaussian samples with ``E|z|^2 = var``."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_noise_block(model, N_P, rng=None, size=None):
    """Draw ``N_P`` independent noise vectors with covariance ``sigma2 * A``.

    Parameters
    ----------
    model : InterferenceModel
    N_P : int
        Number of pilot OFDM symbols.
    rng : numpy.random.Generator or seed, optional
    size : int, optional
        If given, draw a batch and prepend an axis of this length.

    Returns
    -------
    ndarray, shape (N_P, N) or (size, N_P, N)
        Row ``p`` is the noise on OFDM symbol ``p``.
    """
    N_P = check_count(N_P, "N_P")
    rng = np.random.default_rng(rng)
    lead = (N_P,) if size is None else (check_count(size, "size"), N_P)
    g = complex_gaussian(rng, lead + (model.N,))
    # w_p = sqrtA @ g_p on every row; sqrtA is Hermitian so sqrtA.T == conj(sqrtA)
    return np.sqrt(model.sigma2) * (g @ model.sqrtA.T)


def model_from_spec(kind, N, sigma2=1.0, rho=None, r=None):
    """Build a model from a short textual kind: identity, all-ones, exponential, toeplitz."""
    kind = kind.lower().replace("_", "-")
    if kind == "identity":
        return identity_model(N, sigma2)
    if kind in ("all-ones", "ones"):
        return all_ones_model(N, sigma2)
    if kind == "exponential":
        if rho is None:
            raise ParameterError("exponential model requires rho")
        return exponential_model(N, rho, sigma2)
    if kind == "toeplitz":
        if r is None:
            raise ParameterError("toeplitz model requires the sequence r")
        if len(r) != N:
            raise DimensionError(f"toeplitz sequence has length {len(r)}, expected N={N}")
        return toeplitz_model(r, sigma2)
    raise ParameterError(f"unknown interference model kind {kind!r}")
