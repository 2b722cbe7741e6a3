"""Pilot matrices for joint estimation of the intended and self-interference channels.

On subcarrier ``k`` the ``N_P`` pilot symbols of the source and of the
destination form an ``N_P x 2`` matrix ``P_k``. Under a total power budget
``tr(P_k^H P_k) <= N_P (P_S + P_D)`` the LS error ``sigma2 tr((P_k^H P_k)^-1)``
is minimized by orthogonal columns of equal energy,
``P_k^H P_k = N_P (P_S + P_D) / 2 * I_2``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_count, check_positive
from .exceptions import DimensionError, ParameterError, RankError
from .matrixkit import dft_matrix


class PowerCapWarning(UserWarning):
    """The trace-optimal pilot exceeds one node's individual power cap."""


@dataclass(frozen=True, eq=False)
class PilotBlock:
    """Per-subcarrier pilot matrices.

    Attributes
    ----------
    pilots : ndarray, shape (N, N_P, 2)
        ``pilots[k]`` is ``P_k``; column 0 holds the source symbols and
        column 1 the destination symbols.
    P_S, P_D : float
        Average per-subcarrier powers of source and destination.
    """

    pilots: np.ndarray
    P_S: float
    P_D: float

    def __post_init__(self):
        pilots = np.array(self.pilots, dtype=complex)
        if pilots.ndim != 3 or pilots.shape[2] != 2 or pilots.shape[0] < 1:
            raise DimensionError(f"pilots must have shape (N, N_P, 2), got {pilots.shape}")
        if pilots.shape[1] < 2:
            raise ParameterError(
                "at least two pilot OFDM symbols are needed: with N_P < 2 the "
                "two-channel system is under-determined"
            )
        pilots.setflags(write=False)
        object.__setattr__(self, "pilots", pilots)
        object.__setattr__(self, "P_S", check_positive(self.P_S, "P_S"))
        object.__setattr__(self, "P_D", check_positive(self.P_D, "P_D"))

    @property
    def N(self):
        return self.pilots.shape[0]

    @property
    def N_P(self):
        return self.pilots.shape[1]

    @property
    def x_S(self):
        """Source pilot symbols, shape (N_P, N)."""
        return self.pilots[:, :, 0].T

    @property
    def x_D(self):
        """Destination pilot symbols, shape (N_P, N)."""
        return self.pilots[:, :, 1].T

    @property
    def target_gram_scale(self):
        """``N_P (P_S + P_D) / 2``, the diagonal of an optimal Gram matrix."""
        return self.N_P * (self.P_S + self.P_D) / 2.0

    def gram(self):
        """``P_k^H P_k`` for every subcarrier, shape (N, 2, 2)."""
        P = self.pilots
        return np.einsum("kpi,kpj->kij", P.conj(), P)

    def is_shared(self):
        """True when every subcarrier uses the same pilot matrix."""
        return bool(np.all(self.pilots == self.pilots[:1]))


@dataclass(frozen=True)
class OptimalityCheck:
    """Result of :func:`is_optimal`; truthy when the block is optimal."""

    optimal: bool
    max_deviation: float
    worst_subcarrier: int
    source_energy: float
    destination_energy: float
    source_cap: float
    destination_cap: float

    def __bool__(self):
        return self.optimal

    @property
    def caps_respected(self):
        """Whether the per-node energy caps ``N_P P_S`` and ``N_P P_D`` hold."""
        eps = 1e-9 * max(self.source_cap, self.destination_cap)
        return (self.source_energy <= self.source_cap + eps
                and self.destination_energy <= self.destination_cap + eps)


def optimal_pilot_block(N, N_P, P_S, P_D):
    """Optimal pilot block built from the first two columns of the N_P-point DFT.

    The same ``P_k`` is used on every subcarrier. When ``P_S != P_D`` the
    equal split of the total budget exceeds the weaker node's own cap and a
    :class:`PowerCapWarning` is emitted; the block is still returned.
    """
    N = check_count(N, "N")
    N_P = check_count(N_P, "N_P", minimum=1)
    if N_P < 2:
        raise ParameterError(
            "at least two pilot OFDM symbols are needed: with N_P < 2 the "
            "two-channel system is under-determined"
        )
    P_S = check_positive(P_S, "P_S")
    P_D = check_positive(P_D, "P_D")
    scale = N_P * (P_S + P_D) / 2.0
    if scale > N_P * min(P_S, P_D) * (1 + 1e-12):
        warnings.warn(
            f"optimal pilot energy {scale:g} per node exceeds the weaker node's "
            f"cap {N_P * min(P_S, P_D):g}",
            PowerCapWarning,
            stacklevel=2,
        )
    P = np.sqrt(scale) * dft_matrix(N_P)[:, :2]
    return PilotBlock(np.broadcast_to(P, (N, N_P, 2)), P_S, P_D)


def qam16_example_pilot(P_S=1.0, P_D=1.0):
    """A 4x2 pilot built on one 16QAM point; its columns are orthogonal with equal energy."""
    c = np.sqrt(P_S + P_D) * (1 + 3j) / (2 * np.sqrt(5))
    return c * np.array([[1, 1], [1, 1], [1, -1], [1, -1]], dtype=complex)


def is_optimal(block, tol=1e-9):
    """Check ``P_k^H P_k == N_P (P_S + P_D) / 2 * I_2`` on every subcarrier.

    ``tol`` is relative to the target scale and compared against the
    Frobenius-norm deviation.
    """
    target = block.target_gram_scale
    dev = np.linalg.norm(block.gram() - target * np.eye(2), axis=(1, 2))
    worst = int(np.argmax(dev))
    energy = np.einsum("kpi,kpi->ki", block.pilots.conj(), block.pilots).real
    return OptimalityCheck(
        optimal=bool(dev[worst] <= tol * target),
        max_deviation=float(dev[worst]),
        worst_subcarrier=worst,
        source_energy=float(energy[:, 0].max()),
        destination_energy=float(energy[:, 1].max()),
        source_cap=block.N_P * block.P_S,
        destination_cap=block.N_P * block.P_D,
    )


def mse_k(P_k, sigma2):
    """LS error ``sigma2 * tr((P_k^H P_k)^-1)`` on one subcarrier."""
    P_k = np.asarray(P_k, dtype=complex)
    if P_k.ndim != 2 or P_k.shape[1] != 2:
        raise DimensionError(f"P_k must have shape (N_P, 2), got {P_k.shape}")
    X = P_k.conj().T @ P_k
    if _is_singular(X):
        raise RankError("pilot Gram matrix is singular")
    return float(sigma2 * np.trace(np.linalg.inv(X)).real)


def optimal_mse_k(N_P, P_S, P_D, sigma2):
    """Minimum of :func:`mse_k` under the total power budget: ``4 sigma2 / (N_P (P_S + P_D))``."""
    return 4.0 * sigma2 / (N_P * (P_S + P_D))


def _is_singular(X, rtol=1e-12):
    X = np.asarray(X)
    scale = np.abs(np.trace(X, axis1=-2, axis2=-1)) / 2
    det = np.abs(np.linalg.det(X))
    return (det <= rtol * scale**2) | (scale == 0)
