"""Multipath channels: impulse responses and their frequency responses."""
from dataclasses import dataclass

import numpy as np

from ._validation import as_complex_vector, check_count, check_taps
from .exceptions import DimensionError
from .matrixkit import dft_tall


@dataclass(frozen=True, eq=False)
class ChannelPair:
    """Ground-truth source-to-destination and self-interference channels.

    Attributes
    ----------
    h_SD, h_DD : ndarray, shape (L,)
        Channel impulse responses (taps).
    H_SD, H_DD : ndarray, shape (N,)
        Frequency responses, ``F_{NxL} @ h``.
    """

    h_SD: np.ndarray
    h_DD: np.ndarray
    H_SD: np.ndarray
    H_DD: np.ndarray

    @property
    def N(self):
        return self.H_SD.shape[-1]

    @property
    def L(self):
        return self.h_SD.shape[-1]

    @classmethod
    def from_taps(cls, h_SD, h_DD, N):
        h_SD = as_complex_vector(h_SD, "h_SD")
        h_DD = as_complex_vector(h_DD, "h_DD")
        if h_SD.shape != h_DD.shape:
            raise DimensionError("h_SD and h_DD must have the same number of taps")
        return cls(h_SD, h_DD, cir_to_cfr(h_SD, N), cir_to_cfr(h_DD, N))


def cir_to_cfr(h, N):
    """Frequency response on ``N`` subcarriers of an ``L``-tap impulse response.

    Works on the last axis, so a batch of shape ``(..., L)`` maps to ``(..., N)``.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim < 1 or h.shape[-1] < 1:
        raise DimensionError(f"h must have at least one tap, got shape {h.shape}")
    F = dft_tall(N, h.shape[-1])
    return h @ F.T


def cfr_to_cir(H, L):
    """First ``L`` taps of the inverse DFT of ``H`` (last axis)."""
    H = np.asarray(H, dtype=complex)
    if H.ndim < 1 or H.shape[-1] < 1:
        raise DimensionError(f"H must have at least one subcarrier, got shape {H.shape}")
    F = dft_tall(H.shape[-1], L)
    return H @ F.conj()


def sample_taps(L, rng, size=()):
    """I.i.d. circular Gaussian taps, variance ``1/L`` each (unit total power)."""
    L = check_count(L, "L")
    rng = np.random.default_rng(rng)
    shape = (size if isinstance(size, tuple) else (int(size),)) + (L,)
    scale = np.sqrt(0.5 / L)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel_pair(N, L, rng=None):
    """Draw an independent Rayleigh S2D/D2D channel pair with uniform delay profile."""
    N, L = check_taps(N, L)
    rng = np.random.default_rng(rng)
    h_SD = sample_taps(L, rng)
    h_DD = sample_taps(L, rng)
    return ChannelPair.from_taps(h_SD, h_DD, N)
