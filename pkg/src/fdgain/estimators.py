"""Frequency-domain LS and DFT-based LS channel estimators.

The functional core (:func:`fdls_estimate`, :func:`dft_estimate`) operates on
arrays and broadcasts over leading batch axes. :class:`FDLSEstimator` and
:class:`DFTProjection` wrap it in the scikit-learn transformer API so the two
stages compose in a :class:`sklearn.pipeline.Pipeline`::

    pipe = make_pipeline(FDLSEstimator(block.pilots), DFTProjection(n_taps=L, n_subcarriers=N))
    H_tilde = pipe.fit_transform(Y.reshape(n_frames, -1))
"""
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_taps
from .exceptions import DimensionError, RankError
from .matrixkit import dft_tall
from .pilot import PilotBlock, _is_singular, is_optimal


@dataclass(frozen=True, eq=False)
class ReceivedBlock:
    """Received pilot symbols ``y`` of shape ``(N_P, N)`` and the pilots that produced them."""

    y: np.ndarray
    block: PilotBlock

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex)
        if y.shape[-2:] != (self.block.N_P, self.block.N):
            raise DimensionError(
                f"y has shape {y.shape}, expected (..., {self.block.N_P}, {self.block.N})"
            )
        object.__setattr__(self, "y", y)


@dataclass(frozen=True, eq=False)
class EstimationOutcome:
    """Both estimates of both channels and their squared errors against the truth."""

    H_hat_SD: np.ndarray
    H_hat_DD: np.ndarray
    H_tilde_SD: np.ndarray
    H_tilde_DD: np.ndarray
    sq_err_fdls_SD: float
    sq_err_fdls_DD: float
    sq_err_dft_SD: float
    sq_err_dft_DD: float

    @property
    def sq_err_fdls(self):
        return self.sq_err_fdls_SD + self.sq_err_fdls_DD

    @property
    def sq_err_dft(self):
        return self.sq_err_dft_SD + self.sq_err_dft_DD


def received_signal(H_SD, H_DD, block, noise):
    """``y[p, k] = x_S[p, k] H_SD[k] + x_D[p, k] H_DD[k] + w[p, k]``.

    ``H_SD``/``H_DD`` may carry leading batch axes ``(..., N)``; ``noise`` is
    ``(..., N_P, N)``.
    """
    H_SD = np.asarray(H_SD, dtype=complex)
    H_DD = np.asarray(H_DD, dtype=complex)
    noise = np.asarray(noise, dtype=complex)
    N, N_P = block.N, block.N_P
    if H_SD.shape[-1] != N or H_DD.shape[-1] != N:
        raise DimensionError(f"channel length must equal the pilot block's N={N}")
    if noise.shape[-2:] != (N_P, N):
        raise DimensionError(f"noise has shape {noise.shape}, expected (..., {N_P}, {N})")
    signal = block.x_S * H_SD[..., None, :] + block.x_D * H_DD[..., None, :]
    return signal + noise


def simulate_received(channels, block, noise):
    """Apply the per-subcarrier two-channel model to one pilot block."""
    if channels.N != block.N:
        raise DimensionError(f"channel has N={channels.N} subcarriers, pilots have N={block.N}")
    return ReceivedBlock(received_signal(channels.H_SD, channels.H_DD, block, noise), block)


def _matched_filter(y, block):
    """``P_k^H y_k`` for every subcarrier, shape ``(..., N, 2)``."""
    return np.einsum("kpc,...pk->...kc", block.pilots.conj(), y)


def ls_solve(y, block, fast=None):
    """Per-subcarrier LS solution ``(P_k^H P_k)^-1 P_k^H y_k``.

    Parameters
    ----------
    y : ndarray, shape (..., N_P, N)
    block : PilotBlock
    fast : bool, optional
        Use the scaled matched filter ``P_k^H y_k / (N_P (P_S + P_D) / 2)``.
        Only valid for optimal blocks; by default it is used exactly when
        :func:`is_optimal` passes.

    Returns
    -------
    ndarray, shape (..., N, 2)
        Column 0 is the S2D estimate, column 1 the D2D estimate.
    """
    if fast is None:
        fast = bool(is_optimal(block))
    elif fast and not is_optimal(block):
        raise ValueError("the matched-filter shortcut requires an optimal pilot block")
    z = _matched_filter(y, block)
    if fast:
        return z / block.target_gram_scale
    gram = block.gram()
    singular = np.flatnonzero(_is_singular(gram))
    if singular.size:
        k = int(singular[0])
        raise RankError(f"pilot Gram matrix is singular at subcarrier {k}", subcarrier=k)
    return np.einsum("kcd,...kd->...kc", np.linalg.inv(gram), z)


def fdls_estimate(rx, fast=None):
    """Frequency-domain LS estimates ``(H_hat_SD, H_hat_DD)`` from a :class:`ReceivedBlock`."""
    H = ls_solve(rx.y, rx.block, fast=fast)
    return H[..., 0], H[..., 1]


def dft_estimate(H_hat, L):
    """Project ``H_hat`` onto the span of the first ``L`` DFT columns.

    Equivalent to an inverse DFT, truncation to ``L`` taps and a forward DFT.
    Broadcasts over leading axes of ``H_hat``.
    """
    H_hat = np.asarray(H_hat, dtype=complex)
    N, L = check_taps(H_hat.shape[-1], L)
    F = dft_tall(N, L)
    taps = H_hat @ F.conj()
    return taps @ F.T


def estimate(rx, channels, L):
    """Run both estimators on one received block and score them against ``channels``."""
    H_hat_SD, H_hat_DD = fdls_estimate(rx)
    H_tilde_SD = dft_estimate(H_hat_SD, L)
    H_tilde_DD = dft_estimate(H_hat_DD, L)

    def sq(a, b):
        return float(np.sum(np.abs(a - b) ** 2))

    return EstimationOutcome(
        H_hat_SD, H_hat_DD, H_tilde_SD, H_tilde_DD,
        sq(H_hat_SD, channels.H_SD), sq(H_hat_DD, channels.H_DD),
        sq(H_tilde_SD, channels.H_SD), sq(H_tilde_DD, channels.H_DD),
    )


class FDLSEstimator(TransformerMixin, BaseEstimator):
    """Frequency-domain LS channel estimator as a scikit-learn transformer.

    Each sample is one received pilot block flattened to ``N_P * N``
    complex values (row-major ``(N_P, N)``). The output row is
    ``[H_hat_SD, H_hat_DD]`` of length ``2 N``.

    Parameters
    ----------
    pilots : array_like, shape (N, N_P, 2)
        Pilot matrices ``P_k`` for every subcarrier.
    P_S, P_D : float
        Node powers; only used to decide whether the pilots are optimal.
    """

    def __init__(self, pilots, P_S=1.0, P_D=1.0):
        self.pilots = pilots
        self.P_S = P_S
        self.P_D = P_D

    def fit(self, X=None, y=None):
        """Validate the pilots. The LS estimator has nothing to learn."""
        block = PilotBlock(self.pilots, self.P_S, self.P_D)
        ls_solve(np.zeros((block.N_P, block.N)), block)
        self.block_ = block
        self.n_subcarriers_ = block.N
        self.optimal_ = bool(is_optimal(block))
        self.n_features_in_ = block.N_P * block.N
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X):
        # sklearn's check_array rejects complex input, so validate by hand
        X = np.asarray(X, dtype=complex)
        if X.ndim != 2:
            raise DimensionError(f"expected a 2-D array of flattened pilot blocks, got {X.shape}")
        expected = self.block_.N_P * self.block_.N
        if X.shape[1] != expected:
            raise DimensionError(f"each row must have N_P*N={expected} entries, got {X.shape[1]}")
        if not np.all(np.isfinite(X)):
            raise ValueError("input contains NaN or infinity")
        return X

    def transform(self, X):
        check_is_fitted(self, "block_")
        X = self._check_X(X)
        y = X.reshape(X.shape[0], self.block_.N_P, self.block_.N)
        H = ls_solve(y, self.block_)
        return np.concatenate([H[..., 0], H[..., 1]], axis=1)

    def score(self, X, y):
        """Negative mean squared error per frame against true ``[H_SD, H_DD]`` rows."""
        err = self.transform(X) - np.asarray(y, dtype=complex)
        return -float(np.mean(np.sum(np.abs(err) ** 2, axis=1)))


class DFTProjection(TransformerMixin, BaseEstimator):
    """Delay-domain truncation of frequency responses as a scikit-learn transformer.

    Each row is split into blocks of ``n_subcarriers`` entries and every
    block is projected onto the first ``n_taps`` DFT columns.

    Parameters
    ----------
    n_taps : int
        Number of delay taps kept (the CP length ``L``).
    n_subcarriers : int, optional
        Block length ``N``. Defaults to the full row width at ``fit``.
    """

    def __init__(self, n_taps, n_subcarriers=None):
        self.n_taps = n_taps
        self.n_subcarriers = n_subcarriers

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=complex)
        if X.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {X.shape}")
        N = X.shape[1] if self.n_subcarriers is None else self.n_subcarriers
        N, L = check_taps(N, self.n_taps)
        if X.shape[1] % N:
            raise DimensionError(f"row width {X.shape[1]} is not a multiple of N={N}")
        self.n_subcarriers_ = N
        self.n_features_in_ = X.shape[1]
        self.basis_ = dft_tall(N, L)
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        X = np.asarray(X, dtype=complex)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise DimensionError(f"expected shape (n, {self.n_features_in_}), got {X.shape}")
        blocks = X.reshape(X.shape[0], -1, self.n_subcarriers_)
        F = self.basis_
        out = (blocks @ F.conj()) @ F.T
        return out.reshape(X.shape)
