"""Analytic sum-MSE of both estimators, the gain between them and its eigenvalue bounds.

With optimal pilots the FD-LS error on each channel has covariance
``2 sigma2 / (N_P (P_S + P_D)) * A``. Projecting onto the ``L``-tap delay
subspace with ``B = F_{NxL} F_{NxL}^H`` replaces ``tr(A) = N`` by ``tr(AB)``,
so the gain is ``gamma = N / tr(AB)``. For a rank-``L`` projector the trace
is sandwiched between the sums of the ``L`` smallest and ``L`` largest
eigenvalues of ``A``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_count, check_positive, check_taps
from .exceptions import DegenerateCovarianceError, DimensionError, ParameterError
from .matrixkit import hermitian_eigvals, projection_matrix, trace_product


@dataclass(frozen=True)
class GainReport:
    """Exact inverse gain ``tr(AB) / N`` and its eigenvalue bounds."""

    N: int
    L: int
    trace_AB: float
    sum_mse_fdls: float
    sum_mse_dft: float
    gamma: float
    inv_gamma: float
    upper_bound_inv_gamma: float
    lower_bound_inv_gamma: float

    @property
    def gamma_db(self):
        return 10.0 * np.log10(self.gamma)

    @property
    def upper_gap(self):
        """Relative distance ``(upper - inv_gamma) / inv_gamma``."""
        return (self.upper_bound_inv_gamma - self.inv_gamma) / self.inv_gamma


def mse_scale(N_P, P_S, P_D, sigma2):
    """Per-subcarrier error variance of each FD-LS channel estimate under optimal pilots."""
    N_P = check_count(N_P, "N_P", minimum=2)
    P_S = check_positive(P_S, "P_S")
    P_D = check_positive(P_D, "P_D")
    sigma2 = check_positive(sigma2, "sigma2", allow_zero=True)
    return 2.0 * sigma2 / (N_P * (P_S + P_D))


def sum_mse_fdls(N, N_P, P_S, P_D, sigma2):
    """``4 N sigma2 / (N_P (P_S + P_D))``; equals ``2 N sigma2 / (P_S + P_D)`` at ``N_P = 2``."""
    N = check_count(N, "N")
    return 2.0 * N * mse_scale(N_P, P_S, P_D, sigma2)


def sum_mse_dft(model, N, L, N_P, P_S, P_D):
    """``4 sigma2 tr(AB) / (N_P (P_S + P_D))`` with ``A`` and ``sigma2`` taken from ``model``."""
    N, L = check_taps(N, L)
    if model.N != N:
        raise DimensionError(f"model has N={model.N}, expected {N}")
    return 2.0 * mse_scale(N_P, P_S, P_D, model.sigma2) * trace_product(model.A, projection_matrix(N, L))


def trace_bounds(eigenvalues, L):
    """``(sum of L smallest, sum of L largest)`` of a nonincreasing eigenvalue list."""
    lam = np.asarray(eigenvalues, dtype=float)
    L = check_count(L, "L")
    if L > lam.size:
        raise DimensionError(f"L={L} exceeds the number of eigenvalues {lam.size}")
    return float(np.sum(lam[lam.size - L:])), float(np.sum(lam[:L]))


def gain_report(model, N, L, N_P=2, P_S=1.0, P_D=1.0):
    """Exact gain ``N / tr(AB)`` and the interlacing bounds on its inverse."""
    N, L = check_taps(N, L)
    if model.N != N:
        raise DimensionError(f"model has N={model.N}, expected {N}")
    tr_ab = trace_product(model.A, projection_matrix(N, L))
    # tr(A) = N, so anything below roundoff of that scale is a zero trace
    if tr_ab <= 1e-12 * N:
        raise DegenerateCovarianceError(f"tr(AB) = {tr_ab:.6g} is not positive")
    lower, upper = trace_bounds(hermitian_eigvals(model.A), L)
    fdls = sum_mse_fdls(N, N_P, P_S, P_D, model.sigma2)
    dft = 2.0 * mse_scale(N_P, P_S, P_D, model.sigma2) * tr_ab
    return GainReport(
        N=N, L=L, trace_AB=tr_ab,
        sum_mse_fdls=fdls, sum_mse_dft=dft,
        gamma=N / tr_ab, inv_gamma=tr_ab / N,
        upper_bound_inv_gamma=upper / N,
        lower_bound_inv_gamma=lower / N,
    )


# ---------------------------------------------------------------------------
# numerical verification of the trace bounds

def haar_unitary(N, rng):
    """Haar-distributed ``N x N`` unitary (QR of a Ginibre matrix with phase fix)."""
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_unit_diagonal_psd(N, rng):
    """Random Hermitian PSD matrix with unit diagonal and random rank in ``[1, N]``."""
    rank = int(rng.integers(1, N + 1))
    G = (rng.standard_normal((N, rank)) + 1j * rng.standard_normal((N, rank))) / np.sqrt(2)
    A = G @ G.conj().T
    d = 1.0 / np.sqrt(np.real(np.diagonal(A)))
    A = A * np.outer(d, d)
    return 0.5 * (A + A.conj().T)


@dataclass
class TraceBoundViolation:
    trial: int
    seed: tuple
    kind: str
    detail: str


@dataclass
class Theorem1Report:
    """Outcome of :func:`verify_theorem1`."""

    N: int
    L: int
    trials: int
    slack: float
    violations: list = field(default_factory=list)
    min_lower_margin: float = np.inf
    min_upper_margin: float = np.inf

    @property
    def passed(self):
        return not self.violations


def check_trace_bounds(A, U, L, slack=1e-9):
    """Check both trace bounds and the interlacing chain for one ``(A, U)`` pair.

    ``B = U[:, :L] U[:, :L]^H``. Returns ``(lower_margin, upper_margin, problems)``
    where margins are ``tr(AB) - lower`` and ``upper - tr(AB)``.
    """
    N = A.shape[0]
    lam = hermitian_eigvals(A)
    lower, upper = trace_bounds(lam, L)
    UL = U[:, :L]
    B = UL @ UL.conj().T
    tr_ab = trace_product(A, B)
    problems = []
    if tr_ab < lower - slack:
        problems.append(("lower", f"tr(AB)={tr_ab!r} < lower={lower!r}"))
    if tr_ab > upper + slack:
        problems.append(("upper", f"tr(AB)={tr_ab!r} > upper={upper!r}"))
    # compressed matrix: leading L x L block of U^H A U
    A11 = UL.conj().T @ A @ UL
    mu = hermitian_eigvals(0.5 * (A11 + A11.conj().T))
    if abs(np.trace(A11).real - tr_ab) > slack * max(1.0, abs(tr_ab)):
        problems.append(("block-trace", f"tr(A11)={np.trace(A11).real!r} != tr(AB)={tr_ab!r}"))
    low_chain = lam[N - L:]
    high_chain = lam[:L]
    bad = np.flatnonzero((mu < low_chain - slack) | (mu > high_chain + slack))
    for i in bad:
        problems.append((
            "interlacing",
            f"i={i + 1}: need {low_chain[i]!r} <= {mu[i]!r} <= {high_chain[i]!r}",
        ))
    return tr_ab - lower, upper - tr_ab, problems


def verify_theorem1(trials, N, L, rng=None, slack=1e-9):
    """Brute-force check of the trace bounds on random ``(A, B)`` pairs.

    Each trial draws a unit-diagonal Hermitian PSD ``A`` and a Haar unitary
    ``U`` from its own seed ``(base_seed, trial)``, so any violation can be
    replayed with ``np.random.default_rng(seed)``.
    """
    trials = check_count(trials, "trials")
    N, L = check_taps(N, L)
    base = _base_seed(rng)
    report = Theorem1Report(N=N, L=L, trials=trials, slack=slack)
    for t in range(trials):
        seed = (base, t)
        trial_rng = np.random.default_rng(seed)
        A = random_unit_diagonal_psd(N, trial_rng)
        U = haar_unitary(N, trial_rng)
        lo, hi, problems = check_trace_bounds(A, U, L, slack)
        report.min_lower_margin = min(report.min_lower_margin, lo)
        report.min_upper_margin = min(report.min_upper_margin, hi)
        for kind, detail in problems:
            report.violations.append(TraceBoundViolation(t, seed, kind, detail))
    return report


# ---------------------------------------------------------------------------
# finite-difference check of d tr(X^-1) / dX = -(X^-2)^T

@dataclass
class GradientCheckReport:
    trials: int
    n: int
    max_rel_error: float
    tol: float
    resamples: int

    @property
    def passed(self):
        return self.max_rel_error <= self.tol


def trace_inverse_gradient(X):
    """Entrywise derivative of ``tr(X^-1)``: ``-(X^-2)^T``."""
    Xinv = np.linalg.inv(X)
    return -(Xinv @ Xinv).T


def finite_difference_gradient(f, X, h):
    """Central differences of ``f`` with respect to every entry ``X[i, j]``."""
    n, m = X.shape
    G = np.empty((n, m), dtype=np.result_type(X, float))
    for i in range(n):
        for j in range(m):
            E = np.zeros_like(X)
            E[i, j] = h
            G[i, j] = (f(X + E) - f(X - E)) / (2 * h)
    return G


def random_hermitian_pd(n, rng, max_cond=1e3, max_retries=100):
    """Random Hermitian positive definite matrix with condition number ``<= max_cond``.

    Returns ``(X, resamples)``.
    """
    for attempt in range(max_retries):
        G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        X = G @ G.conj().T + 0.1 * np.eye(n)
        X = 0.5 * (X + X.conj().T)
        if np.linalg.cond(X) <= max_cond:
            return X, attempt
    raise ParameterError(f"no draw with condition number <= {max_cond:g} in {max_retries} tries")


def verify_trace_inverse_gradient(trials, n, rng=None, tol=1e-5):
    """Compare the closed-form gradient of ``tr(X^-1)`` with central differences.

    The relative error of a trial is the largest entrywise deviation divided
    by the largest entry of the closed-form gradient. The step is
    ``1e-6 * ||X||_2``.
    """
    trials = check_count(trials, "trials")
    n = check_count(n, "n")
    if n > 8:
        raise ParameterError(f"n must be <= 8 for the finite-difference check, got {n}")
    rng = np.random.default_rng(rng)

    def f(Y):
        return np.trace(np.linalg.inv(Y))

    worst = 0.0
    resamples = 0
    for _ in range(trials):
        X, extra = random_hermitian_pd(n, rng)
        resamples += extra
        h = 1e-6 * np.linalg.norm(X, 2)
        exact = trace_inverse_gradient(X)
        approx = finite_difference_gradient(f, X, h)
        worst = max(worst, float(np.max(np.abs(approx - exact)) / np.max(np.abs(exact))))
    return GradientCheckReport(trials, n, worst, tol, resamples)


def _base_seed(rng):
    if rng is None or isinstance(rng, (int, np.integer)):
        return int(np.random.SeedSequence(rng).entropy) if rng is None else int(rng)
    return int(np.random.default_rng(rng).integers(2**63))
