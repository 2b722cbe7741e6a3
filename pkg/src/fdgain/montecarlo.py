"""Monte Carlo trial engine and parameter sweeps.

Trials are processed in fixed-size chunks. Chunk ``c`` draws all of its
randomness from ``default_rng((seed, c))``, so results depend only on the
configuration and seed, never on the number of worker threads or the order
in which chunks finish.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import check_count, check_positive, check_taps
from .analysis import GainReport, gain_report
from .channel import sample_taps
from .estimators import ls_solve, received_signal
from .exceptions import ParameterError
from .interference import model_from_spec, sample_noise_block
from .matrixkit import dft_tall
from .pilot import optimal_pilot_block

log = logging.getLogger(__name__)

CHUNK_SIZE = 512


@dataclass(frozen=True)
class ExperimentConfig:
    N: int = 64
    L: int = 8
    N_P: int = 2
    P_S: float = 1.0
    P_D: float = 1.0
    sigma2: float = 1.0
    model: str = "exponential"
    rho: float = 0.0
    r: tuple = None
    trials: int = 20000
    seed: int = 0

    def __post_init__(self):
        check_taps(self.N, self.L)
        check_count(self.N_P, "N_P", minimum=2)
        check_count(self.trials, "trials")
        check_positive(self.P_S, "P_S")
        check_positive(self.P_D, "P_D")
        check_positive(self.sigma2, "sigma2")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ParameterError(f"seed must be a non-negative integer, got {self.seed!r}")

    def build_model(self):
        return model_from_spec(self.model, self.N, self.sigma2, rho=self.rho, r=self.r)


@dataclass(frozen=True)
class ExperimentResult:
    """Empirical sum-MSEs with standard errors, next to the analytic values."""

    config: ExperimentConfig
    analytic: GainReport
    sum_mse_fdls: float
    sum_mse_fdls_se: float
    sum_mse_dft: float
    sum_mse_dft_se: float
    mse_fdls_SD: float
    mse_fdls_DD: float
    mse_dft_SD: float
    mse_dft_DD: float
    per_trial: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def empirical_gamma(self):
        """Ratio of mean sum-MSEs (a ratio of expectations, not a mean of ratios)."""
        return self.sum_mse_fdls / self.sum_mse_dft

    @property
    def empirical_inv_gamma(self):
        return self.sum_mse_dft / self.sum_mse_fdls

    def summary(self):
        return {
            "N": self.config.N,
            "L": self.config.L,
            "N_P": self.config.N_P,
            "model": self.config.model,
            "rho": self.config.rho,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "sum_mse_fdls": self.sum_mse_fdls,
            "sum_mse_fdls_se": self.sum_mse_fdls_se,
            "sum_mse_dft": self.sum_mse_dft,
            "sum_mse_dft_se": self.sum_mse_dft_se,
            "analytic_sum_mse_fdls": self.analytic.sum_mse_fdls,
            "analytic_sum_mse_dft": self.analytic.sum_mse_dft,
            "empirical_gamma": self.empirical_gamma,
            "analytic_gamma": self.analytic.gamma,
            "upper_inv_gamma": self.analytic.upper_bound_inv_gamma,
            "lower_inv_gamma": self.analytic.lower_bound_inv_gamma,
        }


# columns of the per-trial error array
TRIAL_COLUMNS = ("fdls_SD", "fdls_DD", "dft_SD", "dft_DD")


def _run_chunk(cfg, model, block, F, chunk, size):
    rng = np.random.default_rng((cfg.seed, chunk))
    h = sample_taps(cfg.L, rng, size=(size, 2))
    H = h @ F.T  # (size, 2, N)
    w = sample_noise_block(model, cfg.N_P, rng, size=size)
    y = received_signal(H[:, 0], H[:, 1], block, w)
    H_hat = np.moveaxis(ls_solve(y, block), -1, -2)  # (size, 2, N)
    H_tilde = (H_hat @ F.conj()) @ F.T
    err = np.empty((size, 4))
    err[:, 0:2] = np.sum(np.abs(H_hat - H) ** 2, axis=-1)
    err[:, 2:4] = np.sum(np.abs(H_tilde - H) ** 2, axis=-1)
    return err


def run_experiment(cfg, n_jobs=1, keep_trials=False):
    """Simulate ``cfg.trials`` independent frames and compare against the analytic values.

    Parameters
    ----------
    cfg : ExperimentConfig
    n_jobs : int
        Worker threads. The result is bit-identical for every value.
    keep_trials : bool
        Attach the ``(trials, 4)`` per-trial squared errors (columns
        :data:`TRIAL_COLUMNS`) to the result.
    """
    model = cfg.build_model()
    block = optimal_pilot_block(cfg.N, cfg.N_P, cfg.P_S, cfg.P_D)
    F = dft_tall(cfg.N, cfg.L)
    sizes = [min(CHUNK_SIZE, cfg.trials - start) for start in range(0, cfg.trials, CHUNK_SIZE)]
    log.debug("running %d trials in %d chunks on %d threads", cfg.trials, len(sizes), n_jobs)

    if n_jobs == 1:
        parts = [_run_chunk(cfg, model, block, F, c, s) for c, s in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda cs: _run_chunk(cfg, model, block, F, *cs), enumerate(sizes)))
    err = np.concatenate(parts)

    fdls = err[:, 0] + err[:, 1]
    dft = err[:, 2] + err[:, 3]
    # np.sum / np.mean use pairwise summation along contiguous axes
    means = err.mean(axis=0)
    n = cfg.trials

    def se(x):
        return float(np.std(x, ddof=1) / np.sqrt(n)) if n > 1 else float("nan")

    return ExperimentResult(
        config=cfg,
        analytic=gain_report(model, cfg.N, cfg.L, cfg.N_P, cfg.P_S, cfg.P_D),
        sum_mse_fdls=float(np.mean(fdls)),
        sum_mse_fdls_se=se(fdls),
        sum_mse_dft=float(np.mean(dft)),
        sum_mse_dft_se=se(dft),
        mse_fdls_SD=float(means[0]),
        mse_fdls_DD=float(means[1]),
        mse_dft_SD=float(means[2]),
        mse_dft_DD=float(means[3]),
        per_trial=err if keep_trials else None,
    )


def _check_rho(rho):
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ParameterError(f"rho must lie in [0, 1], got {rho}")
    return rho


def sweep_rho(cfg_base, rho_grid, analytic_only=True, n_jobs=1):
    """One row per ``rho`` under the exponential model at fixed ``N`` and ``L``.

    Rows carry ``rho, inv_gamma, upper, lower, N, L`` and, unless
    ``analytic_only``, the Monte Carlo columns ``empirical_inv_gamma``,
    ``sum_mse_fdls`` and ``sum_mse_dft``.
    """
    rows = []
    for rho in rho_grid:
        cfg = replace(cfg_base, model="exponential", rho=_check_rho(rho))
        rep = gain_report(cfg.build_model(), cfg.N, cfg.L, cfg.N_P, cfg.P_S, cfg.P_D)
        row = {
            "rho": cfg.rho,
            "inv_gamma": rep.inv_gamma,
            "upper": rep.upper_bound_inv_gamma,
            "lower": rep.lower_bound_inv_gamma,
            "N": cfg.N,
            "L": cfg.L,
        }
        if not analytic_only:
            res = run_experiment(cfg, n_jobs=n_jobs)
            row.update(
                empirical_inv_gamma=res.empirical_inv_gamma,
                sum_mse_fdls=res.sum_mse_fdls,
                sum_mse_dft=res.sum_mse_dft,
            )
        rows.append(row)
    return rows


def sweep_ratio(cfg_base, N_list, rho):
    """One row per ``N`` at fixed ``L`` and ``rho``: ``N, L, log2_ratio, inv_gamma, upper, lower, rho``."""
    rho = _check_rho(rho)
    rows = []
    for N in N_list:
        cfg = replace(cfg_base, N=int(N), model="exponential", rho=rho)
        rep = gain_report(cfg.build_model(), cfg.N, cfg.L, cfg.N_P, cfg.P_S, cfg.P_D)
        rows.append({
            "N": cfg.N,
            "L": cfg.L,
            "log2_ratio": float(np.log2(cfg.N / cfg.L)),
            "inv_gamma": rep.inv_gamma,
            "upper": rep.upper_bound_inv_gamma,
            "lower": rep.lower_bound_inv_gamma,
            "rho": rho,
        })
    return rows
