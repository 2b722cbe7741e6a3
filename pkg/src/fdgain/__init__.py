"""Sum-MSE gain of DFT-based LS over frequency-domain LS channel estimation
in full-duplex OFDM with colored interference."""
from .analysis import GainReport, gain_report, sum_mse_dft, sum_mse_fdls, verify_theorem1
from .channel import ChannelPair, cfr_to_cir, cir_to_cfr, sample_channel_pair
from .estimators import (
    DFTProjection,
    FDLSEstimator,
    dft_estimate,
    estimate,
    fdls_estimate,
    simulate_received,
)
from .interference import (
    InterferenceModel,
    all_ones_model,
    exponential_model,
    identity_model,
    sample_noise_block,
    toeplitz_model,
)
from .montecarlo import ExperimentConfig, run_experiment, sweep_ratio, sweep_rho
from .pilot import PilotBlock, is_optimal, mse_k, optimal_pilot_block

__version__ = "0.1.0"
