"""Sparse channel estimation and Monte Carlo simulation for
amplify-and-forward two-way relay networks."""

from .channel import (
    CompositeChannel,
    SparseChannel,
    compose_channels,
    random_sparse_channel,
    support_of,
)
from .config import SimConfig, load_config, parse_config
from .estimators import (
    CosampFailure,
    CosampSettings,
    EstimatorOutput,
    RipReport,
    cosamp,
    cosamp_error_bound,
    cosamp_matrix,
    default_sparsity,
    ls_estimate,
    max_noise_correlation,
    oracle_estimate,
    restricted_isometry_constant,
)
from .harness import (
    MseCurve,
    SelfTestReport,
    TimingEntry,
    mse,
    mse_sweep,
    noiseless_selftest,
    run_trial,
    timing_sweep,
    trial_rng,
)
from .linalg import (
    RankDeficiencyError,
    conv,
    hermitian_apply,
    lstsq,
    select_columns,
    toeplitz_conv_matrix,
)
from .link import (
    MeasurementModel,
    ReceivedSignal,
    TrainingPair,
    amplification_factor,
    build_measurement,
    noise_energy_factor,
    random_training,
    random_training_pair,
    synthesize_received,
)

__version__ = "0.1.0"
