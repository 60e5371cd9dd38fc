"""Training-phase synthesis for the amplify-and-forward two-way relay link.

Both terminals transmit known training sequences through the relay, which
scales the superposition by a power-normalizing gain ``alpha`` and
rebroadcasts it.  Stacking the two Toeplitz convolution matrices of the
training sequences gives the linear model

    y = alpha * X @ theta + noise,        X = [X1 | X2],

where the noise is the sum of the relay noise convolved with the return
channel (colored) and white terminal noise.

Conventions (recorded in every output file header):
  * training sequences are scaled to unit average per-symbol power,
    ``||x||^2 == N`` exactly;
  * SNR is defined at the receiving terminal as
    ``10*log10(||alpha*X@theta||^2 / E||noise||^2)``, with the per-sample
    noise variance solved per realization from that identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import CompositeChannel, SparseChannel
from .linalg import as_complex_vector, toeplitz_conv_matrix


@dataclass(frozen=True)
class TrainingPair:
    """Training sequences transmitted by the two terminals (equal length N)."""

    x1: np.ndarray
    x2: np.ndarray


@dataclass(frozen=True)
class MeasurementModel:
    """Stacked measurement operator for one training block.

    ``X1 @ v == conv(x1, v)`` and ``X2 @ v == conv(x2, v)`` for every v of
    length 2L-1; X is their horizontal concatenation with N_tilde = N + 2L - 2
    rows and 4L - 2 columns.
    """

    X1: np.ndarray
    X2: np.ndarray
    X: np.ndarray
    alpha: float
    N: int
    L: int
    N_tilde: int


@dataclass(frozen=True)
class ReceivedSignal:
    """Observed training-phase signal along with its noiseless part."""

    y: np.ndarray
    noiseless: np.ndarray
    noise_variance: float   # per complex sample, shared by relay and terminal noise
    snr_db: float


def random_training(n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. circularly symmetric Gaussian sequence rescaled to ``||x||^2 == n``."""
    if n < 1:
        raise ValueError("training length must be >= 1")
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return x * (np.sqrt(n) / np.linalg.norm(x))


def random_training_pair(n: int, rng: np.random.Generator) -> TrainingPair:
    """Independent training sequences for the two terminals (x1 drawn first)."""
    return TrainingPair(x1=random_training(n, rng), x2=random_training(n, rng))


def amplification_factor(
    p1: float, p2: float, pr: float,
    var_h1: float, var_h2: float, var_n: float,
) -> float:
    """Relay gain ``sqrt(Pr / (var_h1*P1 + var_h2*P2 + var_n))``."""
    for name, value in (("p1", p1), ("p2", p2), ("pr", pr),
                        ("var_h1", var_h1), ("var_h2", var_h2), ("var_n", var_n)):
        if not value > 0:
            raise ValueError(f"{name} must be > 0, got {value}")
    return math.sqrt(pr / (var_h1 * p1 + var_h2 * p2 + var_n))


def build_measurement(x1, x2, channel_len: int, alpha: float) -> MeasurementModel:
    """Assemble X = [X1 | X2] from the two training sequences."""
    x1 = as_complex_vector(x1, "x1")
    x2 = as_complex_vector(x2, "x2")
    if x1.size != x2.size:
        raise ValueError(f"training lengths differ: {x1.size} != {x2.size}")
    if x1.size < 1:
        raise ValueError("training length must be >= 1")
    if channel_len < 1:
        raise ValueError("channel length must be >= 1")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    cols = 2 * channel_len - 1
    X1 = toeplitz_conv_matrix(x1, cols)
    X2 = toeplitz_conv_matrix(x2, cols)
    n = x1.size
    return MeasurementModel(
        X1=X1, X2=X2, X=np.hstack([X1, X2]),
        alpha=float(alpha), N=n, L=channel_len, N_tilde=n + 2 * channel_len - 2,
    )


def noise_energy_factor(model: MeasurementModel, h1: SparseChannel) -> float:
    """E||noise||^2 / sigma^2 for the colored relay + white terminal noise.

    Each of the N+L-1 relay noise samples passes through h1, contributing
    ``alpha^2 * ||h1||^2`` on average, and the N_tilde terminal samples
    contribute 1 each.
    """
    return model.alpha**2 * (model.N + model.L - 1) * h1.power() + model.N_tilde


def synthesize_received(
    model: MeasurementModel,
    channels: CompositeChannel,
    h1: SparseChannel,
    snr_db: float,
    rng: np.random.Generator,
    noiseless: bool = False,
) -> ReceivedSignal:
    """Simulate one training-phase observation at the given receiver SNR.

    The relay noise (N+L-1 samples) is drawn first, then the terminal noise
    (N_tilde samples), both i.i.d. CN(0, sigma^2) with sigma^2 solved from
    the realized noiseless energy so that
    ``||noiseless||^2 / E||noise||^2`` matches ``snr_db``.  Passing
    ``noiseless=True`` (or ``snr_db = inf``) skips the noise entirely.
    """
    if h1.length != model.L:
        raise ValueError(f"h1 length {h1.length} != model channel length {model.L}")
    if channels.theta.size != model.X.shape[1]:
        raise ValueError(
            f"theta length {channels.theta.size} != model columns {model.X.shape[1]}"
        )
    clean = model.alpha * (model.X @ channels.theta)
    if noiseless or math.isinf(snr_db):
        return ReceivedSignal(y=clean.copy(), noiseless=clean,
                              noise_variance=0.0, snr_db=snr_db)
    sigma2 = float(np.sum(np.abs(clean) ** 2)) / (
        10.0 ** (snr_db / 10.0) * noise_energy_factor(model, h1)
    )
    scale = np.sqrt(sigma2 / 2.0)
    m_relay = model.N + model.L - 1
    n_relay = scale * (rng.standard_normal(m_relay) + 1j * rng.standard_normal(m_relay))
    n_term = scale * (
        rng.standard_normal(model.N_tilde) + 1j * rng.standard_normal(model.N_tilde)
    )
    noise = model.alpha * np.convolve(n_relay, h1.taps) + n_term
    return ReceivedSignal(y=clean + noise, noiseless=clean,
                          noise_variance=sigma2, snr_db=snr_db)
