"""Sparse multipath channel generation and relay-path channel composition.

A point-to-point channel is a length-L complex tap vector with exactly K
nonzero taps at integer (symbol-spaced) delays.  The end-to-end channels
seen at a terminal after the relay round trip are the self convolution
``b = h1 * h1`` and the cross convolution ``c = h2 * h1``; both have length
``2L - 1`` and are stacked into the composite unknown ``theta = [b; c]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_complex_vector, conv


@dataclass(frozen=True)
class SparseChannel:
    """K-sparse impulse response: ``taps[j] == 0`` exactly for j not in support."""

    taps: np.ndarray      # complex128, length == length
    support: np.ndarray   # int64, ascending positions of the nonzero taps
    length: int
    sparsity: int

    def power(self) -> float:
        """Realized total tap power ``sum |taps|^2``."""
        return float(np.sum(np.abs(self.taps) ** 2))


@dataclass(frozen=True)
class CompositeChannel:
    """Stacked relay-path unknown theta = [b; c] with its exact support."""

    b: np.ndarray         # h1 * h1, length 2L-1
    c: np.ndarray         # h2 * h1, length 2L-1
    theta: np.ndarray     # concatenation [b; c], length 4L-2
    support: np.ndarray   # int64, ascending indices of nonzero theta entries


def random_sparse_channel(length: int, sparsity: int, rng: np.random.Generator) -> SparseChannel:
    """Draw a K-sparse channel with uniformly random support.

    Supported taps are i.i.d. circularly symmetric complex Gaussian with
    variance 1/K so the expected total power is 1; realizations fluctuate
    around that mean (no per-draw renormalization).
    """
    if sparsity < 1 or sparsity > length:
        raise ValueError(f"sparsity must satisfy 1 <= K <= L, got K={sparsity}, L={length}")
    support = np.sort(rng.choice(length, size=sparsity, replace=False)).astype(np.int64)
    taps = np.zeros(length, dtype=np.complex128)
    scale = np.sqrt(1.0 / (2.0 * sparsity))
    taps[support] = scale * (
        rng.standard_normal(sparsity) + 1j * rng.standard_normal(sparsity)
    )
    return SparseChannel(taps=taps, support=support, length=length, sparsity=sparsity)


def compose_channels(h1: SparseChannel, h2: SparseChannel) -> CompositeChannel:
    """Form b = h1*h1, c = h2*h1 and stack them into theta.

    The support is recomputed from exact zeros of theta; with K-sparse
    inputs it has at most K(K+1)/2 + K^2 elements (sumset bound).
    """
    if h1.length != h2.length:
        raise ValueError(f"channel lengths differ: {h1.length} != {h2.length}")
    b = conv(h1.taps, h1.taps)
    c = conv(h2.taps, h1.taps)
    theta = np.concatenate([b, c])
    return CompositeChannel(b=b, c=c, theta=theta, support=support_of(theta, 0.0))


def support_of(v, tol: float) -> np.ndarray:
    """Ascending indices j with ``|v[j]| > tol``."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    v = as_complex_vector(v, "v")
    return np.nonzero(np.abs(v) > tol)[0].astype(np.int64)
