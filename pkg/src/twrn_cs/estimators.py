"""Channel estimators and restricted-isometry tooling.

Three estimators share the measurement model ``y = alpha * X @ theta + n``:

  * :func:`ls_estimate`: plain least squares over all 4L-2 taps;
  * :func:`oracle_estimate`: least squares restricted to the true support
    (an unattainable lower bound used as a benchmark);
  * :func:`cosamp`: greedy sparse recovery alternating correlation-based
    support identification, least squares on the merged support, and
    pruning to the S largest taps.

The module also provides a brute-force restricted isometry constant
computation and the per-iteration recovery error bound it plugs into.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .linalg import (
    RankDeficiencyError,
    as_complex_matrix,
    as_complex_vector,
    as_index_set,
    lstsq,
)
from .link import MeasurementModel


@dataclass(frozen=True)
class EstimatorOutput:
    """Estimate plus bookkeeping shared by all estimators.

    ``theta_hat`` is zero outside ``support_hat`` for the sparse estimators;
    plain least squares reports the full index range.
    """

    theta_hat: np.ndarray
    support_hat: np.ndarray
    iterations: int
    residual_norm: float
    elapsed_seconds: float


@dataclass
class CosampSettings:
    """Knobs for the greedy estimator.

    ``max_iterations`` defaults to ``min(4 * sparsity, 100)``; iteration also
    halts once the residual drops below ``residual_tolerance * ||y||``.
    """

    sparsity: int
    max_iterations: int | None = None
    residual_tolerance: float = 1e-6

    def __post_init__(self):
        if self.sparsity < 1:
            raise ValueError("sparsity must be >= 1")
        if self.max_iterations is None:
            self.max_iterations = min(4 * self.sparsity, 100)
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.residual_tolerance < 0:
            raise ValueError("residual_tolerance must be >= 0")


class CosampFailure(RuntimeError):
    """Raised when the merged-support solve cannot be made full rank.

    Carries the last iterate in ``.theta_hat`` / ``.support_hat``.
    """

    def __init__(self, message: str, theta_hat: np.ndarray, support_hat: np.ndarray):
        self.theta_hat = theta_hat
        self.support_hat = support_hat
        super().__init__(message)


def default_sparsity(channel_sparsity: int) -> int:
    """Sumset bound K(K+1)/2 + K^2 on the composite-channel support size."""
    k = channel_sparsity
    return k * (k + 1) // 2 + k * k


def _top_indices(magnitudes: np.ndarray, count: int) -> np.ndarray:
    # Stable sort: descending magnitude, ties broken by ascending index.
    order = np.argsort(-magnitudes, kind="stable")
    return order[:count]


def ls_estimate(model: MeasurementModel, y) -> EstimatorOutput:
    """Least squares over all taps: ``argmin ||alpha*X @ theta - y||``."""
    y = as_complex_vector(y, "y")
    cols = model.X.shape[1]
    if model.N_tilde < cols:
        raise ValueError(
            f"underdetermined system: {model.N_tilde} rows < {cols} columns"
        )
    a = model.alpha * model.X
    start = time.perf_counter()
    theta_hat = lstsq(a, y)
    elapsed = time.perf_counter() - start
    residual = float(np.linalg.norm(a @ theta_hat - y))
    return EstimatorOutput(
        theta_hat=theta_hat,
        support_hat=np.arange(cols, dtype=np.int64),
        iterations=1,
        residual_norm=residual,
        elapsed_seconds=elapsed,
    )


def oracle_estimate(model: MeasurementModel, y, true_support) -> EstimatorOutput:
    """Least squares restricted to the known support columns, zeros elsewhere."""
    y = as_complex_vector(y, "y")
    cols = model.X.shape[1]
    support = as_index_set(true_support, cols, "true_support")
    if support.size > model.N_tilde:
        raise ValueError(
            f"support size {support.size} exceeds measurement count {model.N_tilde}"
        )
    a = model.alpha * model.X
    start = time.perf_counter()
    theta_hat = np.zeros(cols, dtype=np.complex128)
    if support.size:
        theta_hat[support] = lstsq(a[:, support], y)
    elapsed = time.perf_counter() - start
    residual = float(np.linalg.norm(a @ theta_hat - y))
    return EstimatorOutput(
        theta_hat=theta_hat,
        support_hat=support,
        iterations=1,
        residual_norm=residual,
        elapsed_seconds=elapsed,
    )


def cosamp(model: MeasurementModel, y, settings: CosampSettings) -> EstimatorOutput:
    """Greedy sparse estimation on the relay measurement model."""
    return cosamp_matrix(model.alpha * model.X, y, settings)


def cosamp_matrix(a, y, settings: CosampSettings, on_iterate=None) -> EstimatorOutput:
    """Greedy sparse recovery of theta from ``y = a @ theta + n``.

    Per iteration: correlate the residual against all columns, merge the 2S
    strongest positions with the current support, solve least squares on the
    merged set, prune to the S largest entries, and update the residual.
    Columns are normalized to unit norm internally (so correlation magnitudes
    are comparable) and the scaling is undone on output.

    ``on_iterate``, when given, is called with the pruned estimate (original
    column scaling) after each iteration.

    Raises :class:`CosampFailure` if a rank-deficient merged-support solve
    cannot be repaired by dropping dependent columns.
    """
    a = as_complex_matrix(a, "a")
    y = as_complex_vector(y, "y")
    rows, cols = a.shape
    if rows != y.size:
        raise ValueError(f"row count {rows} != len(y) {y.size}")
    s = settings.sparsity
    if 3 * s > cols:
        raise ValueError(f"sparsity {s} too large: need 3*S <= {cols} columns")
    if rows < 3 * s:
        raise ValueError(f"need at least 3*S = {3 * s} measurements, got {rows}")
    col_norms = np.linalg.norm(a, axis=0)
    if np.any(col_norms == 0):
        raise ValueError("matrix has a zero column")

    start = time.perf_counter()
    an = a / col_norms
    an_h = an.conj().T
    y_norm = float(np.linalg.norm(y))
    theta_n = np.zeros(cols, dtype=np.complex128)
    support = np.zeros(0, dtype=np.int64)
    residual = y.copy()
    residual_norm = y_norm
    iterations = 0

    for _ in range(settings.max_iterations):
        iterations += 1
        proxy_mag = np.abs(an_h @ residual)
        merged = np.union1d(_top_indices(proxy_mag, 2 * s), support)
        active = merged
        while True:
            try:
                coeffs = lstsq(an[:, active], y)
                break
            except RankDeficiencyError:
                if active.size <= 1:
                    raise CosampFailure(
                        "merged-support solve unresolvably rank deficient",
                        theta_hat=theta_n / col_norms,
                        support_hat=support,
                    ) from None
                # Drop the dependent column with the weakest correlation.
                active = np.delete(active, np.argmin(proxy_mag[active]))
        candidate = np.zeros(cols, dtype=np.complex128)
        candidate[active] = coeffs
        support = np.sort(_top_indices(np.abs(candidate), s)).astype(np.int64)
        theta_n = np.zeros(cols, dtype=np.complex128)
        theta_n[support] = candidate[support]
        residual = y - an @ theta_n
        residual_norm = float(np.linalg.norm(residual))
        if on_iterate is not None:
            on_iterate(theta_n / col_norms)
        if residual_norm <= settings.residual_tolerance * y_norm:
            break

    elapsed = time.perf_counter() - start
    return EstimatorOutput(
        theta_hat=theta_n / col_norms,
        support_hat=support,
        iterations=iterations,
        residual_norm=residual_norm,
        elapsed_seconds=elapsed,
    )


# ---------------------------------------------------------------------------
# Restricted isometry tooling
# ---------------------------------------------------------------------------

SUBSET_ENUMERATION_LIMIT = 10**6


@dataclass(frozen=True)
class RipReport:
    """Brute-forced restricted isometry constant of a given order.

    ``delta`` is the maximum over all column subsets of that size of
    ``max(lambda_max - 1, 1 - lambda_min)`` of the unit-column-normalized
    Gram submatrix; ``extremal_subset`` attains it.
    """

    order: int
    delta: float
    extremal_subset: np.ndarray
    subsets_examined: int


def normalize_columns(a) -> np.ndarray:
    """Scale every column to unit l2 norm (error on zero columns)."""
    a = as_complex_matrix(a, "a")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0):
        raise ValueError("matrix has a zero column")
    return a / norms


def restricted_isometry_constant(a, order: int) -> RipReport:
    """Exhaustive restricted isometry constant for small matrices.

    Enumerates every size-``order`` column subset of the column-normalized
    matrix and takes eigenvalue extremes of each Gram submatrix; guarded to
    at most ``SUBSET_ENUMERATION_LIMIT`` subsets.
    """
    a = as_complex_matrix(a, "a")
    cols = a.shape[1]
    if order < 1 or order > cols:
        raise ValueError(f"order must satisfy 1 <= order <= {cols}, got {order}")
    total = math.comb(cols, order)
    if total > SUBSET_ENUMERATION_LIMIT:
        raise ValueError(
            f"{total} subsets exceed the enumeration limit {SUBSET_ENUMERATION_LIMIT}"
        )
    an = normalize_columns(a)
    gram = an.conj().T @ an
    best_delta = -np.inf
    best_subset = None
    examined = 0
    for subset in itertools.combinations(range(cols), order):
        idx = np.asarray(subset, dtype=np.int64)
        eigs = np.linalg.eigvalsh(gram[np.ix_(idx, idx)])
        delta = max(eigs[-1] - 1.0, 1.0 - eigs[0])
        examined += 1
        if delta > best_delta:
            best_delta = delta
            best_subset = idx
    return RipReport(
        order=order,
        delta=float(best_delta),
        extremal_subset=best_subset,
        subsets_examined=examined,
    )


def max_noise_correlation(a, noise, subset_size: int) -> float:
    """Largest ``||a_subset^H @ noise||_2`` over column subsets of a given size.

    The squared norm is additive over columns, so the maximum is the sum of
    the ``subset_size`` largest per-column correlations |<a_j, noise>|^2.
    """
    a = as_complex_matrix(a, "a")
    noise = as_complex_vector(noise, "noise")
    if a.shape[0] != noise.size:
        raise ValueError(f"row count {a.shape[0]} != len(noise) {noise.size}")
    if subset_size < 1 or subset_size > a.shape[1]:
        raise ValueError(f"subset_size must satisfy 1 <= size <= {a.shape[1]}")
    corr = np.abs(a.conj().T @ noise) ** 2
    top = np.sort(corr)[-subset_size:]
    return float(np.sqrt(np.sum(top)))


def cosamp_error_bound(delta_4s: float, prev_error: float, noise_correlation: float) -> float:
    """Per-iteration recovery error bound driven by the order-4S constant.

    Returns ``4*d/(1-4*d)^2 * prev_error + (14-6*d)/(1-4*d)^2 * noise_correlation``
    for ``d = delta_4s``; only applicable while ``delta_4s < 0.25``.
    """
    if not 0.0 <= delta_4s < 0.25:
        raise ValueError(f"bound requires 0 <= delta_4s < 0.25, got {delta_4s}")
    if prev_error < 0 or noise_correlation < 0:
        raise ValueError("prev_error and noise_correlation must be >= 0")
    denom = (1.0 - 4.0 * delta_4s) ** 2
    return (4.0 * delta_4s / denom) * prev_error + (
        (14.0 - 6.0 * delta_4s) / denom
    ) * noise_correlation
