"""Complex linear algebra kernels: convolution, Toeplitz convolution matrices,
rank-checked least squares, and column selection.

All routines work on 1-D/2-D complex128 numpy arrays and are pure functions;
inputs are never mutated.
"""

from __future__ import annotations

import numpy as np

# Relative threshold below which the smallest singular value marks the
# system as numerically rank deficient.
RANK_RCOND = 1e-10


class RankDeficiencyError(ValueError):
    """Least-squares matrix is numerically rank deficient.

    Carries the detected numerical rank in ``.rank``.
    """

    def __init__(self, rank: int, cols: int):
        self.rank = int(rank)
        self.cols = int(cols)
        super().__init__(
            f"matrix is rank deficient: numerical rank {rank} < {cols} columns"
        )


def as_complex_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_index_set(indices, ambient: int, name: str = "index set") -> np.ndarray:
    """Coerce to a strictly increasing int64 index array bounded by ``ambient``."""
    idx = np.asarray(indices, dtype=np.int64)
    if idx.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    if idx.size:
        if idx.min() < 0 or idx.max() >= ambient:
            raise ValueError(f"{name} has entries outside [0, {ambient})")
        if np.any(np.diff(idx) <= 0):
            raise ValueError(f"{name} must be strictly increasing with no duplicates")
    return idx


def conv(a, b) -> np.ndarray:
    """Full linear convolution of two complex vectors.

    Output length is ``len(a) + len(b) - 1`` with
    ``conv(a, b)[k] = sum_j a[j] * b[k - j]``.
    """
    a = as_complex_vector(a, "a")
    b = as_complex_vector(b, "b")
    if a.size == 0 or b.size == 0:
        raise ValueError("conv requires nonempty inputs")
    return np.convolve(a, b)


def toeplitz_conv_matrix(x, num_cols: int) -> np.ndarray:
    """Toeplitz matrix T such that ``T @ v == conv(x, v)`` for len(v) == num_cols.

    Column j is ``x`` shifted down by j rows, zero padded; the result has
    shape ``(len(x) + num_cols - 1, num_cols)``.
    """
    x = as_complex_vector(x, "x")
    if x.size == 0:
        raise ValueError("toeplitz_conv_matrix requires a nonempty sequence")
    if num_cols < 1:
        raise ValueError("num_cols must be >= 1")
    n = x.size
    out = np.zeros((n + num_cols - 1, num_cols), dtype=np.complex128)
    for j in range(num_cols):
        out[j : j + n, j] = x
    return out


def lstsq(a, y) -> np.ndarray:
    """Minimizer of ||a @ theta - y||_2 for a full-column-rank matrix.

    Solved through an orthogonal (QR) factorization, not normal equations;
    raises :class:`RankDeficiencyError` when the smallest R-diagonal
    magnitude falls below ``RANK_RCOND`` times the largest (the error's
    ``.rank`` carries the count of retained diagonal entries).
    """
    a = as_complex_matrix(a, "a")
    y = as_complex_vector(y, "y")
    rows, cols = a.shape
    if rows != y.size:
        raise ValueError(f"row count {rows} != len(y) {y.size}")
    if cols == 0:
        return np.zeros(0, dtype=np.complex128)
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    largest = diag.max() if diag.size else 0.0
    rank = int(np.count_nonzero(diag >= RANK_RCOND * largest)) if largest > 0 else 0
    if rows < cols or rank < cols:
        raise RankDeficiencyError(rank, cols)
    return np.linalg.solve(r, q.conj().T @ y)


def hermitian_apply(a, r) -> np.ndarray:
    """Conjugate transpose applied to a vector: ``a^H @ r``."""
    a = as_complex_matrix(a, "a")
    r = as_complex_vector(r, "r")
    if a.shape[0] != r.size:
        raise ValueError(f"row count {a.shape[0]} != len(r) {r.size}")
    return a.conj().T @ r


def select_columns(a, indices) -> np.ndarray:
    """Submatrix of the given columns, in index order."""
    a = as_complex_matrix(a, "a")
    idx = as_index_set(indices, a.shape[1], "column index set")
    return a[:, idx]
