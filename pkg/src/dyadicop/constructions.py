"""Explicit extremal objects: Hilbert matrix, triangular truncation, corners.

The antisymmetric Hilbert matrix has uniformly bounded operator norm while
its triangular truncation grows like log(N+1); the rank-one row Gram
family g_k built from it converts that gap into a lower bound for the
best constant in the corner-projection majorant inequality.  The
sharpness_function builds the Rademacher-driven matrix function whose
martingale squares are (conjugated) corner projections of a rank-one
matrix.

Indexing follows the 1-based row/column convention of the constructions
(stored 0-based internally).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DyadicMatrixFunction, HaarExpansion, haar_reconstruct

__all__ = [
    "hilbert_matrix",
    "triangle_projection",
    "corner_projection",
    "CornerProjection",
    "sharpness_function",
    "gk_family",
]


def hilbert_matrix(N: int) -> np.ndarray:
    """Antisymmetric Hilbert matrix: 1/(j - i) off the diagonal, 0 on it."""
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    idx = np.arange(N)
    diff = idx[np.newaxis, :] - idx[:, np.newaxis]
    with np.errstate(divide="ignore"):
        h = np.where(diff != 0, 1.0 / np.where(diff != 0, diff, 1), 0.0)
    return h


def triangle_projection(A) -> np.ndarray:
    """Keep entries on or below the diagonal (column <= row), zero the rest.

    This orientation makes stacking the corner-projected rows of the
    Hilbert matrix reproduce T h row by row.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got shape {A.shape}")
    return np.tril(A)


def corner_projection(A, m: int) -> np.ndarray:
    """Keep the leading m x m corner, zero all other entries."""
    A = np.asarray(A)
    N = A.shape[0]
    if not 1 <= m <= N:
        raise ValueError(f"corner size must be in [1, {N}], got {m}")
    out = np.zeros_like(A)
    out[:m, :m] = A[:m, :m]
    return out


@dataclass(frozen=True)
class CornerProjection:
    """The map A -> corner_projection(A, size); idempotent."""

    size: int

    def __call__(self, A) -> np.ndarray:
        return corner_projection(A, self.size)


def sharpness_function(alpha, n: int = None) -> DyadicMatrixFunction:
    """Matrix function with martingale differences alpha_k r_k e_{1,k}.

    alpha is a complex vector of length N; the function has dimension N
    and resolution n >= N (default N).  Its k-th difference is the matrix
    supported on entry (row 1, column k) with value alpha_k r_k(t), so
    ||f||_2 equals ||alpha||_2 exactly.
    """
    alpha = np.asarray(alpha, dtype=np.complex128).reshape(-1)
    N = alpha.shape[0]
    if N < 1:
        raise ValueError("alpha must be nonempty")
    if n is None:
        n = N
    if n < N:
        raise ValueError(f"need resolution n >= {N} to host {N} difference levels, got {n}")
    diffs = []
    for k in range(1, n + 1):
        d = np.zeros((1 << (k - 1), N, N), dtype=np.complex128)
        if k <= N:
            # d_k f = alpha_k r_k e_{1,k}: on the left child of every
            # level-(k-1) interval the value is +alpha_k e_{1,k}
            d[:, 0, k - 1] = alpha[k - 1]
        diffs.append(d)
    return haar_reconstruct(HaarExpansion(n, N, np.zeros((N, N)), tuple(diffs)))


def gk_family(N: int) -> list:
    """PSD rank-<=1 family g_k = h_k* h_k from the rows of the Hilbert matrix.

    h_k keeps only row k of hilbert_matrix(N); the family sums to h* h.
    """
    h = hilbert_matrix(N)
    out = []
    for k in range(N):
        row = h[k : k + 1, :]  # 1 x N
        out.append(row.T.conj() @ row)
    return out
