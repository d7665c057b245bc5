"""Matrix-valued dyadic step functions and their martingale calculus.

Functions live on [0, 1) with Lebesgue measure and the dyadic filtration:
level k partitions [0, 1) into 2**k equal intervals, in left-to-right
order.  A function at resolution n is constant on each of the 2**n atoms
and takes N x N complex matrix values.  Conditional expectation onto
level k averages over level-k intervals; martingale differences are
d_k = E_k - E_{k-1}.  The Haar sign convention is + on the left child
and - on the right child, matching the Rademacher functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DyadicMatrixFunction",
    "HaarExpansion",
    "conditional_expectation",
    "martingale_difference",
    "haar_decompose",
    "haar_reconstruct",
    "rademacher",
    "square_function",
    "refine",
    "constant_function",
    "zero_function",
    "pointwise_product",
    "level_means",
    "haar_coefficients",
]


@dataclass(frozen=True, eq=False)
class DyadicMatrixFunction:
    """A step function on [0, 1), constant on 2**n dyadic atoms.

    Attributes:
        n: resolution; the function is constant on each of the 2**n atoms.
        dim: matrix dimension N.
        values: complex array of shape (2**n, N, N); values[j] is the value
            on atom [j * 2**-n, (j+1) * 2**-n).

    Instances are immutable; the value array is marked read-only.
    """

    n: int
    dim: int
    values: np.ndarray

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"resolution must be >= 0, got {self.n}")
        if self.dim < 1:
            raise ValueError(f"matrix dimension must be >= 1, got {self.dim}")
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        expected = (1 << self.n, self.dim, self.dim)
        if vals.shape != expected:
            raise ValueError(f"values must have shape {expected}, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def atoms(self) -> int:
        return 1 << self.n

    def star(self) -> "DyadicMatrixFunction":
        """Pointwise conjugate transpose t -> f(t)*."""
        return DyadicMatrixFunction(self.n, self.dim, np.conj(np.swapaxes(self.values, -1, -2)))

    def __add__(self, other):
        _check_shapes(self, other)
        return DyadicMatrixFunction(self.n, self.dim, self.values + other.values)

    def __sub__(self, other):
        _check_shapes(self, other)
        return DyadicMatrixFunction(self.n, self.dim, self.values - other.values)

    def __mul__(self, scalar):
        return DyadicMatrixFunction(self.n, self.dim, self.values * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return DyadicMatrixFunction(self.n, self.dim, -self.values)


@dataclass(frozen=True, eq=False)
class HaarExpansion:
    """Lossless Haar-coefficient representation of a DyadicMatrixFunction.

    Attributes:
        n: resolution of the represented function.
        dim: matrix dimension N.
        mean: N x N matrix, the global mean (level-0 expectation).
        diffs: tuple of n arrays; diffs[k-1] has shape (2**(k-1), N, N) and
            entry i is the matrix C with d_k f = +C on the left child and
            -C on the right child of the i-th level-(k-1) interval.
    """

    n: int
    dim: int
    mean: np.ndarray
    diffs: tuple

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.complex128, copy=True)
        if mean.shape != (self.dim, self.dim):
            raise ValueError(f"mean must be {self.dim}x{self.dim}, got {mean.shape}")
        mean.setflags(write=False)
        diffs = []
        if len(self.diffs) != self.n:
            raise ValueError(f"expected {self.n} difference levels, got {len(self.diffs)}")
        for k, d in enumerate(self.diffs, start=1):
            d = np.array(d, dtype=np.complex128, copy=True)
            expected = (1 << (k - 1), self.dim, self.dim)
            if d.shape != expected:
                raise ValueError(f"level-{k} diffs must have shape {expected}, got {d.shape}")
            d.setflags(write=False)
            diffs.append(d)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "diffs", tuple(diffs))


def _check_shapes(f: DyadicMatrixFunction, g: DyadicMatrixFunction):
    if f.n != g.n or f.dim != g.dim:
        raise ValueError(
            f"shape mismatch: (n={f.n}, dim={f.dim}) vs (n={g.n}, dim={g.dim})"
        )


def constant_function(matrix, n: int = 0) -> DyadicMatrixFunction:
    """The function identically equal to `matrix`, at resolution n."""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    vals = np.broadcast_to(m, (1 << n, m.shape[0], m.shape[1]))
    return DyadicMatrixFunction(n, m.shape[0], vals)


def zero_function(n: int, dim: int) -> DyadicMatrixFunction:
    return DyadicMatrixFunction(n, dim, np.zeros((1 << n, dim, dim), dtype=np.complex128))


def pointwise_product(f: DyadicMatrixFunction, g: DyadicMatrixFunction) -> DyadicMatrixFunction:
    """t -> f(t) @ g(t)."""
    _check_shapes(f, g)
    return DyadicMatrixFunction(f.n, f.dim, f.values @ g.values)


def level_means(f: DyadicMatrixFunction) -> list:
    """Values of E_k f on its own level-k grid, for k = 0..n.

    Returns a list of arrays; entry k has shape (2**k, N, N).  Entry n is
    f's own value array, entry 0 the global mean.
    """
    out = [None] * (f.n + 1)
    cur = f.values
    out[f.n] = cur
    for k in range(f.n, 0, -1):
        cur = cur.reshape(1 << (k - 1), 2, f.dim, f.dim).mean(axis=1)
        out[k - 1] = cur
    return out


def _expand(coarse: np.ndarray, reps: int) -> np.ndarray:
    """Repeat each block row `reps` times (coarse grid -> finer grid)."""
    if reps == 1:
        return coarse
    return np.repeat(coarse, reps, axis=0)


def conditional_expectation(f: DyadicMatrixFunction, k: int) -> DyadicMatrixFunction:
    """E_k f: average of f over each level-k dyadic interval.

    The result is returned at f's resolution (constant on level-k blocks).
    """
    if not 0 <= k <= f.n:
        raise ValueError(f"level k must be in [0, {f.n}], got {k}")
    coarse = level_means(f)[k]
    return DyadicMatrixFunction(f.n, f.dim, _expand(coarse, 1 << (f.n - k)))


def martingale_difference(f: DyadicMatrixFunction, k: int) -> DyadicMatrixFunction:
    """d_k f = E_k f - E_{k-1} f, for 1 <= k <= n."""
    if not 1 <= k <= f.n:
        raise ValueError(f"level k must be in [1, {f.n}], got {k}")
    means = level_means(f)
    fine_k = _expand(means[k], 1 << (f.n - k))
    fine_km1 = _expand(means[k - 1], 1 << (f.n - k + 1))
    return DyadicMatrixFunction(f.n, f.dim, fine_k - fine_km1)


def haar_coefficients(f: DyadicMatrixFunction) -> list:
    """Per-level difference coefficients of f.

    Returns a list of n arrays; entry k-1 has shape (2**(k-1), N, N) and
    holds the value of d_k f on the left child of each level-(k-1)
    interval (the right child carries the opposite sign).
    """
    means = level_means(f)
    coeffs = []
    for k in range(1, f.n + 1):
        pairs = means[k].reshape(1 << (k - 1), 2, f.dim, f.dim)
        coeffs.append((pairs[:, 0] - pairs[:, 1]) / 2.0)
    return coeffs


def haar_decompose(f: DyadicMatrixFunction) -> HaarExpansion:
    """Change of representation to mean + per-level Haar coefficients."""
    means = level_means(f)
    return HaarExpansion(f.n, f.dim, means[0][0], tuple(haar_coefficients(f)))


def haar_reconstruct(h: HaarExpansion) -> DyadicMatrixFunction:
    """Inverse of haar_decompose."""
    cur = h.mean[np.newaxis, :, :]
    for k in range(1, h.n + 1):
        d = h.diffs[k - 1]
        children = np.stack([cur + d, cur - d], axis=1)
        cur = children.reshape(1 << k, h.dim, h.dim)
    return DyadicMatrixFunction(h.n, h.dim, cur)


def rademacher(k: int, n: int) -> DyadicMatrixFunction:
    """The k-th Rademacher function as a scalar (N=1) step function.

    +1 on the left child and -1 on the right child of every level-(k-1)
    interval; constant on level-k atoms.  Requires 1 <= k <= n.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    j = np.arange(1 << n)
    signs = 1.0 - 2.0 * ((j >> (n - k)) & 1)
    return DyadicMatrixFunction(n, 1, signs.astype(np.complex128).reshape(-1, 1, 1))


def square_function(f: DyadicMatrixFunction) -> DyadicMatrixFunction:
    """Pointwise PSD square root of sum_k (d_k f)* (d_k f)."""
    acc = np.zeros_like(f.values)
    means = level_means(f)
    for k in range(1, f.n + 1):
        fine_k = _expand(means[k], 1 << (f.n - k))
        fine_km1 = _expand(means[k - 1], 1 << (f.n - k + 1))
        d = fine_k - fine_km1
        acc += np.conj(np.swapaxes(d, -1, -2)) @ d
    # acc is Hermitian PSD per atom up to rounding; take its PSD root
    acc = (acc + np.conj(np.swapaxes(acc, -1, -2))) / 2.0
    w, v = np.linalg.eigh(acc)
    w = np.sqrt(np.clip(w, 0.0, None))
    root = (v * w[..., np.newaxis, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return DyadicMatrixFunction(f.n, f.dim, root)


def refine(f: DyadicMatrixFunction, n_new: int) -> DyadicMatrixFunction:
    """The same function represented at a finer resolution n_new >= n."""
    if n_new < f.n:
        raise ValueError(f"cannot refine to coarser resolution {n_new} < {f.n}")
    return DyadicMatrixFunction(n_new, f.dim, _expand(f.values, 1 << (n_new - f.n)))
