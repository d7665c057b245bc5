"""Seeded random and structured symbol ensembles for the experiments.

Random symbols draw their Haar coefficients as independent complex
Gaussians with level-decaying scale 2**(-k/2); flat scales would make the
BMO norms blow up with resolution and mask the phenomena under study.
Structured members (Rademacher tensors and, when it fits, the sharpness
family) are prepended so every sweep also sees the extremal examples.
"""

from __future__ import annotations

import numpy as np

from .core import DyadicMatrixFunction, HaarExpansion, haar_reconstruct, rademacher, refine
from .constructions import sharpness_function

__all__ = ["random_symbol", "symbol_ensemble", "member_rng"]


def member_rng(seed: int, *key) -> np.random.Generator:
    """Deterministic per-grid-point generator derived from (seed, key)."""
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _cgauss(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_symbol(rng, dim: int, n: int) -> DyadicMatrixFunction:
    """Gaussian Haar coefficients with scale 2**(-k/2) at level k."""
    mean = _cgauss(rng, (dim, dim))
    diffs = []
    for k in range(1, n + 1):
        diffs.append(_cgauss(rng, (1 << (k - 1), dim, dim)) * 2.0 ** (-k / 2.0))
    return haar_reconstruct(HaarExpansion(n, dim, mean, tuple(diffs)))


def _structured_members(dim: int, n: int, rng) -> list:
    out = []
    if n >= 1:
        C = _cgauss(rng, (dim, dim))
        k = 1 + int(rng.integers(n))
        out.append(DyadicMatrixFunction(n, dim, rademacher(k, n).values * C))
    if dim <= n:
        alpha = _cgauss(rng, dim)
        alpha = alpha / np.linalg.norm(alpha)
        out.append(refine(sharpness_function(alpha, n=dim), n))
    return out


def symbol_ensemble(dim: int, n: int, size: int, seed: int, structured: bool = True):
    """Yield `size` symbols: structured members first, then random ones.

    Member i is a deterministic function of (seed, dim, n, i).
    """
    count = 0
    if structured:
        for member in _structured_members(dim, n, member_rng(seed, dim, n, 0)):
            if count >= size:
                return
            yield member
            count += 1
    i = 1
    while count < size:
        yield random_symbol(member_rng(seed, dim, n, i), dim, n)
        count += 1
        i += 1
