"""Operator-valued BMO and Hardy norm scales on dyadic matrix functions.

Column BMO takes the conditional square function of the martingale
differences above each level; row BMO applies it to the pointwise
adjoint; BMO_cr is their max.  The norm-level BMO (bmo_m_norm) measures
mean oscillation of the pointwise operator norm and dominates BMO_cr.
H^1_max is the integral of the pointwise maximal trace-norm of the
martingale, paired with the norm-level BMO through bg_pairing_check.

Both the martingale form E_m sum_{k>m} (d_k phi)*(d_k phi) and the
interval form (1/|I|) int_I |phi - phi_I|^2 of the column BMO are
implemented; they agree only with the 1/|I| normalization, and the
martingale form is the primary one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DyadicMatrixFunction, _check_shapes, haar_coefficients, level_means
from .linalg import lp_function_norm

__all__ = [
    "NormReport",
    "bmo_norm",
    "bmo_interval_norm",
    "bmo_m_norm",
    "h1_max_norm",
    "bg_pairing_check",
    "doob_check",
]

_BMO_VARIANTS = ("c", "r", "cr")


@dataclass(frozen=True)
class NormReport:
    """A computed norm with the index attaining it (for sup-type norms).

    witness is (level m, interval index) for the BMO scales, None for
    integral-type norms.
    """

    name: str
    value: float
    witness: Optional[tuple] = None


def _batched_opnorm_sq(stack: np.ndarray) -> np.ndarray:
    """Squared operator norms for a stack of matrices."""
    gram = np.conj(np.swapaxes(stack, -1, -2)) @ stack
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    return np.clip(np.linalg.eigvalsh(gram)[..., -1], 0.0, None)


def _batched_psd_opnorm(stack: np.ndarray) -> np.ndarray:
    """Operator norms of Hermitian PSD matrices (their top eigenvalues)."""
    h = (stack + np.conj(np.swapaxes(stack, -1, -2))) / 2.0
    return np.clip(np.linalg.eigvalsh(h)[..., -1], 0.0, None)


def _batched_trace_norm(stack: np.ndarray) -> np.ndarray:
    gram = np.conj(np.swapaxes(stack, -1, -2)) @ stack
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    return np.sqrt(np.clip(np.linalg.eigvalsh(gram), 0.0, None)).sum(axis=-1)


def _column_bmo(phi: DyadicMatrixFunction):
    """max over (m, I) of ||E_m sum_{k>m} (d_k phi)*(d_k phi)||^(1/2)."""
    n, dim = phi.n, phi.dim
    coeffs = haar_coefficients(phi)
    best, witness = 0.0, None
    # running sum of (d_k phi)*(d_k phi), averaged down level by level;
    # the level-k product is constant on level-(k-1) intervals already
    running = None
    for k in range(n, 0, -1):
        g = np.conj(np.swapaxes(coeffs[k - 1], -1, -2)) @ coeffs[k - 1]
        running = g if running is None else running + g
        m = k - 1
        vals = _batched_psd_opnorm(running)  # 2**m intervals
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, witness = float(vals[i]), (m, i)
        if m > 0:
            running = running.reshape(1 << (m - 1), 2, dim, dim).mean(axis=1)
    if running is None:  # n = 0: no differences at all
        return 0.0, None
    return float(np.sqrt(best)), witness


def bmo_norm(phi: DyadicMatrixFunction, variant: str = "cr") -> NormReport:
    """Column ('c'), row ('r') or combined ('cr') dyadic BMO norm.

    Zero exactly when phi is constant.  The row variant is the column
    variant of the pointwise adjoint.
    """
    if variant not in _BMO_VARIANTS:
        raise ValueError(f"variant must be one of {_BMO_VARIANTS}, got {variant!r}")
    if variant == "c":
        value, witness = _column_bmo(phi)
    elif variant == "r":
        value, witness = _column_bmo(phi.star())
    else:
        vc, wc = _column_bmo(phi)
        vr, wr = _column_bmo(phi.star())
        value, witness = (vc, wc) if vc >= vr else (vr, wr)
    return NormReport(f"bmo_{variant}", value, witness)


def bmo_interval_norm(phi: DyadicMatrixFunction, variant: str = "c", normalized: bool = True) -> NormReport:
    """Interval form: sup_I ||(1/|I|)? int_I |phi - phi_I|^2 dt||^(1/2).

    With normalized=True this equals the martingale form of bmo_norm;
    without the 1/|I| factor it does not (kept for comparison).
    """
    if variant not in ("c", "r"):
        raise ValueError(f"variant must be 'c' or 'r', got {variant!r}")
    f = phi if variant == "c" else phi.star()
    n, dim = f.n, f.dim
    means = level_means(f)
    best, witness = 0.0, None
    for m in range(n + 1):
        block = f.values.reshape(1 << m, 1 << (n - m), dim, dim)
        centered = block - means[m][:, np.newaxis]
        sq = np.conj(np.swapaxes(centered, -1, -2)) @ centered
        avg = sq.mean(axis=1)  # (1/|I|) int_I |...|^2
        if not normalized:
            avg = avg * 2.0 ** (-m)
        vals = _batched_psd_opnorm(avg)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, witness = float(vals[i]), (m, i)
    return NormReport(f"bmo_{variant}_interval", float(np.sqrt(best)), witness)


def bmo_m_norm(phi: DyadicMatrixFunction) -> NormReport:
    """Norm-level BMO: sup_I ((1/|I|) int_I ||phi - phi_I||^2 dt)^(1/2).

    The pointwise norm is the matrix operator norm.  Dominates bmo_norm
    with variant 'cr'.
    """
    n, dim = phi.n, phi.dim
    means = level_means(phi)
    best, witness = 0.0, None
    for m in range(n + 1):
        block = phi.values.reshape(1 << m, 1 << (n - m), dim, dim)
        centered = block - means[m][:, np.newaxis]
        osc = _batched_opnorm_sq(centered.reshape(-1, dim, dim)).reshape(1 << m, -1)
        vals = osc.mean(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, witness = float(vals[i]), (m, i)
    return NormReport("bmo_M", float(np.sqrt(best)), witness)


def _maximal_trace_norm(f: DyadicMatrixFunction) -> np.ndarray:
    """Per-atom max over m of ||E_m f||_1 (trace norm)."""
    means = level_means(f)
    running = _batched_trace_norm(means[0])
    for k in range(1, f.n + 1):
        running = np.maximum(np.repeat(running, 2), _batched_trace_norm(means[k]))
    return running


def h1_max_norm(f: DyadicMatrixFunction) -> NormReport:
    """Integral of the martingale maximal function t -> max_m ||E_m f(t)||_1."""
    return NormReport("h1_max", float(np.mean(_maximal_trace_norm(f))), None)


def bg_pairing_check(phi: DyadicMatrixFunction, f: DyadicMatrixFunction) -> float:
    """|integral tr(phi f*)| / (bmo_M(phi) * h1_max(f)).

    The classical BMO / H^1 duality pairing ratio; degenerate inputs
    (constant phi or zero f) are rejected.
    """
    _check_shapes(phi, f)
    denom_phi = bmo_m_norm(phi).value
    denom_f = h1_max_norm(f).value
    if denom_phi == 0.0 or denom_f == 0.0:
        raise ValueError("degenerate input: constant phi or zero f has no pairing ratio")
    numer = abs(np.mean(np.einsum("tij,tij->t", phi.values, np.conj(f.values))))
    return float(numer / (denom_phi * denom_f))


def doob_check(f: DyadicMatrixFunction, p) -> float:
    """Ratio ||max_m ||E_m f||_p||_{L^p(dt)} / ||f||_p for p in (1, inf]."""
    if p != np.inf and float(p) <= 1.0:
        raise ValueError(f"doob_check requires p in (1, inf], got {p}")
    nf = lp_function_norm(f, p)
    if nf == 0.0:
        raise ValueError("zero function has no Doob ratio")
    means = level_means(f)
    running = _batched_schatten(means[0], p)
    for k in range(1, f.n + 1):
        running = np.maximum(np.repeat(running, 2), _batched_schatten(means[k], p))
    if p == np.inf:
        lhs = float(running.max())
    else:
        lhs = float(np.mean(running ** float(p)) ** (1.0 / float(p)))
    return lhs / nf


def _batched_schatten(stack: np.ndarray, p) -> np.ndarray:
    gram = np.conj(np.swapaxes(stack, -1, -2)) @ stack
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    s = np.sqrt(np.clip(np.linalg.eigvalsh(gram), 0.0, None))
    if p == np.inf:
        return s[..., -1]
    return np.sum(s ** float(p), axis=-1) ** (1.0 / float(p))
