"""Dense Hermitian/complex matrix kernels: spectra, Schatten norms, pairings.

Hermitian eigendecomposition is the single spectral primitive; singular
values of a general matrix are derived from the eigenvalues of A*A.
p = infinity is always a separate branch, never a large-p limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DyadicMatrixFunction, _check_shapes

__all__ = [
    "HermitianSpectrum",
    "hermitian_eig",
    "modulus",
    "positive_part",
    "singular_values",
    "schatten_norm",
    "psd_dominates",
    "lp_function_norm",
    "trace_pairing",
    "hermitian_part",
]

_HERMITICITY_RTOL = 1e-8


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are real and sorted descending; eigenvectors is unitary with
    column i the eigenvector for eigenvalues[i].
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_part(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    return (A + A.conj().T) / 2.0


def hermitian_eig(A) -> HermitianSpectrum:
    """Spectrum of a Hermitian matrix (symmetrized before decomposition).

    Rejects non-square input and input whose anti-Hermitian part exceeds
    1e-8 relative to its norm.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got shape {A.shape}")
    scale = np.linalg.norm(A)
    dev = np.linalg.norm(A - A.conj().T)
    if scale > 0 and dev > _HERMITICITY_RTOL * scale:
        raise ValueError(f"matrix is not Hermitian: ||A - A*|| = {dev:.3e}, ||A|| = {scale:.3e}")
    w, v = np.linalg.eigh(hermitian_part(A))
    order = np.argsort(w)[::-1]
    return HermitianSpectrum(w[order], v[:, order])


def modulus(A) -> np.ndarray:
    """|A| = (A* A)^(1/2), the PSD operator modulus."""
    A = np.asarray(A, dtype=np.complex128)
    spec = hermitian_eig(A.conj().T @ A)
    w = np.sqrt(np.clip(spec.eigenvalues, 0.0, None))
    return (spec.eigenvectors * w) @ spec.eigenvectors.conj().T


def positive_part(A) -> np.ndarray:
    """A_+ : the positive part of a Hermitian matrix."""
    spec = hermitian_eig(A)
    w = np.clip(spec.eigenvalues, 0.0, None)
    return (spec.eigenvectors * w) @ spec.eigenvectors.conj().T


def singular_values(A) -> np.ndarray:
    """Singular values of a general complex matrix, descending.

    Derived from the Hermitian eigenvalues of A*A.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"need a square matrix, got shape {A.shape}")
    w = np.linalg.eigvalsh(hermitian_part(A.conj().T @ A))
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def schatten_norm(A, p) -> float:
    """Schatten p-norm (sum of p-th powers of singular values)^(1/p).

    p = inf returns the largest singular value.  p < 1 is rejected: the
    triangle inequality fails there.
    """
    sv = singular_values(A)
    if p == np.inf:
        return float(sv[0]) if sv.size else 0.0
    p = float(p)
    if p < 1.0:
        raise ValueError(f"schatten_norm requires p >= 1 or p = inf, got {p}")
    if p == 1.0:
        return float(np.sum(sv))
    if p == 2.0:
        return float(np.sqrt(np.sum(sv * sv)))
    return float(np.sum(sv**p) ** (1.0 / p))


def psd_dominates(A, B, tol=None) -> bool:
    """True iff A - B is PSD up to a scale-aware eigenvalue tolerance.

    Both inputs must be Hermitian.  Default tolerance is
    1e-9 * max(1, ||A|| + ||B||).
    """
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if tol is None:
        scale = max(1.0, float(np.linalg.norm(A, 2) + np.linalg.norm(B, 2)))
        tol = 1e-9 * scale
    diff = hermitian_part(A - B)
    lam_min = float(np.linalg.eigvalsh(diff)[0])
    return lam_min >= -tol


def _batched_singular_values(stack: np.ndarray) -> np.ndarray:
    """Singular values (ascending) for a stack of square matrices."""
    gram = np.conj(np.swapaxes(stack, -1, -2)) @ stack
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    w = np.linalg.eigvalsh(gram)
    return np.sqrt(np.clip(w, 0.0, None))


def lp_function_norm(f: DyadicMatrixFunction, p) -> float:
    """Bochner L^p norm: (mean over atoms of ||f(t)||_p^p)^(1/p).

    For p = inf, the max over atoms of the operator norm.
    """
    sv = _batched_singular_values(f.values)
    if p == np.inf:
        return float(sv[..., -1].max()) if sv.size else 0.0
    p = float(p)
    if p < 1.0:
        raise ValueError(f"lp_function_norm requires p >= 1 or p = inf, got {p}")
    atom_pows = np.sum(sv**p, axis=-1)
    return float(np.mean(atom_pows) ** (1.0 / p))


def trace_pairing(f: DyadicMatrixFunction, g: DyadicMatrixFunction) -> complex:
    """Sesquilinear pairing integral of tr(g(t)* f(t)) dt.

    trace_pairing(f, f) equals ||f||_2^2.
    """
    _check_shapes(f, g)
    return complex(np.mean(np.einsum("tij,tij->t", np.conj(g.values), f.values)))
