"""Min-trace majorant semidefinite programs and noncommutative maximal norms.

The L^1(M, l_inf) norm of a matrix sequence is the smallest trace of a
single Hermitian majorant A:

    positive variant     A >= a_k                        (a_k PSD)
    self-adjoint variant A >= +/-(a_k* + a_k)/2 and
                         A >= +/-(i(a_k* - a_k)/2)       (general a_k)

Both reduce to a min-trace SDP over the constraint list; the self-adjoint
variant's paired constraints force A >= 0 on their own, so no explicit
PSD constraint is appended for them.  For a bare constraint list the
problem solved is min{tr A : A >= B_j for all j, A >= 0}; the intrinsic
A >= 0 is handled as one more barrier term (disable with psd=False when
the list already implies it).

The solver is an in-house log-det barrier interior-point method: damped
Newton steps on  tr(A) - mu * sum_j log det(A - B_j), with the dual
recovered from Z_j = mu (A - B_j)^{-1} on the central path and projected
onto exact dual feasibility (sum Z_j = I, Z_j PSD).  Weak duality then
certifies the reported gap.

For sequences of matrix *functions* the constraints act atom by atom and
the objective integrates atomwise traces, so the optimization decouples
over the finest-level atoms; this decoupling is validated against a joint
block SDP in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import DyadicMatrixFunction, conditional_expectation
from .linalg import hermitian_part, trace_pairing

__all__ = [
    "MajorantProblem",
    "MajorantCertificate",
    "MajorantSolverError",
    "MaxNormReport",
    "min_trace_majorant",
    "max_norm_l1_positive",
    "max_norm_l1_selfadjoint",
    "ncm_hardy_norm",
    "dual_h1ncm_lower",
]

_HERM_TOL = 1e-10
_MAX_DIM = 64
_MAX_CONSTRAINTS = 256


@dataclass(frozen=True)
class MajorantProblem:
    """A min-trace instance: Hermitian constraints B_1..B_J of size dim."""

    dim: int
    constraints: tuple

    def __post_init__(self):
        if not 1 <= self.dim <= _MAX_DIM:
            raise ValueError(f"dim must be in [1, {_MAX_DIM}], got {self.dim}")
        if not 1 <= len(self.constraints) <= _MAX_CONSTRAINTS:
            raise ValueError(
                f"need between 1 and {_MAX_CONSTRAINTS} constraints, got {len(self.constraints)}"
            )
        mats = []
        for j, b in enumerate(self.constraints):
            b = np.asarray(b, dtype=np.complex128)
            if b.shape != (self.dim, self.dim):
                raise ValueError(f"constraint {j} has shape {b.shape}, expected {(self.dim, self.dim)}")
            dev = np.linalg.norm(b - b.conj().T)
            if dev > _HERM_TOL * max(1.0, np.linalg.norm(b)):
                raise ValueError(f"constraint {j} is not Hermitian (deviation {dev:.3e})")
            b = hermitian_part(b)
            b.setflags(write=False)
            mats.append(b)
        object.__setattr__(self, "constraints", tuple(mats))


@dataclass(frozen=True)
class MajorantCertificate:
    """Primal/dual solution of a min-trace majorant instance.

    dual is aligned with the user's constraint list; psd_multiplier is the
    multiplier of the intrinsic A >= 0 constraint (None when disabled).
    Dual feasibility: every multiplier is PSD and they sum to the identity
    (including psd_multiplier when present); weak duality gives gap >= 0.
    """

    primal: np.ndarray
    dual: tuple
    psd_multiplier: Optional[np.ndarray]
    primal_value: float
    dual_value: float
    gap: float
    newton_steps: int


class MajorantSolverError(RuntimeError):
    """Raised when the barrier method cannot reach the gap target.

    The best certificate found so far is attached as .certificate.
    """

    def __init__(self, message: str, certificate: MajorantCertificate):
        super().__init__(message)
        self.certificate = certificate


def _newton_direction(Sinv: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Solve sum_i Sinv_i H Sinv_i = -G for Hermitian H.

    In row-major vec coordinates the map is sum_i Sinv_i (x) Sinv_i^T,
    i.e. K[(i,l),(j,k)] = sum_m Sinv_m[i,j] Sinv_m[k,l].
    """
    N = G.shape[0]
    K = np.einsum("mij,mkl->iljk", Sinv, Sinv).reshape(N * N, N * N)
    rhs = (-G).reshape(-1)
    try:
        h = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError:
        reg = 1e-14 * np.trace(K).real / (N * N)
        h = np.linalg.solve(K + reg * np.eye(N * N), rhs)
    H = h.reshape(N, N)
    return hermitian_part(H)


def min_trace_majorant(
    prob: MajorantProblem,
    tol: float = 1e-8,
    psd: bool = True,
    max_stages: int = 80,
    max_newton_per_stage: int = 60,
) -> MajorantCertificate:
    """Solve min{tr A : A >= B_j for all j (, A >= 0)} with a dual certificate.

    Terminates when the certified duality gap is at most
    tol * max(1, |primal value|); raises MajorantSolverError (with the best
    certificate attached) if the stage cap is hit first.

    With psd=False the intrinsic A >= 0 constraint is dropped; use only
    when the constraint list already implies it (e.g. paired +/-B
    constraints), otherwise the reported optimum is that of the bare
    problem min{tr A : A >= B_j}.
    """
    N = prob.dim
    B = list(prob.constraints)
    if psd:
        B = [np.zeros((N, N), dtype=np.complex128)] + B
    B = np.stack(B)
    J = B.shape[0]
    eye = np.eye(N, dtype=np.complex128)

    lam_max = max(float(np.linalg.eigvalsh(b)[-1]) for b in B)
    A = (1.0 + max(lam_max, 0.0)) * eye

    # feasible dual guess Z_j = I/J bounds the optimum from below
    dual0 = float(np.einsum("mij,ji->", B, eye).real) / J
    mu = max((float(np.trace(A).real) - dual0) / (J * N), 1e-6)

    steps = 0
    best_cert = None

    def make_cert(A, Sinv, mu):
        Z = mu * Sinv
        M = hermitian_part(Z.sum(axis=0))
        w, v = np.linalg.eigh(M)
        w = np.clip(w, 1e-300, None)
        Mi = (v / np.sqrt(w)) @ v.conj().T  # M^{-1/2}
        Zp = Mi @ Z @ Mi
        Zp = (Zp + np.conj(np.swapaxes(Zp, -1, -2))) / 2.0
        pv = float(np.trace(A).real)
        dv = float(np.einsum("mij,mji->", B, Zp).real)
        gap = pv - dv
        if -1e-12 * max(1.0, abs(pv)) <= gap < 0.0:
            gap = 0.0  # weak duality holds exactly; tiny negatives are roundoff
        if psd:
            z0, zrest = Zp[0], tuple(Zp[1:])
        else:
            z0, zrest = None, tuple(Zp)
        return MajorantCertificate(
            primal=hermitian_part(A),
            dual=zrest,
            psd_multiplier=z0,
            primal_value=pv,
            dual_value=dv,
            gap=gap,
            newton_steps=steps,
        )

    def barrier_value(A, mu):
        try:
            L = np.linalg.cholesky(A[np.newaxis] - B)
        except np.linalg.LinAlgError:
            return np.inf
        diag = np.real(np.diagonal(L, axis1=-2, axis2=-1))
        if np.any(diag <= 0.0):
            return np.inf
        return float(np.trace(A).real) - 2.0 * mu * float(np.log(diag).sum())

    for _ in range(max_stages):
        # damped Newton to approximate centrality at the current mu
        for _ in range(max_newton_per_stage):
            S = A[np.newaxis] - B
            Sinv = np.linalg.inv(S)
            Sinv = (Sinv + np.conj(np.swapaxes(Sinv, -1, -2))) / 2.0
            G = eye - mu * Sinv.sum(axis=0)
            H = _newton_direction(Sinv, G / mu)
            # Newton decrement in the barrier metric
            lam2 = float(np.einsum("ij,ji->", H, -G).real) / mu
            if not np.isfinite(lam2) or lam2 <= 1e-22:
                break
            t = 1.0  # full step first; backtracking guards feasibility
            f0 = barrier_value(A, mu)
            accepted = False
            for _ in range(60):
                cand = hermitian_part(A + t * H)
                if barrier_value(cand, mu) < f0:
                    A = cand
                    accepted = True
                    break
                t *= 0.5
            steps += 1
            if not accepted:
                break
            # loose centering suffices: dual feasibility is restored by
            # projection, and the gap test below is on certified values
            if lam2 <= 0.04 and t == 1.0:
                break

        # on the central path the gap is mu * J * N; skip the certificate
        # work while that is still far above the target
        target = tol * max(1.0, abs(float(np.trace(A).real)))
        if mu * J * N <= 8.0 * target:
            S = A[np.newaxis] - B
            Sinv = np.linalg.inv(S)
            Sinv = (Sinv + np.conj(np.swapaxes(Sinv, -1, -2))) / 2.0
            cert = make_cert(A, Sinv, mu)
            if best_cert is None or cert.gap < best_cert.gap:
                best_cert = cert
            if cert.gap <= tol * max(1.0, abs(cert.primal_value)):
                return cert
        mu /= 10.0

    if best_cert is None:
        S = A[np.newaxis] - B
        Sinv = np.linalg.inv(S)
        Sinv = (Sinv + np.conj(np.swapaxes(Sinv, -1, -2))) / 2.0
        best_cert = make_cert(A, Sinv, mu)
    raise MajorantSolverError(
        f"barrier method did not reach gap <= {tol} * max(1, |primal|) "
        f"within {max_stages} stages (best gap {best_cert.gap:.3e})",
        best_cert,
    )


@dataclass(frozen=True)
class MaxNormReport:
    """Maximal-norm value with per-atom optima and the worst duality gap."""

    value: float
    per_atom: tuple
    max_gap: float


def _check_sequence(seq):
    if not seq:
        raise ValueError("need a nonempty sequence of matrix functions")
    n, dim = seq[0].n, seq[0].dim
    for f in seq:
        if f.n != n or f.dim != dim:
            raise ValueError("all sequence members must share resolution and dimension")
    return n, dim


def _pointwise_max_norm(constraint_stacks, dim, tol) -> MaxNormReport:
    """Integrate per-atom min-trace optima; constraints are pointwise.

    constraint_stacks has shape (J, T, dim, dim): J constraints per atom,
    T atoms.  Solved with psd=False: callers guarantee the per-atom lists
    imply A >= 0 on their own.
    """
    T = constraint_stacks.shape[1]
    values, gaps = [], []
    for t in range(T):
        prob = MajorantProblem(dim, tuple(constraint_stacks[:, t]))
        cert = min_trace_majorant(prob, tol=tol, psd=False)
        values.append(cert.primal_value)
        gaps.append(cert.gap)
    return MaxNormReport(float(np.mean(values)), tuple(values), float(max(gaps)))


def max_norm_l1_positive(seq, tol: float = 1e-8, details: bool = False):
    """L^1(l_inf) maximal norm of a PSD-valued function sequence.

    The infimum decouples over atoms: per atom, the smallest trace of a
    majorant A >= a_k(t) for all k; the value is its integral over t.
    """
    n, dim = _check_sequence(seq)
    stacks = np.stack([f.values for f in seq])
    herm = (stacks + np.conj(np.swapaxes(stacks, -1, -2))) / 2.0
    scale = max(1.0, float(np.abs(stacks).max()))
    if np.abs(stacks - herm).max() > 1e-9 * scale:
        raise ValueError("positive variant requires Hermitian (PSD) values")
    lam_min = float(np.linalg.eigvalsh(herm).min())
    if lam_min < -1e-9 * scale:
        raise ValueError(f"positive variant requires PSD values (lambda_min = {lam_min:.3e})")
    report = _pointwise_max_norm(herm, dim, tol)
    return report if details else report.value


def max_norm_l1_selfadjoint(seq, tol: float = 1e-8, details: bool = False):
    """L^1(l_inf) maximal norm of a general function sequence.

    Per atom, A must dominate +/- the Hermitian part and +/- the
    anti-Hermitian part (times i) of every a_k; the four families force
    A >= 0, so the PSD constraint is left implicit.  Agrees with the
    positive variant on PSD input.
    """
    n, dim = _check_sequence(seq)
    stacks = np.stack([f.values for f in seq])
    adj = np.conj(np.swapaxes(stacks, -1, -2))
    sym = (adj + stacks) / 2.0
    skew = 1j * (adj - stacks) / 2.0
    constraints = np.concatenate([sym, -sym, skew, -skew], axis=0)
    report = _pointwise_max_norm(constraints, dim, tol)
    return report if details else report.value


def ncm_hardy_norm(f: DyadicMatrixFunction, tol: float = 1e-8) -> float:
    """Noncommutative maximal Hardy norm: maximal norm of (E_m f)_{m=0..n}."""
    seq = [conditional_expectation(f, m) for m in range(f.n + 1)]
    return max_norm_l1_selfadjoint(seq, tol=tol)


def dual_h1ncm_lower(phi: DyadicMatrixFunction, candidates=None, seed: int = 0) -> float:
    """Lower bound for the dual maximal-Hardy norm of phi.

    Maximizes |integral tr(phi* f)| / ncm_hardy_norm(f) over a candidate
    family (supplied, or generated: Rademacher tensors, the sharpness
    family when it fits, seeded Gaussian functions).  This is only a lower
    bound; enlarging the candidate set can only increase it.
    """
    if candidates is None:
        candidates = _default_dual_candidates(phi, seed)
    best = 0.0
    for f in candidates:
        if f.n != phi.n or f.dim != phi.dim:
            raise ValueError("candidates must share phi's resolution and dimension")
        denom = ncm_hardy_norm(f)
        if denom <= 0.0:
            continue
        best = max(best, abs(trace_pairing(f, phi)) / denom)
    return float(best)


def _default_dual_candidates(phi: DyadicMatrixFunction, seed: int):
    from .core import rademacher, refine
    from .constructions import sharpness_function

    n, dim = phi.n, phi.dim
    rng = np.random.default_rng(seed)
    out = []
    if np.abs(phi.values).max() > 0:
        out.append(phi)
    for k in range(1, n + 1):
        r = rademacher(k, n)
        C = np.eye(dim, dtype=np.complex128)
        out.append(DyadicMatrixFunction(n, dim, r.values * C))
    if dim <= n:
        alpha = np.full(dim, 1.0 / np.sqrt(dim))
        out.append(refine(sharpness_function(alpha, n=dim), n))
    for _ in range(4):
        shape = (1 << n, dim, dim)
        vals = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        out.append(DyadicMatrixFunction(n, dim, vals))
    return out
