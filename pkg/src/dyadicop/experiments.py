"""Reproducible experiment harness: sweeps, records, CSV/JSON output.

Config files are UTF-8 text with one `key = value` per line (lists
comma-separated, blank lines and #-comments allowed, unknown keys
rejected).  Records go to a long-format RFC-4180 CSV with columns

    experiment,N,n,p,seed,metric,value

one metric per row, plus a JSON file with full records (parameters,
wall time, config hash).  A fixed config and seed reproduce the CSV
byte for byte; partially written sweeps resume idempotently, reusing
finished grid points verbatim and computing only the missing ones.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from .constructions import corner_projection, hilbert_matrix, triangle_projection
from .core import (
    DyadicMatrixFunction,
    conditional_expectation,
    level_means,
    martingale_difference,
    square_function,
)
from .ensembles import member_rng, random_symbol, symbol_ensemble
from .jsonio import function_to_dict
from .linalg import lp_function_norm, schatten_norm, trace_pairing
from .majorant import MajorantProblem, dual_h1ncm_lower, min_trace_majorant
from .norms import bg_pairing_check, bmo_m_norm, bmo_norm, doob_check
from .operators import (
    haar_multiplier,
    operator_norm_2,
    operator_norm_p_lower,
    paraproduct,
    paraproduct_adjoint,
)

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "load_config",
    "parse_config",
    "config_hash",
    "run_hilbert_scaling",
    "run_growth_cn",
    "run_lambda_vs_bmo",
    "run_extrapolation_probe",
    "run_inequality_suite",
    "run_experiment",
    "write_records",
    "EXPERIMENT_NAMES",
]

EXPERIMENT_NAMES = (
    "hilbert_scaling",
    "cn_growth",
    "lambda_vs_bmo",
    "extrapolation_probe",
    "inequality_suite",
)

CSV_COLUMNS = ("experiment", "N", "n", "p", "seed", "metric", "value")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    N: tuple = ()
    n: tuple = ()
    p: tuple = ()
    ensemble: int = 50
    seed: int = 0
    output_dir: str = "results"
    power_tol: float = 1e-7
    sdp_tol: float = 1e-8

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_NAMES:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENT_NAMES}"
            )


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    params: dict
    metrics: dict
    seed: int
    wall_time: float
    config_hash: str = ""


_INT_LIST_KEYS = {"N", "n"}
_FLOAT_LIST_KEYS = {"p"}
_INT_KEYS = {"ensemble", "seed"}
_FLOAT_KEYS = {"power_tol", "sdp_tol"}
_STR_KEYS = {"experiment", "output_dir"}
_ALL_KEYS = _INT_LIST_KEYS | _FLOAT_LIST_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS


def parse_config(text: str) -> ExperimentConfig:
    """Parse `key = value` lines into an ExperimentConfig.

    Unknown keys are rejected; lists are comma-separated.
    """
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in fields:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _INT_LIST_KEYS:
                fields[key] = tuple(int(v.strip()) for v in value.split(",") if v.strip())
            elif key in _FLOAT_LIST_KEYS:
                fields[key] = tuple(float(v.strip()) for v in value.split(",") if v.strip())
            elif key in _INT_KEYS:
                fields[key] = int(value)
            elif key in _FLOAT_KEYS:
                fields[key] = float(value)
            else:
                fields[key] = value
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from exc
    if "experiment" not in fields:
        raise ValueError("config must set 'experiment'")
    return ExperimentConfig(**fields)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True, default=list)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# experiment runners


def _record(experiment, params, metrics, seed, t0, chash=""):
    return ExperimentRecord(
        experiment=experiment,
        params=dict(params),
        metrics={k: float(v) for k, v in metrics.items()},
        seed=seed,
        wall_time=time.perf_counter() - t0,
        config_hash=chash,
    )


def run_hilbert_scaling(Ns, seed: int = 0) -> list:
    """Operator norms of the Hilbert matrix and its triangular truncation.

    Per N: ||h||, ||Th||, and ||Th|| / log(N+1).  ||h|| is checked to be
    nondecreasing in N (it is a principal-submatrix family).
    """
    Ns = list(Ns)
    if Ns != sorted(Ns):
        raise ValueError("Ns must be ascending")
    records = []
    prev = -np.inf
    for N in Ns:
        t0 = time.perf_counter()
        h = hilbert_matrix(N)
        hn = schatten_norm(h, np.inf)
        tn = schatten_norm(triangle_projection(h), np.inf)
        if hn < prev - 1e-12:
            raise AssertionError(f"||h|| decreased at N={N}: {hn} < {prev}")
        prev = hn
        records.append(
            _record(
                "hilbert_scaling",
                {"N": N},
                {"h_norm": hn, "th_norm": tn, "th_over_log": tn / np.log(N + 1.0)},
                seed,
                t0,
            )
        )
    return records


def _corner_sequence_value(A: np.ndarray, sdp_tol: float) -> float:
    """L^1(l_inf) maximal norm of the corner-projection sequence of PSD A."""
    N = A.shape[0]
    constraints = tuple(corner_projection(A, m) for m in range(1, N + 1))
    cert = min_trace_majorant(MajorantProblem(N, constraints), tol=sdp_tol, psd=False)
    return cert.primal_value


def run_growth_cn(
    Ns,
    seed: int = 0,
    ensemble: int = 12,
    sdp_limit: int = 16,
    demo_limit: int = 8,
    sdp_tol: float = 1e-8,
) -> list:
    """Growth of the corner-majorant constant.

    Per N: L(N) = ||Th||^2 / ||h||^2, a certified lower bound for the best
    constant in the corner-projection majorant inequality, and its ratio
    to log(N+1)^2.  For N <= sdp_limit an empirical lower bound is added:
    the max over random trace-one PSD matrices and rank-one alpha (x) alpha
    of the maximal norm of the corner sequence (P_m A)_m.  For
    N <= demo_limit the flagged ratio ||Lambda_phi||_2 / dual lower bound
    is reported; the denominator is itself only a lower bound, so the
    ratio over-estimates and is a demonstration, not an assertion.
    """
    records = []
    for N in Ns:
        t0 = time.perf_counter()
        h = hilbert_matrix(N)
        hn = schatten_norm(h, np.inf)
        tn = schatten_norm(triangle_projection(h), np.inf)
        L = (tn / hn) ** 2
        metrics = {"L": L, "L_over_log2": L / np.log(N + 1.0) ** 2}
        if N <= sdp_limit:
            rng = member_rng(seed, N, 1)
            best = 0.0
            for i in range(ensemble):
                if i % 2 == 0:
                    alpha = rng.standard_normal(N) + 1j * rng.standard_normal(N)
                    alpha /= np.linalg.norm(alpha)
                    A = np.outer(np.conj(alpha), alpha)
                else:
                    X = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
                    A = X @ X.conj().T
                    A /= np.trace(A).real
                best = max(best, _corner_sequence_value(A, sdp_tol))
            metrics["cn_lower_sdp"] = best
        if N <= demo_limit:
            n_demo = max(3, int(np.ceil(np.log2(N))) + 1)
            phi = random_symbol(member_rng(seed, N, 2), N, n_demo)
            lam2 = operator_norm_2(haar_multiplier(phi), seed=seed)
            dual_lb = dual_h1ncm_lower(phi, seed=seed)
            if dual_lb > 0:
                # over-estimates the true ratio: denominator is a lower bound
                metrics["lambda2_over_dual_lower_bound"] = lam2 / dual_lb
        records.append(_record("cn_growth", {"N": N}, metrics, seed, t0))
    return records


def run_lambda_vs_bmo(
    N_list,
    n_list,
    ensemble: int = 50,
    seed: int = 0,
    power_tol: float = 1e-7,
) -> list:
    """Max over the symbol ensemble of ||Lambda_phi||_2 / bmo_M(phi)."""
    records = []
    for N in N_list:
        for n in n_list:
            t0 = time.perf_counter()
            best, total, count = 0.0, 0.0, 0
            for phi in symbol_ensemble(N, n, ensemble, seed):
                denom = bmo_m_norm(phi).value
                if denom <= 0.0:
                    continue  # constant symbols are degenerate
                ratio = operator_norm_2(haar_multiplier(phi), tol=power_tol, seed=seed) / denom
                best = max(best, ratio)
                total += ratio
                count += 1
            records.append(
                _record(
                    "lambda_vs_bmo",
                    {"N": N, "n": n},
                    {"ratio_max": best, "ratio_mean": total / max(count, 1)},
                    seed,
                    t0,
                )
            )
    return records


def run_extrapolation_probe(
    p_list,
    N: int,
    n: int,
    ensemble: int = 10,
    seed: int = 0,
    power_tol: float = 1e-9,
    restarts: int = 6,
) -> list:
    """Lower-bound L^p -> L^p norm profile of the paraproduct across p.

    Per p: the max over the ensemble of the certified lower bound for
    ||pi_phi||_{p->p}, normalized by bmo_M(phi).  At p = 2 the max
    relative deviation from the exact power-iteration norm is also
    reported.  A demonstration of the extrapolation phenomenon, not a
    proof: for p != 2 the profile is a lower bound only.
    """
    symbols = [phi for phi in symbol_ensemble(N, n, ensemble, seed)]
    denoms = [bmo_m_norm(phi).value for phi in symbols]
    records = []
    for p in p_list:
        t0 = time.perf_counter()
        best = 0.0
        p2_dev = 0.0
        for phi, denom in zip(symbols, denoms):
            if denom <= 0.0:
                continue
            op = paraproduct(phi)
            lower = operator_norm_p_lower(
                op, p, restarts=restarts, seed=seed, tol=power_tol
            )
            best = max(best, lower / denom)
            if p == 2.0:
                exact = operator_norm_2(op, tol=power_tol, seed=seed)
                if exact > 0:
                    p2_dev = max(p2_dev, abs(lower - exact) / exact)
        metrics = {"ratio_max": best}
        if p == 2.0:
            metrics["p2_rel_dev_max"] = p2_dev
        records.append(
            _record("extrapolation_probe", {"N": N, "n": n, "p": p}, metrics, seed, t0)
        )
    return records


# ---------------------------------------------------------------------------
# inequality suite


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    direction: str  # 'abs<=', '>=', '<=', 'finite'
    offending: dict = field(default_factory=dict)


class _Tracker:
    """Accumulates the worst case per check and keeps a violating witness."""

    def __init__(self, seed):
        self.seed = seed
        self.worst = {}
        self.offending = {}

    def update(self, name, value, threshold, direction, instances=None, context=None):
        value = float(value)
        prev = self.worst.get(name)
        if direction == ">=":  # slack checks: smaller is worse
            worse = prev is None or value < prev
            violated = value < threshold
        else:
            worse = prev is None or value > prev
            violated = (
                abs(value) > threshold
                if direction == "abs<="
                else (not np.isfinite(value) if direction == "finite" else value > threshold)
            )
        if worse:
            self.worst[name] = value
            if violated:
                payload = {"seed": self.seed}
                payload.update(context or {})
                if instances:
                    payload["instances"] = {
                        k: function_to_dict(v) for k, v in instances.items()
                    }
                self.offending[name] = payload
            else:
                self.offending.pop(name, None)

    def result(self, name, threshold, direction):
        value = self.worst.get(name, 0.0)
        if direction == "abs<=":
            ok = abs(value) <= threshold
        elif direction == "<=":
            ok = value <= threshold
        elif direction == "finite":
            ok = np.isfinite(value)
        else:
            ok = value >= threshold
        return CheckResult(
            name, bool(ok), value, threshold, direction, self.offending.get(name, {})
        )


def _unit_l2(f: DyadicMatrixFunction) -> DyadicMatrixFunction:
    norm = lp_function_norm(f, 2)
    return f if norm == 0 else f * (1.0 / norm)


def _random_f(rng, dim, n):
    vals = (rng.standard_normal((1 << n, dim, dim)) + 1j * rng.standard_normal((1 << n, dim, dim))) / np.sqrt(2.0)
    return DyadicMatrixFunction(n, dim, vals)


_IDENTITY_TOL = 1e-10
_SLACK_TOL = -1e-9

_CHECK_SPECS = [
    ("telescoping_identity", _IDENTITY_TOL, "abs<="),
    ("tower_property", _IDENTITY_TOL, "abs<="),
    ("orthogonality_l2", _IDENTITY_TOL, "abs<="),
    ("predictability_mean_zero", _IDENTITY_TOL, "abs<="),
    ("level_product_measurability", _IDENTITY_TOL, "abs<="),
    ("adjoint_pairing", _IDENTITY_TOL, "abs<="),
    ("haar_multiplier_decomposition", _IDENTITY_TOL, "abs<="),
    ("product_telescoping_identity", _IDENTITY_TOL, "abs<="),
    ("square_function_l2_identity", _IDENTITY_TOL, "abs<="),
    ("hoelder_column_square_bound", _SLACK_TOL, ">="),
    ("hoelder_row_square_bound", _SLACK_TOL, ">="),
    ("bmo_ordering", _SLACK_TOL, ">="),
    ("doob_ratio_p2", 4.0, "<="),
    ("doob_ratio_inf_is_one", 1e-9, "abs<="),
    ("covariation_maximal_ratio", np.inf, "finite"),
    ("bg_pairing_ratio", np.inf, "finite"),
    ("holder_function_norm", _SLACK_TOL, ">="),
]


def run_inequality_suite(seed: int = 0, trials: int = 200) -> list:
    """Exercise every inequality/identity over seeded random ensembles.

    Exact identities must hold to 1e-10 on unit-normalized inputs;
    one-sided bounds must have slack above -1e-9; ratio checks report
    their empirical worst case and must stay finite.  Returns one
    CheckResult per check, with a serialized witness on every failure.
    """
    tr = _Tracker(seed)
    specs = {s[0]: s for s in _CHECK_SPECS}

    sizes = [(1, 3), (2, 4), (4, 5), (8, 3), (3, 4)]

    # --- exact identities on unit-normalized random functions
    for t in range(trials):
        dim, n = sizes[t % len(sizes)]
        rng = member_rng(seed, 1, t)
        f = _unit_l2(_random_f(rng, dim, n))
        g = _unit_l2(_random_f(rng, dim, n))
        phi = _unit_l2(_random_f(rng, dim, n))
        inst = {"f": f, "g": g, "phi": phi}
        ctx = {"stream": 1, "trial": t}

        def check(name, value):
            spec = specs[name]
            tr.update(name, value, spec[1], spec[2], instances=inst, context=ctx)

        total = conditional_expectation(f, 0)
        for k in range(1, n + 1):
            total = total + martingale_difference(f, k)
        check("telescoping_identity", np.abs(total.values - f.values).max())

        j, k = int(rng.integers(n + 1)), int(rng.integers(n + 1))
        lhs = conditional_expectation(conditional_expectation(f, k), j)
        rhs = conditional_expectation(f, min(j, k))
        check("tower_property", np.abs(lhs.values - rhs.values).max())

        if n >= 2:
            check(
                "orthogonality_l2",
                max(
                    abs(trace_pairing(martingale_difference(f, 1), martingale_difference(g, 2))),
                    abs(trace_pairing(conditional_expectation(f, 0), martingale_difference(g, n))),
                ),
            )

        k = 1 + int(rng.integers(n))
        prod = martingale_difference(phi, k).values @ conditional_expectation(f, k - 1).values
        block = prod.reshape(1 << (k - 1), -1, dim, dim).mean(axis=1)
        check("predictability_mean_zero", np.abs(block).max())

        dk_f = martingale_difference(f, k).values
        dk_g = martingale_difference(g, k).values
        pr = np.conj(np.swapaxes(dk_f, -1, -2)) @ dk_g
        halves = pr.reshape(1 << (k - 1), -1, dim, dim)
        check("level_product_measurability", np.abs(halves - halves[:, :1]).max())

        op = paraproduct(phi)
        check(
            "adjoint_pairing",
            abs(trace_pairing(op.apply(f), g) - trace_pairing(f, op.adjoint_apply(g))),
        )

        lam = haar_multiplier(phi)
        dec = lam.apply(f) - (op.apply(f) + paraproduct_adjoint(phi.star()).apply(f))
        check("haar_multiplier_decomposition", np.abs(dec.values).max())

        m = 1 + int(rng.integers(n))
        lhs_f1 = np.zeros_like(f.values)
        bracket = np.zeros_like(f.values)
        for kk in range(1, m + 1):
            ekm1_f = conditional_expectation(f, kk - 1).values
            ekm1_g = conditional_expectation(g, kk - 1).values
            dk_f = martingale_difference(f, kk).values
            dk_g = martingale_difference(g, kk).values
            dk_g_star = np.conj(np.swapaxes(dk_g, -1, -2))
            lhs_f1 += ekm1_f @ dk_g_star + dk_f @ np.conj(np.swapaxes(ekm1_g, -1, -2))
            bracket += dk_f @ dk_g_star
        em_f = conditional_expectation(f, m).values
        em_g = conditional_expectation(g, m).values
        e0_f = level_means(f)[0][0]
        e0_g = level_means(g)[0][0]
        rhs_f1 = (
            em_f @ np.conj(np.swapaxes(em_g, -1, -2))
            - (e0_f @ e0_g.conj().T)[np.newaxis]
            - bracket
        )
        check("product_telescoping_identity", np.abs(lhs_f1 - rhs_f1).max())

        l2sq = lp_function_norm(f, 2) ** 2
        e0sq = lp_function_norm(conditional_expectation(f, 0), 2) ** 2
        ssq = lp_function_norm(square_function(f), 2) ** 2
        check("square_function_l2_identity", abs(l2sq - e0sq - ssq) / max(l2sq, 1e-300))

    # --- Hoelder-type bounds for column/row square functions of tuples
    p_values = [1.0, 4.0 / 3.0, 2.0, 4.0, np.inf]
    for t in range(1000):
        rng = member_rng(seed, 2, t)
        dim = int(rng.choice([2, 3, 4]))
        m = int(rng.integers(1, 6))
        p = p_values[t % len(p_values)]
        q = 1.0 if p == np.inf else (np.inf if p == 1.0 else p / (p - 1.0))
        a = (rng.standard_normal((m, dim, dim)) + 1j * rng.standard_normal((m, dim, dim))) / np.sqrt(2)
        b = (rng.standard_normal((m, dim, dim)) + 1j * rng.standard_normal((m, dim, dim))) / np.sqrt(2)
        astar = np.conj(np.swapaxes(a, -1, -2))
        bstar = np.conj(np.swapaxes(b, -1, -2))
        lhs = schatten_norm(np.einsum("mij,mjk->ik", astar, b), 1.0)
        ctx = {"stream": 2, "trial": t, "p": p}
        col = schatten_norm(_psd_sqrt(np.einsum("mij,mjk->ik", astar, a)), p) * schatten_norm(
            _psd_sqrt(np.einsum("mij,mjk->ik", bstar, b)), q
        )
        tr.update("hoelder_column_square_bound", col - lhs, _SLACK_TOL, ">=", context=ctx)
        row = schatten_norm(_psd_sqrt(np.einsum("mij,mjk->ik", a, astar)), p) * schatten_norm(
            _psd_sqrt(np.einsum("mij,mjk->ik", b, bstar)), q
        )
        tr.update("hoelder_row_square_bound", row - lhs, _SLACK_TOL, ">=", context=ctx)

    # --- BMO ordering and Doob ratios
    for t in range(500):
        dim, n = sizes[t % len(sizes)]
        phi = random_symbol(member_rng(seed, 3, t), dim, n)
        tr.update(
            "bmo_ordering",
            bmo_m_norm(phi).value - bmo_norm(phi, "cr").value,
            _SLACK_TOL,
            ">=",
            instances={"phi": phi},
            context={"stream": 3, "trial": t},
        )

    for t in range(500):
        dim, n = sizes[t % len(sizes)]
        f = _random_f(member_rng(seed, 4, t), dim, n)
        ctx = {"stream": 4, "trial": t}
        tr.update("doob_ratio_p2", doob_check(f, 2), 4.0, "<=", instances={"f": f}, context=ctx)
        tr.update(
            "doob_ratio_inf_is_one",
            abs(doob_check(f, np.inf) - 1.0),
            1e-9,
            "abs<=",
            instances={"f": f},
            context=ctx,
        )

    # --- running covariation and BMO/H1 pairing ratios (finiteness reports)
    for t in range(100):
        dim, n = sizes[t % len(sizes)]
        rng = member_rng(seed, 5, t)
        f = _random_f(rng, dim, n)
        g = _random_f(rng, dim, n)
        p = [4.0 / 3.0, 2.0, 4.0][t % 3]
        q = p / (p - 1.0)
        denom = lp_function_norm(f, p) * lp_function_norm(g, q)
        ctx = {"stream": 5, "trial": t}
        if denom > 0:
            tr.update(
                "covariation_maximal_ratio",
                _covariation_maximal(f, g) / denom,
                np.inf,
                "finite",
                context=ctx,
            )
        phi = random_symbol(rng, dim, n)
        try:
            tr.update("bg_pairing_ratio", bg_pairing_check(phi, f), np.inf, "finite", context=ctx)
        except ValueError:
            pass

    # --- function-norm Hoelder
    for t in range(1000):
        dim, n = sizes[t % len(sizes)]
        rng = member_rng(seed, 6, t)
        f = _random_f(rng, dim, n)
        g = _random_f(rng, dim, n)
        p, q, r = [(2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (3.0, 6.0, 2.0), (np.inf, 2.0, 2.0)][t % 4]
        prod = DyadicMatrixFunction(n, dim, f.values @ g.values)
        tr.update(
            "holder_function_norm",
            lp_function_norm(f, p) * lp_function_norm(g, q) - lp_function_norm(prod, r),
            _SLACK_TOL,
            ">=",
            instances={"f": f, "g": g},
            context={"stream": 6, "trial": t, "p": p, "q": q, "r": r},
        )

    return [tr.result(name, thr, direction) for name, thr, direction in _CHECK_SPECS]


def _psd_sqrt(A: np.ndarray) -> np.ndarray:
    h = (A + A.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _covariation_maximal(f: DyadicMatrixFunction, g: DyadicMatrixFunction) -> float:
    """Integral of max_m || sum_{k<=m} (d_k f)(d_k g)* ||_1."""
    n, dim = f.n, f.dim
    running = np.zeros((1 << n, dim, dim), dtype=np.complex128)
    best = np.zeros(1 << n)
    for k in range(1, n + 1):
        dk_f = martingale_difference(f, k).values
        dk_g = martingale_difference(g, k).values
        running = running + dk_f @ np.conj(np.swapaxes(dk_g, -1, -2))
        gram = np.conj(np.swapaxes(running, -1, -2)) @ running
        gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
        tn = np.sqrt(np.clip(np.linalg.eigvalsh(gram), 0, None)).sum(axis=-1)
        best = np.maximum(best, tn)
    return float(best.mean())


# ---------------------------------------------------------------------------
# orchestration: grids, resume, output files


def _grid(config: ExperimentConfig):
    """Grid points in sweep order for a config, as params dicts."""
    name = config.experiment
    if name in ("hilbert_scaling", "cn_growth"):
        return [{"N": N} for N in config.N]
    if name == "lambda_vs_bmo":
        return [{"N": N, "n": n} for N in config.N for n in config.n]
    if name == "extrapolation_probe":
        return [{"N": N, "n": n, "p": p} for N in config.N for n in config.n for p in config.p]
    return [{}]  # inequality_suite


def _compute_point(config: ExperimentConfig, params: dict) -> list:
    name = config.experiment
    if name == "hilbert_scaling":
        return run_hilbert_scaling([params["N"]], seed=config.seed)
    if name == "cn_growth":
        return run_growth_cn(
            [params["N"]], seed=config.seed, ensemble=config.ensemble, sdp_tol=config.sdp_tol
        )
    if name == "lambda_vs_bmo":
        return run_lambda_vs_bmo(
            [params["N"]], [params["n"]], ensemble=config.ensemble,
            seed=config.seed, power_tol=config.power_tol,
        )
    if name == "extrapolation_probe":
        return run_extrapolation_probe(
            [params["p"]], params["N"], params["n"],
            ensemble=config.ensemble, seed=config.seed, power_tol=config.power_tol,
        )
    # inequality_suite: records carry pass flags and worst slacks;
    # failures are serialized for replay as they are found
    results = run_inequality_suite(seed=config.seed)
    records = []
    for r in results:
        if not r.passed:
            serialize_failure(r, config.output_dir, config.seed)
        records.append(
            ExperimentRecord(
                experiment="inequality_suite",
                params={},
                metrics={f"{r.name}_worst": r.worst, f"{r.name}_pass": 1.0 if r.passed else 0.0},
                seed=config.seed,
                wall_time=0.0,
            )
        )
    return records


def _format_value(x: float) -> str:
    return repr(float(x))


def _point_key(params: dict, seed: int) -> tuple:
    return (
        str(params.get("N", "")),
        str(params.get("n", "")),
        str(params.get("p", "")),
        str(seed),
    )


def _csv_rows(record: ExperimentRecord):
    for metric, value in record.metrics.items():
        yield (
            record.experiment,
            str(record.params.get("N", "")),
            str(record.params.get("n", "")),
            str(record.params.get("p", "")),
            str(record.seed),
            metric,
            _format_value(value),
        )


def write_records(records, csv_path, json_path=None, chash="") -> None:
    """Write records as RFC-4180 CSV (and optionally JSON)."""
    buf = io.StringIO()
    writer = csv.writer(buf)  # default dialect terminates rows with CRLF
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        for row in _csv_rows(rec):
            writer.writerow(row)
    Path(csv_path).write_text(buf.getvalue(), encoding="utf-8", newline="")
    if json_path is not None:
        payload = [
            {
                "experiment": r.experiment,
                "params": r.params,
                "metrics": r.metrics,
                "seed": r.seed,
                "wall_time": r.wall_time,
                "config_hash": chash or r.config_hash,
            }
            for r in records
        ]
        Path(json_path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def run_experiment(config: ExperimentConfig, verbose: bool = False):
    """Run a configured sweep with idempotent resume.

    Grid points already present in the output CSV are reused verbatim;
    only missing points are computed.  The final CSV is written in grid
    order, so a resumed run converges to the same bytes as a fresh one.
    Returns (csv_path, records) with records covering the computed points.
    """
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    chash = config_hash(config)
    csv_path = outdir / f"{config.experiment}.csv"
    json_path = outdir / f"{config.experiment}.json"
    hash_path = outdir / f"{config.experiment}.confighash"

    existing = {}
    if csv_path.exists():
        if hash_path.exists() and hash_path.read_text().strip() != chash:
            raise ValueError(
                f"{csv_path} was produced by a different config "
                f"(hash {hash_path.read_text().strip()} != {chash}); "
                "remove it or use a fresh output_dir"
            )
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is not None and tuple(header) != CSV_COLUMNS:
                raise ValueError(f"{csv_path} has unexpected columns {header}")
            for row in reader:
                key = (row[1], row[2], row[3], row[4])
                existing.setdefault(key, []).append(row)

    all_rows = []
    new_records = []
    for params in _grid(config):
        key = _point_key(params, config.seed)
        if key in existing:
            all_rows.extend(existing[key])
            continue
        if verbose:
            print(f"[{config.experiment}] computing {params or 'suite'} ...", flush=True)
        recs = _compute_point(config, params)
        for rec in recs:
            rec = ExperimentRecord(
                rec.experiment, rec.params, rec.metrics, rec.seed, rec.wall_time, chash
            )
            new_records.append(rec)
            all_rows.extend(list(_csv_rows(rec)))

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    for row in all_rows:
        writer.writerow(row)
    csv_path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    hash_path.write_text(chash + "\n", encoding="utf-8")
    if new_records:
        if json_path.exists():
            old = json.loads(json_path.read_text(encoding="utf-8"))
        else:
            old = []
        payload = old + [
            {
                "experiment": r.experiment,
                "params": r.params,
                "metrics": r.metrics,
                "seed": r.seed,
                "wall_time": r.wall_time,
                "config_hash": r.config_hash,
            }
            for r in new_records
        ]
        json_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return csv_path, new_records


def serialize_failure(result: CheckResult, outdir, seed: int) -> Path:
    """Write a failed check's replay information next to the records."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"failed_{result.name}.json"
    payload = {
        "check": result.name,
        "worst": result.worst,
        "threshold": result.threshold,
        "direction": result.direction,
        "seed": seed,
        "offending": result.offending,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return path
