"""Min-trace majorant SDP, its certificates, and the maximal norms."""

import numpy as np
import pytest

from dyadicop.core import (
    DyadicMatrixFunction,
    conditional_expectation,
    constant_function,
    rademacher,
)
from dyadicop.linalg import positive_part, psd_dominates, trace_pairing
from dyadicop.majorant import (
    MajorantCertificate,
    MajorantProblem,
    MajorantSolverError,
    dual_h1ncm_lower,
    max_norm_l1_positive,
    max_norm_l1_selfadjoint,
    min_trace_majorant,
    ncm_hardy_norm,
)

# Independent oracle for the non-commuting pair B1 = e11, B2 = (1/2)[[1,1],[1,1]]:
# dense 4-parameter Hermitian search (scipy SLSQP with feasibility restoration)
# gave 1.70710678118652, and the complementary-slackness dual certificate gave
# 1.7071067861835, sandwiching the optimum at 1 + 1/sqrt(2).  The oracle is
# regenerated by oracle_noncommuting_pair() below.
NONCOMMUTING_PAIR_VALUE = 1.0 + 1.0 / np.sqrt(2.0)


def oracle_noncommuting_pair():
    """Recompute the frozen oracle value (requires scipy)."""
    from scipy.optimize import minimize

    B1 = np.array([[1, 0], [0, 0]], dtype=complex)
    B2 = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)

    def mat(x):
        a, b, c, d = x
        return np.array([[a, b + 1j * c], [b - 1j * c, d]])

    cons = [
        {"type": "ineq", "fun": lambda x: np.linalg.eigvalsh(mat(x) - B1)[0].real},
        {"type": "ineq", "fun": lambda x: np.linalg.eigvalsh(mat(x) - B2)[0].real},
        {"type": "ineq", "fun": lambda x: np.linalg.eigvalsh(mat(x))[0].real},
    ]
    best = None
    for s in range(12):
        x0 = np.random.default_rng(s).standard_normal(4) * 2 + np.array([2, 0, 0, 2])
        while min(c["fun"](x0) for c in cons) < 0:
            x0[0] += 0.5
            x0[3] += 0.5
        r = minimize(
            lambda x: x[0] + x[3], x0, constraints=cons, method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-14},
        )
        if r.success and (best is None or r.fun < best.fun):
            best = r
    return best.fun


def random_hermitian(rng, dim):
    X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (X + X.conj().T) / 2


def assert_certificate_valid(cert: MajorantCertificate, prob: MajorantProblem, tol=1e-8):
    for B in prob.constraints:
        assert psd_dominates(cert.primal, B, tol=tol * 10)
    total = sum(cert.dual, np.zeros((prob.dim, prob.dim), dtype=complex))
    if cert.psd_multiplier is not None:
        total = total + cert.psd_multiplier
        assert np.linalg.eigvalsh(cert.psd_multiplier)[0] >= -1e-10
    assert np.abs(total - np.eye(prob.dim)).max() <= 1e-8
    for Z in cert.dual:
        assert np.linalg.eigvalsh(Z)[0] >= -1e-10
    assert cert.gap >= 0.0
    assert cert.gap <= 1e-6 * max(1.0, abs(cert.primal_value))


class TestMinTraceMajorant:
    def test_single_constraint_positive_part(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            dim = int(rng.choice([2, 3, 4, 8]))
            B = random_hermitian(rng, dim)
            prob = MajorantProblem(dim, (B,))
            cert = min_trace_majorant(prob)
            expected = float(np.trace(positive_part(B)).real)
            assert cert.primal_value == pytest.approx(expected, abs=1e-7)
            assert_certificate_valid(cert, prob)

    def test_commuting_diagonal_pair(self):
        prob = MajorantProblem(2, (np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 2.0]).astype(complex)))
        cert = min_trace_majorant(prob)
        assert cert.primal_value == pytest.approx(3.0, abs=1e-7)
        assert np.abs(cert.primal - np.diag([1.0, 2.0])).max() <= 1e-4

    def test_noncommuting_pair_matches_oracle(self):
        B1 = np.array([[1, 0], [0, 0]], dtype=complex)
        B2 = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        prob = MajorantProblem(2, (B1, B2))
        cert = min_trace_majorant(prob)
        assert cert.primal_value == pytest.approx(NONCOMMUTING_PAIR_VALUE, abs=1e-5)
        assert_certificate_valid(cert, prob)

    def test_scalar_problems_reduce_to_max(self):
        prob = MajorantProblem(1, tuple(np.array([[v]], dtype=complex) for v in (1.0, 2.0, 3.0)))
        cert = min_trace_majorant(prob)
        assert cert.primal_value == pytest.approx(3.0, abs=1e-7)

    def test_random_instances_certified(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            dim = int(rng.choice([2, 4, 8, 16]))
            J = int(rng.integers(1, 34))
            prob = MajorantProblem(dim, tuple(random_hermitian(rng, dim) for _ in range(J)))
            cert = min_trace_majorant(prob)
            assert_certificate_valid(cert, prob)

    def test_monotone_in_constraints(self):
        rng = np.random.default_rng(9)
        dim = 4
        Bs = [random_hermitian(rng, dim) for _ in range(6)]
        values = [
            min_trace_majorant(MajorantProblem(dim, tuple(Bs[: j + 1]))).primal_value
            for j in range(6)
        ]
        for a, b in zip(values, values[1:]):
            assert b >= a - 1e-6

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(11)
        Bs = tuple(random_hermitian(rng, 3) for _ in range(4))
        v1 = min_trace_majorant(MajorantProblem(3, Bs)).primal_value
        v5 = min_trace_majorant(MajorantProblem(3, tuple(5.0 * B for B in Bs))).primal_value
        assert v5 == pytest.approx(5.0 * v1, rel=1e-5)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            MajorantProblem(2, (np.array([[0.0, 1.0], [0.0, 0.0]]),))

    def test_iteration_cap_carries_certificate(self):
        rng = np.random.default_rng(13)
        prob = MajorantProblem(3, tuple(random_hermitian(rng, 3) for _ in range(3)))
        with pytest.raises(MajorantSolverError) as err:
            min_trace_majorant(prob, tol=1e-8, max_stages=1)
        cert = err.value.certificate
        assert cert.gap >= 0.0  # still a valid (loose) certificate

    def test_psd_flag_changes_bare_problem(self):
        # without the intrinsic A >= 0, a single negative constraint is optimal at B
        B = np.diag([-1.0, -2.0]).astype(complex)
        prob = MajorantProblem(2, (B,))
        with_psd = min_trace_majorant(prob, psd=True)
        without = min_trace_majorant(prob, psd=False)
        assert with_psd.primal_value == pytest.approx(0.0, abs=1e-7)
        assert without.primal_value == pytest.approx(-3.0, abs=1e-6)


class TestMaxNormPositive:
    def test_single_constant_psd(self):
        C = np.array([[2.0, 1.0], [1.0, 1.0]], dtype=complex)
        seq = [constant_function(C, n=2)]
        assert max_norm_l1_positive(seq) == pytest.approx(np.trace(C).real, abs=1e-6)

    def test_scalar_constants_give_max(self):
        seq = [constant_function(np.array([[v]]), n=1) for v in (1.0, 2.0, 3.0)]
        assert max_norm_l1_positive(seq) == pytest.approx(3.0, abs=1e-7)

    def test_rejects_non_psd(self):
        seq = [constant_function(np.array([[-1.0]]), n=0)]
        with pytest.raises(ValueError):
            max_norm_l1_positive(seq)

    def test_pointwise_decoupling_matches_joint_sdp(self):
        # two-atom instance vs one joint SDP on block-diagonal constraints:
        # the joint majorant may have off-diagonal blocks, yet compressing to
        # the diagonal preserves feasibility, so the values must agree
        rng = np.random.default_rng(21)
        dim, atoms = 3, 2
        seqs = []
        for _ in range(3):
            vals = np.empty((atoms, dim, dim), dtype=complex)
            for t in range(atoms):
                X = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
                vals[t] = X @ X.conj().T
            seqs.append(DyadicMatrixFunction(1, dim, vals))
        pointwise = max_norm_l1_positive(seqs, tol=1e-9)
        blocks = tuple(
            np.block(
                [
                    [f.values[0], np.zeros((dim, dim))],
                    [np.zeros((dim, dim)), f.values[1]],
                ]
            )
            for f in seqs
        )
        joint = min_trace_majorant(MajorantProblem(2 * dim, blocks), tol=1e-9, psd=False)
        assert pointwise == pytest.approx(joint.primal_value / 2.0, abs=1e-6)


class TestMaxNormSelfadjoint:
    def test_agrees_with_positive_variant_on_psd_input(self):
        rng = np.random.default_rng(31)
        seqs = []
        for _ in range(3):
            vals = np.empty((4, 2, 2), dtype=complex)
            for t in range(4):
                X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                vals[t] = X @ X.conj().T
            seqs.append(DyadicMatrixFunction(2, 2, vals))
        a = max_norm_l1_selfadjoint(seqs)
        b = max_norm_l1_positive(seqs)
        assert a == pytest.approx(b, abs=1e-6)

    def test_single_negative_constant(self):
        C = np.array([[1.0, 0.5], [0.5, 2.0]], dtype=complex)
        seq = [constant_function(-C, n=1)]
        assert max_norm_l1_selfadjoint(seq) == pytest.approx(np.trace(C).real, abs=1e-6)

    def test_scalar_signed_constants(self):
        seq = [constant_function(np.array([[-2.0]]), n=0), constant_function(np.array([[1.0]]), n=0)]
        assert max_norm_l1_selfadjoint(seq) == pytest.approx(2.0, abs=1e-7)

    def test_scaling(self):
        rng = np.random.default_rng(41)
        vals = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
        seq = [DyadicMatrixFunction(1, 2, vals)]
        v1 = max_norm_l1_selfadjoint(seq)
        v3 = max_norm_l1_selfadjoint([DyadicMatrixFunction(1, 2, 3.0 * vals)])
        assert v3 == pytest.approx(3.0 * v1, rel=1e-6)

    def test_monotone_in_sequence(self):
        rng = np.random.default_rng(43)
        members = [
            DyadicMatrixFunction(1, 2, rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2)))
            for _ in range(4)
        ]
        vals = [max_norm_l1_selfadjoint(members[: j + 1]) for j in range(4)]
        for a, b in zip(vals, vals[1:]):
            assert b >= a - 1e-6

    def test_reports_per_atom_and_gap(self):
        seq = [constant_function(np.array([[1.0]]), n=1)]
        report = max_norm_l1_selfadjoint(seq, details=True)
        assert len(report.per_atom) == 2
        assert report.max_gap <= 1e-6


class TestNcmHardyNorm:
    def test_psd_constant(self):
        C = np.array([[2.0, 0.0], [0.0, 1.0]], dtype=complex)
        assert ncm_hardy_norm(constant_function(C, n=2)) == pytest.approx(3.0, abs=1e-6)

    def test_first_rademacher(self):
        assert ncm_hardy_norm(rademacher(1, 3)) == pytest.approx(1.0, abs=1e-6)

    def test_dominates_l1_of_modulus(self):
        from dyadicop.linalg import lp_function_norm

        rng = np.random.default_rng(51)
        f = DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
        assert ncm_hardy_norm(f) >= lp_function_norm(f, 1) - 1e-6


class TestDualLowerBound:
    def test_rademacher_candidate_attains_one(self):
        phi = rademacher(1, 3)
        value = dual_h1ncm_lower(phi, candidates=[phi])
        assert value == pytest.approx(1.0, abs=1e-6)

    def test_monotone_in_candidate_set(self):
        rng = np.random.default_rng(61)
        phi = DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
        cands = [
            DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
            for _ in range(4)
        ]
        v2 = dual_h1ncm_lower(phi, candidates=cands[:2])
        v4 = dual_h1ncm_lower(phi, candidates=cands)
        assert v4 >= v2 - 1e-12

    def test_default_candidates_give_positive_bound(self):
        rng = np.random.default_rng(62)
        phi = DyadicMatrixFunction(3, 2, rng.standard_normal((8, 2, 2)) + 1j * rng.standard_normal((8, 2, 2)))
        assert dual_h1ncm_lower(phi, seed=0) > 0.0

    def test_is_a_lower_bound_via_pairing(self):
        # every candidate ratio certifies: |<f, phi>| <= value * ncm(f)
        phi = rademacher(1, 2)
        f = rademacher(2, 2)
        value = dual_h1ncm_lower(phi, candidates=[f, phi])
        assert value >= abs(trace_pairing(f, phi)) / ncm_hardy_norm(f) - 1e-9


@pytest.mark.slow
def test_oracle_regeneration_matches_frozen_value():
    pytest.importorskip("scipy")
    assert oracle_noncommuting_pair() == pytest.approx(NONCOMMUTING_PAIR_VALUE, abs=1e-9)
