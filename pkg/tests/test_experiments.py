"""Experiment harness: configs, records, CSV determinism, resume."""

import json

import numpy as np
import pytest

from dyadicop.ensembles import member_rng, random_symbol, symbol_ensemble
from dyadicop.experiments import (
    ExperimentConfig,
    config_hash,
    load_config,
    parse_config,
    run_experiment,
    run_extrapolation_probe,
    run_growth_cn,
    run_hilbert_scaling,
    run_inequality_suite,
    run_lambda_vs_bmo,
    serialize_failure,
    write_records,
)
from dyadicop.norms import bmo_m_norm


class TestConfigParsing:
    def test_round_trip(self):
        text = """
        # sweep over sizes
        experiment = lambda_vs_bmo
        N = 1, 2, 4
        n = 3, 5
        ensemble = 20
        seed = 7
        output_dir = out
        """
        cfg = parse_config(text)
        assert cfg.experiment == "lambda_vs_bmo"
        assert cfg.N == (1, 2, 4)
        assert cfg.n == (3, 5)
        assert cfg.ensemble == 20
        assert cfg.seed == 7

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown key"):
            parse_config("experiment = hilbert_scaling\nbogus = 1\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            parse_config("experiment = hilbert_scaling\nseed = 1\nseed = 2\n")

    def test_missing_experiment_rejected(self):
        with pytest.raises(ValueError, match="experiment"):
            parse_config("N = 1, 2\n")

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ValueError, match="unknown experiment"):
            parse_config("experiment = nonsense\n")

    def test_bad_value_rejected(self):
        with pytest.raises(ValueError, match="bad value"):
            parse_config("experiment = hilbert_scaling\nN = two\n")

    def test_hash_stable_under_reordering(self):
        a = parse_config("experiment = hilbert_scaling\nN = 2, 4\nseed = 1\n")
        b = parse_config("seed = 1\nN = 2, 4\nexperiment = hilbert_scaling\n")
        assert config_hash(a) == config_hash(b)


class TestEnsembles:
    def test_member_rng_is_stable(self):
        a = member_rng(3, 1, 2).standard_normal(4)
        b = member_rng(3, 1, 2).standard_normal(4)
        assert np.array_equal(a, b)

    def test_symbols_reproducible(self):
        xs = [f.values for f in symbol_ensemble(2, 4, 5, seed=9)]
        ys = [f.values for f in symbol_ensemble(2, 4, 5, seed=9)]
        for x, y in zip(xs, ys):
            assert np.array_equal(x, y)

    def test_level_decay_keeps_bmo_moderate(self):
        # the scale 2**(-k/2) keeps bmo_M roughly flat across resolutions
        vals = {}
        for n in (3, 7):
            vals[n] = np.mean(
                [bmo_m_norm(random_symbol(member_rng(0, n, i), 2, n)).value for i in range(20)]
            )
        assert vals[7] <= 3.0 * vals[3]

    def test_structured_members_present(self):
        members = list(symbol_ensemble(2, 4, 4, seed=0))
        assert len(members) == 4
        # second structured member is the refined sharpness function (dim <= n)
        from dyadicop.linalg import lp_function_norm

        assert lp_function_norm(members[1], 2) == pytest.approx(1.0, abs=1e-10)


class TestRunners:
    def test_hilbert_scaling_records(self):
        recs = run_hilbert_scaling([2, 8], seed=0)
        assert [r.params["N"] for r in recs] == [2, 8]
        first = recs[0].metrics
        assert first["h_norm"] == pytest.approx(1.0)
        assert first["th_norm"] == pytest.approx(1.0)

    def test_hilbert_scaling_requires_ascending(self):
        with pytest.raises(ValueError):
            run_hilbert_scaling([8, 2])

    def test_growth_cn_small(self):
        recs = run_growth_cn([2, 4], seed=0, ensemble=4, demo_limit=0)
        by_n = {r.params["N"]: r.metrics for r in recs}
        assert by_n[2]["L"] == pytest.approx(1.0, abs=1e-10)
        assert "cn_lower_sdp" in by_n[2]
        # empirical SDP bound must not certify below 1 at N=2 (corner m=N is
        # the full matrix, so the sequence value is at least ||A||_1 = 1)
        assert by_n[2]["cn_lower_sdp"] >= 1.0 - 1e-6

    def test_lambda_vs_bmo_scalar_rademacher_ratio(self):
        recs = run_lambda_vs_bmo([1], [1], ensemble=1, seed=0)
        # the single structured member at n=1 is C*r_1 with ratio exactly 1
        assert recs[0].metrics["ratio_max"] == pytest.approx(1.0, abs=1e-6)

    def test_extrapolation_probe_p2_column(self):
        recs = run_extrapolation_probe([2.0, 3.0], 2, 3, ensemble=4, seed=0)
        p2 = next(r for r in recs if r.params["p"] == 2.0)
        assert p2.metrics["p2_rel_dev_max"] <= 1e-6
        assert all(np.isfinite(r.metrics["ratio_max"]) for r in recs)


class TestInequalitySuite:
    def test_all_checks_pass(self):
        results = run_inequality_suite(seed=0, trials=60)
        failing = [r.name for r in results if not r.passed]
        assert failing == []

    def test_check_names_stable(self):
        names = [r.name for r in run_inequality_suite(seed=1, trials=5)]
        assert "telescoping_identity" in names
        assert "bmo_ordering" in names
        assert "doob_ratio_p2" in names
        assert len(names) == len(set(names))

    def test_failure_serialization(self, tmp_path):
        results = run_inequality_suite(seed=0, trials=5)
        path = serialize_failure(results[0], tmp_path, seed=0)
        payload = json.loads(path.read_text())
        assert payload["check"] == results[0].name
        assert payload["seed"] == 0


class TestRunExperimentIO:
    def _config(self, outdir):
        return ExperimentConfig(
            experiment="hilbert_scaling", N=(2, 4, 8), seed=0, output_dir=str(outdir)
        )

    def test_csv_written_in_grid_order(self, tmp_path):
        cfg = self._config(tmp_path)
        csv_path, recs = run_experiment(cfg)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "experiment,N,n,p,seed,metric,value"
        ns = [line.split(",")[1] for line in lines[1:]]
        assert ns == sorted(ns, key=int)

    def test_rerun_is_byte_identical_and_computes_nothing(self, tmp_path):
        cfg = self._config(tmp_path)
        csv_path, _ = run_experiment(cfg)
        before = csv_path.read_bytes()
        _, new = run_experiment(cfg)
        assert new == []
        assert csv_path.read_bytes() == before

    def test_fresh_run_matches_resumed_run(self, tmp_path):
        cfg_a = self._config(tmp_path / "a")
        run_experiment(ExperimentConfig(experiment="hilbert_scaling", N=(2,), seed=0, output_dir=str(tmp_path / "a")))
        # resuming with the full grid must converge to the fresh-run bytes
        with pytest.raises(ValueError):
            run_experiment(cfg_a)  # different config hash over same file
        cfg_b = self._config(tmp_path / "b")
        csv_b, _ = run_experiment(cfg_b)
        cfg_c = self._config(tmp_path / "c")
        csv_c, _ = run_experiment(cfg_c)
        assert csv_b.read_bytes() == csv_c.read_bytes()

    def test_crlf_line_endings(self, tmp_path):
        cfg = self._config(tmp_path)
        csv_path, _ = run_experiment(cfg)
        raw = csv_path.read_bytes()
        assert b"\r\n" in raw

    def test_json_records_carry_config_hash(self, tmp_path):
        cfg = self._config(tmp_path)
        run_experiment(cfg)
        payload = json.loads((tmp_path / "hilbert_scaling.json").read_text())
        assert all(rec["config_hash"] == config_hash(cfg) for rec in payload)

    def test_write_records_standalone(self, tmp_path):
        recs = run_hilbert_scaling([2], seed=0)
        write_records(recs, tmp_path / "out.csv", tmp_path / "out.json")
        assert (tmp_path / "out.csv").exists()
        assert (tmp_path / "out.json").exists()

    def test_load_config_file(self, tmp_path):
        path = tmp_path / "c.cfg"
        path.write_text("experiment = hilbert_scaling\nN = 2\n", encoding="utf-8")
        assert load_config(path).N == (2,)
