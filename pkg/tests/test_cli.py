"""Command-line interface: exit codes, file outputs, JSON round-trips."""

import json
import math

import pytest

from mubc import (
    MUConfiguration,
    ProductVector,
    QuadNum,
    SearchProblem,
    config_from_json,
    config_to_json,
    verify_mu,
)
from mubc.cli import build_manifest, fixture_config, load_fixture, main

OK, FALSE, INPUT_ERROR, NO_CONVERGENCE = 0, 1, 2, 3


@pytest.fixture()
def write_json(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj), encoding="utf-8")
        return str(path)

    return _write


@pytest.fixture()
def golden5_path(write_json):
    return write_json("golden5.json", load_fixture("golden5.json"))


@pytest.fixture()
def asym_path(write_json):
    return write_json("asym.json", load_fixture("asymmetric-triple.json"))


@pytest.fixture()
def sym_path(write_json):
    return write_json("sym.json", load_fixture("symmetric-triple.json"))


class TestFixtures:
    def test_fixtures_load_and_verify(self):
        for name in ("asymmetric-triple.json", "symmetric-triple.json", "golden5.json"):
            cfg = fixture_config(name)
            tolerance = 1e-12 if cfg.mode == "numeric" else 1e-12
            assert verify_mu(cfg, tolerance=tolerance).verdict, name

    def test_golden5_is_exact(self):
        cfg = fixture_config("golden5.json")
        assert cfg.mode == "exact"
        assert all(
            isinstance(f.q, QuadNum) and isinstance(f.p, QuadNum)
            for v in cfg.vectors
            for f in v.factors
        )


class TestVerifyCommand:
    def test_mu_config_exits_zero(self, golden5_path, capsys):
        assert main(["verify", golden5_path]) == OK
        out = capsys.readouterr().out
        assert "MU" in out

    def test_not_mu_exits_one(self, write_json):
        bad = {
            "N": 1,
            "mode": "exact",
            "hbar": 1.0,
            "K": "1",
            "vectors": [[["0", "1"]], [["1", "0"]], [["1", "2"]]],
        }
        path = write_json("bad.json", bad)
        assert main(["verify", path]) == FALSE

    def test_malformed_json_exits_two(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"vectors": [[1,', encoding="utf-8")
        assert main(["verify", str(path)]) == INPUT_ERROR
        err = capsys.readouterr().err
        assert "broken.json:1:" in err

    def test_missing_file_exits_two(self):
        assert main(["verify", "/nonexistent/nope.json"]) == INPUT_ERROR

    def test_missing_field_diagnostic(self, write_json, capsys):
        path = write_json("incomplete.json", {"mode": "exact"})
        assert main(["verify", path]) == INPUT_ERROR
        assert "vectors" in capsys.readouterr().err

    def test_infer_k(self, write_json):
        cfg = {
            "N": 1,
            "mode": "exact",
            "hbar": 1.0,
            "K": None,
            "vectors": [[["0", "-2"]], [["2", "0"]], [["2", "2"]]],
        }
        path = write_json("infer.json", cfg)
        assert main(["verify", path, "--infer-k"]) == OK

    def test_tolerance_flag(self, sym_path):
        assert main(["verify", sym_path, "--tolerance", "1e-15"]) == OK

    def test_out_report(self, golden5_path, tmp_path):
        out = tmp_path / "report.json"
        assert main(["verify", golden5_path, "--out", str(out)]) == OK
        blob = json.loads(out.read_text())
        assert blob["verdict"] is True
        assert len(blob["pairs"]) == 10

    def test_csv(self, golden5_path, tmp_path):
        out = tmp_path / "report.csv"
        assert main(["verify", golden5_path, "--csv", str(out)]) == OK
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 11  # header + 10 pairs
        assert lines[0].split(",")[0] == "i"


class TestCertifyCommand:
    def test_asymmetric_triple(self, asym_path, capsys):
        assert main(["certify-n1", asym_path]) == OK
        out = capsys.readouterr().out
        assert "certificate valid: yes" in out
        # one row per sign pattern
        assert sum(line.count("+") + line.count("-") >= 3 for line in out.splitlines()) >= 8

    def test_symmetric_triple(self, sym_path):
        assert main(["certify-n1", sym_path]) == OK

    def test_non_triple_rejected(self, golden5_path):
        assert main(["certify-n1", golden5_path]) == INPUT_ERROR

    def test_certificate_out(self, asym_path, tmp_path):
        out = tmp_path / "cert.json"
        assert main(["certify-n1", asym_path, "--out", str(out)]) == OK
        blob = json.loads(out.read_text())
        assert blob["valid"] is True
        assert len(blob["records"]) == 8


class TestEnumerateCommand:
    def test_basic(self, capsys):
        assert main(["enumerate-n1", "--k", "1", "--height", "1"]) == OK
        out = capsys.readouterr().out
        assert "class" in out

    def test_emitted_configs_are_readable(self, tmp_path):
        out = tmp_path / "classes.json"
        assert main(["enumerate-n1", "--k", "1", "--height", "1", "--out", str(out)]) == OK
        blobs = json.loads(out.read_text())
        assert blobs
        for blob in blobs:
            cfg = config_from_json(blob)
            assert verify_mu(cfg).verdict

    def test_unreachable_k_exits_one(self, capsys):
        assert main(["enumerate-n1", "--k", "50", "--height", "1"]) == FALSE

    def test_bad_k(self):
        assert main(["enumerate-n1", "--k", "not-a-number", "--height", "1"]) == INPUT_ERROR


class TestEquivalenceCommand:
    def test_found(self, asym_path, sym_path, capsys):
        assert main(["equivalence", asym_path, sym_path]) == OK
        out = capsys.readouterr().out
        assert "scale" in out

    def test_not_found(self, asym_path, write_json):
        other = {
            "N": 1,
            "mode": "exact",
            "hbar": 1.0,
            "K": "1",
            "vectors": [[["0", "1"]], [["1", "0"]], [["2", "1"]]],
        }
        path = write_json("other.json", other)
        assert main(["equivalence", asym_path, path]) == FALSE

    def test_non_triple(self, asym_path, golden5_path):
        assert main(["equivalence", asym_path, golden5_path]) == INPUT_ERROR

    def test_out(self, asym_path, sym_path, tmp_path):
        out = tmp_path / "eq.json"
        assert main(["equivalence", asym_path, sym_path, "--out", str(out)]) == OK
        blob = json.loads(out.read_text())
        assert blob["residual"] < 1e-10
        assert blob["scale"] == pytest.approx(math.sqrt(math.sqrt(3.0) / 2.0), rel=1e-12)


class TestMetaplecticCommand:
    def test_overlap_quarter_rotation(self, write_json, capsys):
        path = write_json("j.json", {"N": 1, "ordering": "stacked", "rows": [[0.0, -1.0], [1.0, 0.0]]})
        assert main(["metaplectic", "overlap", path]) == OK
        out = capsys.readouterr().out
        assert "0.159154943" in out

    def test_overlap_identity_singular(self, write_json):
        path = write_json("eye.json", {"N": 1, "ordering": "stacked", "rows": [[1.0, 0.0], [0.0, 1.0]]})
        assert main(["metaplectic", "overlap", path]) == INPUT_ERROR

    def test_overlap_hbar(self, write_json, capsys):
        path = write_json("j.json", {"N": 1, "ordering": "stacked", "rows": [[0.0, -1.0], [1.0, 0.0]]})
        assert main(["metaplectic", "overlap", path, "--hbar", "2"]) == OK
        assert "0.0795774715" in capsys.readouterr().out

    def test_compose(self, write_json, capsys):
        theta1, theta2 = 0.3, 1.1
        def rot(t):
            return [[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]
        a = write_json("a.json", {"N": 1, "ordering": "stacked", "rows": rot(theta1)})
        b = write_json("b.json", {"N": 1, "ordering": "stacked", "rows": rot(theta2)})
        assert main(["metaplectic", "compose", a, b]) == OK
        want = 1.0 / (2 * math.pi * abs(math.sin(theta2 - theta1)))
        assert f"{want:.9f}"[:9] in capsys.readouterr().out

    def test_compose_same_matrix(self, write_json):
        path = write_json("r.json", {"N": 1, "ordering": "stacked", "rows": [[0.0, -1.0], [1.0, 0.0]]})
        assert main(["metaplectic", "compose", path, path]) == INPUT_ERROR

    def test_special_m(self, capsys):
        assert main(["metaplectic", "special-m", "--q", "1", "--p", "1"]) == OK
        out = capsys.readouterr().out
        assert "image" in out or "0" in out

    def test_special_m_exact(self, tmp_path):
        out = tmp_path / "m.json"
        rc = main([
            "metaplectic", "special-m", "--q", "3/4", "--p", "-2",
            "--mu", "1/3", "--mode", "exact", "--out", str(out),
        ])
        assert rc == OK
        blob = json.loads(out.read_text())
        assert blob["ordering"] == "stacked"
        # emitted matrix spec is accepted back by the reader
        from mubc import MetaplecticSpec

        spec = MetaplecticSpec.from_json(blob)
        assert spec.to_json()["N"] == 1

    def test_matrix_not_symplectic(self, write_json):
        path = write_json("notm.json", {"N": 1, "ordering": "stacked", "rows": [[2.0, 0.0], [0.0, 1.0]]})
        assert main(["metaplectic", "overlap", path]) == INPUT_ERROR


class TestOracleCommand:
    def test_pair(self, write_json, capsys):
        a = write_json("A.json", {"Q": 1.0, "P": 1.0})
        b = write_json("B.json", {"Q": 1.0, "P": -1.0})
        assert main(["oracle", "pair", a, b]) == OK
        out = capsys.readouterr().out
        assert "converged: yes" in out
        assert "epsilon" in out

    def test_pair_parallel(self, write_json, capsys):
        a = write_json("A.json", {"Q": 1.0, "P": 1.0})
        b = write_json("B.json", {"Q": 2.0, "P": 2.0})
        assert main(["oracle", "pair", a, b]) == INPUT_ERROR
        assert "parallel" in capsys.readouterr().err.lower()

    def test_pair_state_field_diagnostics(self, write_json, capsys):
        a = write_json("A.json", {"Q": 1.0})
        b = write_json("B.json", {"Q": 1.0, "P": -1.0})
        assert main(["oracle", "pair", a, b]) == INPUT_ERROR
        assert "P" in capsys.readouterr().err

    def test_pair_out_json(self, write_json, tmp_path):
        a = write_json("A.json", {"Q": 1.0, "P": 1.0, "alpha": 0.5})
        b = write_json("B.json", {"Q": 1.0, "P": -1.0})
        out = tmp_path / "quad.json"
        assert main(["oracle", "pair", a, b, "--out", str(out)]) == OK
        blob = json.loads(out.read_text())
        assert blob["converged"] is True
        assert blob["value"] == pytest.approx(1.0 / (4 * math.pi), rel=1e-6)

    def test_scan(self, capsys):
        assert main(["oracle", "scan", "--thetas", "0,1.5707963267948966"]) == OK
        out = capsys.readouterr().out
        assert "agree" in out

    def test_scan_default_angles(self):
        assert main(["oracle", "scan"]) == OK

    def test_scan_csv(self, tmp_path):
        out = tmp_path / "scan.csv"
        rc = main(["oracle", "scan", "--thetas", "0,2.0943951023931953,4.1887902047863905", "--csv", str(out)])
        assert rc == OK
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 4  # header + 3 pairs

    def test_scan_disagreement_exit(self, capsys):
        # angles pi apart give a parallel row; scan flags but the live rows pass
        assert main(["oracle", "scan", "--thetas", "0.2,3.3415926535897933,1.0"]) == OK


class TestSearchCommand:
    def test_seed_required(self, write_json):
        prob = SearchProblem(
            target_k=1.0,
            seeds=(
                ProductVector.of((0.0, -1.0)),
                ProductVector.of((1.0, 0.0)),
                ProductVector.of((1.0, 1.0)),
            ),
            free_slots=1,
            domain="real",
        )
        path = write_json("prob.json", prob.to_json())
        with pytest.raises(SystemExit):
            main(["search", path])

    def test_no_improvement_exits_one(self, write_json):
        prob = SearchProblem(
            target_k=1.0,
            seeds=(
                ProductVector.of((0.0, -1.0)),
                ProductVector.of((1.0, 0.0)),
                ProductVector.of((1.0, 1.0)),
            ),
            free_slots=1,
            domain="real",
        )
        path = write_json("prob.json", prob.to_json())
        assert main(["search", path, "--seed", "0", "--budget", "2000", "--restarts", "4"]) == FALSE

    def test_extension_exits_zero(self, write_json, tmp_path):
        prob = SearchProblem(
            target_k=1.0,
            seeds=(ProductVector.of((0.0, -1.0)), ProductVector.of((1.0, 0.0))),
            free_slots=1,
            domain="real",
        )
        path = write_json("pair.json", prob.to_json())
        out = tmp_path / "report.json"
        rc = main([
            "search", path, "--seed", "3", "--budget", "20000",
            "--restarts", "10", "--out", str(out),
        ])
        assert rc == OK
        blob = json.loads(out.read_text())
        assert blob["outcome"] == "extended"
        assert blob["residual"] <= 1e-9
        assert blob["pair_residuals"]

    def test_problem_round_trip(self, write_json):
        prob = SearchProblem(
            target_k=QuadNum(1),
            seeds=(
                ProductVector.of((QuadNum(0), QuadNum(-1))),
                ProductVector.of((QuadNum(1), QuadNum(0))),
            ),
            free_slots=1,
            domain="golden-lattice",
            height=1,
        )
        blob = prob.to_json()
        back = SearchProblem.from_json(blob)
        assert back.to_json() == blob
        path = write_json("lat.json", blob)
        assert main(["search", path, "--seed", "0", "--budget", "10000"]) == OK


class TestReproduceCommand:
    def test_default_all_pass(self, capsys):
        assert main(["reproduce"]) == OK
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_strict_tolerance_fails_quadrature_claims(self, capsys):
        assert main(["reproduce", "--tolerance", "0"]) == FALSE
        out = capsys.readouterr().out
        assert "FAIL" in out
        # exact claims still pass at zero tolerance
        assert "PASS" in out

    def test_csv(self, tmp_path):
        out = tmp_path / "manifest.csv"
        assert main(["reproduce", "--csv", str(out)]) == OK
        lines = out.read_text().strip().splitlines()
        assert len(lines) >= 13  # header + 12 claims


class TestManifest:
    def test_default_claims_pass(self):
        entries = build_manifest()
        assert len(entries) == 12
        assert all(entry.passed for entry in entries)

    def test_hbar_two_claims_pass(self):
        entries = build_manifest(hbar=2.0)
        assert all(entry.passed for entry in entries)

    def test_zero_tolerance_splits_exact_from_quadrature(self):
        entries = build_manifest(tolerance=0.0)
        failed = {entry.claim for entry in entries if not entry.passed}
        passed = {entry.claim for entry in entries if entry.passed}
        assert failed  # float-convergence claims cannot meet tolerance 0
        assert "golden-five-exact" in passed
        assert "asymmetric-triple-exact" in passed
        assert "no-fourth-certificates" in passed


class TestRoundTripInvariant:
    def test_config_json_round_trip_through_cli_reader(self, golden5_path):
        blob = json.loads(open(golden5_path).read())
        cfg = config_from_json(blob)
        again = config_to_json(cfg)
        assert config_to_json(config_from_json(again)) == again

    def test_all_fixture_round_trips(self):
        for name in ("asymmetric-triple.json", "symmetric-triple.json", "golden5.json"):
            blob = load_fixture(name)
            emitted = config_to_json(config_from_json(blob))
            assert config_to_json(config_from_json(emitted)) == emitted
