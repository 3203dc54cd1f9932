import csv
import io as _io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from coventa import io, states
from coventa.cli import main
from coventa.measures import ISOTROPIC_THRESHOLD


@pytest.fixture
def runner():
    return CliRunner()


def rows(text):
    return list(csv.DictReader(_io.StringIO(text)))


@pytest.fixture
def bell_file(tmp_path, bell):
    path = tmp_path / "bell.json"
    io.save_state(bell, path)
    return path


def test_measure_bell(runner, bell_file):
    res = runner.invoke(main, ["measure", "--input", str(bell_file)])
    assert res.exit_code == 0, res.output
    out = rows(res.output)
    assert {r["route"] for r in out} == {"CovarianceSum", "HilbertSchmidt", "PureSchmidt", "FromInvariants"}
    for r in out:
        assert abs(float(r["G"]) - 0.75) < 1e-9 and r["verdict"] == "Entangled"
        assert r["state_id"] == "bell"


def test_measure_product(runner, tmp_path):
    path = tmp_path / "prod.json"
    io.save_state(states.basis_state(3, 3, 1, 2), path)
    res = runner.invoke(main, ["measure", "--input", str(path), "--set", "mub"])
    assert res.exit_code == 0, res.output
    for r in rows(res.output):
        assert abs(float(r["G"])) < 1e-12 and r["verdict"] == "Inconclusive"


def test_measure_malformed(runner, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim_a": 2, "dim_b": 2, "kind": "pure", "data": [[1, 0]]}))
    res = runner.invoke(main, ["measure", "--input", str(path)])
    assert res.exit_code == 2
    assert "'data'" in res.output
    path.write_text("{")
    assert runner.invoke(main, ["measure", "--input", str(path)]).exit_code == 2
    assert runner.invoke(main, ["measure", "--input", str(tmp_path / "nope.json")]).exit_code == 2


def test_measure_mub_needs_prime(runner, tmp_path):
    path = tmp_path / "s.json"
    io.save_state(states.random_mixed_state(4, 2, 0), path)
    res = runner.invoke(main, ["measure", "--input", str(path), "--set", "mub"])
    assert res.exit_code == 2 and "NotPrime" in res.output


def test_isotropic_scan(runner):
    res = runner.invoke(main, ["isotropic-scan", "--alpha-min", "0", "--alpha-max", "1", "--step", "0.05"])
    assert res.exit_code == 0
    out = rows(res.output)
    assert len(out) == 21
    g = [float(r["G"]) for r in out]
    assert all(b > a for a, b in zip(g, g[1:]))
    for r in out:
        a = float(r["alpha"])
        assert abs(float(r["G"]) - 8 * a * a / 9) < 1e-10
        assert (r["verdict"] == "Entangled") == (a > ISOTROPIC_THRESHOLD)
    assert abs(float(out[-1]["G"]) - 8 / 9) < 1e-10
    half = out[10]
    assert half["alpha"] == "0.5" and abs(float(half["G"]) - 2 / 9) < 1e-10 and half["verdict"] == "Inconclusive"


def test_isotropic_scan_out_of_range(runner):
    res = runner.invoke(main, ["isotropic-scan", "--alpha-min", "-0.5"])
    assert res.exit_code == 2 and "AlphaOutOfRange" in res.output


@pytest.mark.parametrize("n", [3, 7])
def test_audit_pass(runner, n):
    res = runner.invoke(main, ["audit", "--n", str(n)])
    assert res.exit_code == 0, res.output
    assert res.output.count("PASS") == 3


def test_audit_composite_mub(runner):
    res = runner.invoke(main, ["audit", "--n", "4", "--mub"])
    assert res.exit_code == 2
    assert "gellmann N=4" in res.output and "PASS" in res.output and "NotPrime" in res.output


def test_audit_tolerance_override(runner, monkeypatch):
    monkeypatch.setenv("COVENTA_TOL", "1e-20")
    assert runner.invoke(main, ["audit", "--n", "3"]).exit_code == 3


def test_estimate_bell(runner, bell_file):
    args = ["estimate", "--input", str(bell_file), "--set", "mub", "--shots", "100000",
            "--trials", "100", "--seed", "7"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    out = rows(res.output)
    assert len(out) == 101
    summary = out[-1]
    assert summary["trial"] == "summary" and summary["settings"] == "9"
    assert abs(float(summary["estimate"]) - 0.75) < 0.01
    again = runner.invoke(main, args)
    assert again.output == res.output


def test_estimate_settings_columns(runner, tmp_path):
    path = tmp_path / "q.json"
    io.save_state(states.random_pure_state(3, 3, 4), path)
    for name, count in (("mub", "16"), ("gellmann", "49")):
        res = runner.invoke(main, ["estimate", "--input", str(path), "--set", name, "--shots", "100",
                                   "--trials", "2", "--seed", "1"])
        assert res.exit_code == 0, res.output
        assert {r["settings"] for r in rows(res.output)} == {count}


def test_estimate_requires_seed(runner, bell_file):
    res = runner.invoke(main, ["estimate", "--input", str(bell_file), "--shots", "10"])
    assert res.exit_code == 2


def test_random_scan_pure(runner):
    res = runner.invoke(main, ["random-scan", "--dims", "3,3", "--count", "2000", "--kind", "pure", "--seed", "1"])
    assert res.exit_code == 0, res.output
    out = [r for r in rows(res.output) if r.get("index", "").isdigit()]
    assert len(out) == 2000
    assert max(abs(float(r["residual"])) for r in out) < 1e-9


def test_random_scan_pure_qubits_max(runner):
    res = runner.invoke(main, ["random-scan", "--dims", "2,2", "--count", "2000", "--kind", "pure", "--seed", "2"])
    assert res.exit_code == 0
    out = [r for r in rows(res.output) if r.get("index", "").isdigit()]
    assert max(float(r["G"]) for r in out) <= 0.75 + 1e-9


def test_random_scan_separable(runner, tmp_path):
    target = tmp_path / "sep.csv"
    res = runner.invoke(main, ["random-scan", "--dims", "3,3", "--count", "2000", "--kind", "separable",
                               "--seed", "3", "--out", str(target)])
    assert res.exit_code == 0
    out = rows(target.read_text())
    assert len(out) == 2000
    assert max(float(r["G"]) for r in out) <= 0.25
    assert {r["verdict"] for r in out} == {"Inconclusive"}


def test_random_scan_bad_dims(runner):
    res = runner.invoke(main, ["random-scan", "--dims", "3x3", "--count", "1", "--kind", "pure", "--seed", "0"])
    assert res.exit_code == 2


def test_csv_precision(runner, bell_file):
    res = runner.invoke(main, ["measure", "--input", str(bell_file)])
    g = rows(res.output)[1]["G"]
    assert len(g.replace("0.", "").lstrip("0")) <= 12


def test_exports(runner, tmp_path):
    res = runner.invoke(main, ["export-mub", "--n", "5"])
    assert res.exit_code == 0 and len(json.loads(res.output)["bases"]) == 6
    target = tmp_path / "g.json"
    res = runner.invoke(main, ["export-generators", "--n", "3", "--set", "mub", "--out", str(target)])
    assert res.exit_code == 0
    ops = json.loads(target.read_text())["ops"]
    m = np.array(ops[0])
    assert m.shape == (3, 3, 2)
    assert runner.invoke(main, ["export-mub", "--n", "6"]).exit_code == 2
