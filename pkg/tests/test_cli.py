import csv
import io
import json
import math

import pytest

from asym_chsh import cli
from asym_chsh.lhv import pr_box


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, out=out)
    return code, out.getvalue()


def test_fmt_twelve_significant_digits():
    assert cli.fmt(math.sqrt(5)) == "2.2360679775"
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(0.5) == "0.5"


def test_lambda_max_example():
    code, text = run(["lambda-max", "--scenario", '{"theta_a": 0, "theta_b": 0.11134101434096388, "eta": 0.75}',
                      "--kind", "asym"])
    assert code == 0
    report = json.loads(text)
    assert report["lambda_max_numeric"] == pytest.approx(math.sqrt(5), abs=1e-8)
    assert report["discrepancy"] < 1e-8 and report["violates"]


def test_lambda_max_single_from_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text('{"theta_a": 0.3, "theta_b": -0.2, "eta": 0.4}')
    code, text = run(["lambda-max", "--scenario", str(path), "--kind", "single"])
    report = json.loads(text)
    assert code == 0 and report["trig_discrepancy"] < 1e-9


def test_lambda_max_bad_scenario():
    code, _ = run(["lambda-max", "--scenario", '{"theta_a": 0}', "--kind", "asym"])
    assert code == 2
    code, _ = run(["lambda-max", "--scenario", '{"theta_a": 0, "theta_b": 0, "eta": 2}'])
    assert code == 2


def test_bound_scan_bound_only():
    code, text = run(["bound-scan", "--eta-start", "0.5", "--eta-stop", "0.7", "--steps", "3", "--no-optimizer"])
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:4] == ["eta", "violation_ub", "min_violating_C2", "window_flag"]
    assert rows[1][3] == "no-violation"
    assert rows[3][1] == cli.fmt(0.9988109393579072) and rows[3][3] == "inside"
    assert float(rows[2][5]) == pytest.approx(0.2 / 0.52, abs=1e-11)


def test_bound_scan_relaxed_flags_outside():
    code, text = run(["bound-scan", "--eta-start", "0.6", "--eta-stop", "0.9", "--steps", "2",
                      "--no-optimizer", "--relaxed-window"])
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0 and rows[2][3] == "outside derivation window"
    code, _ = run(["bound-scan", "--eta-start", "0.6", "--eta-stop", "0.9", "--steps", "2"])
    assert code == 2


@pytest.mark.slow
def test_bound_scan_with_optimizer_is_deterministic():
    argv = ["bound-scan", "--eta-start", "0.55", "--eta-stop", "0.6", "--steps", "2"]
    code, first = run(argv)
    assert code == 0 and run(argv)[1] == first
    for row in list(csv.reader(io.StringIO(first)))[1:]:
        assert float(row[4]) < float(row[1])


@pytest.mark.parametrize("argv", [
    ["bound-scan", "--eta-start", "0.7", "--eta-stop", "0.6", "--steps", "3"],
    ["bound-scan", "--eta-start", "0.4", "--eta-stop", "0.6", "--steps", "3"],
    ["bound-scan", "--eta-start", "0.5", "--eta-stop", "0.6", "--steps", "1"],
    ["prop1-scan", "--eta", "1.5"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == 2


def test_lhv_check_rational(tmp_path):
    path = tmp_path / "pr.json"
    path.write_text(pr_box(exact=True).to_json())
    code, text = run(["lhv-check", "--dist", str(path), "--eta", "1/2", "--rational"])
    report = json.loads(text)
    assert code == 0 and report["passed"] and report["max_deviation"] == 0.0
    assert report["mode"] == "rational"


def test_lhv_check_samples_and_exit_codes(tmp_path):
    path = tmp_path / "pr.json"
    path.write_text(pr_box().to_json())
    code, text = run(["lhv-check", "--dist", str(path), "--eta", "0.4", "--samples", "2000", "--seed", "3"])
    report = json.loads(text)
    assert code == 0 and report["sampled_max_deviation"] < 0.1
    assert run(["lhv-check", "--dist", str(path), "--eta", "0.4", "--samples", "2000", "--seed", "3"])[1] == text
    assert run(["lhv-check", "--dist", str(path), "--eta", "0.8"])[0] == 3
    assert run(["lhv-check", "--dist", str(tmp_path / "missing.json"), "--eta", "0.4"])[0] == 4
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": 2, "B": 2, "X": 2, "Y": 2, "p": [1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0]}')
    assert run(["lhv-check", "--dist", str(bad), "--eta", "0.4"])[0] == 4
    assert run(["lhv-check", "--dist", str(path), "--eta", "abc"])[0] == 2


def test_prop1_scan_output():
    code, text = run(["prop1-scan", "--eta", "0.5", "--grid", "5"])
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "theta_a,theta_b,margin"
    assert len(lines) == 1 + 25 + 1 and "(all positive)" in lines[-1]
    code, text = run(["prop1-scan", "--eta", "0", "--grid", "5"])
    assert code == 0 and "(equality case)" in text


def test_optimize_json():
    code, text = run(["optimize", "--eta", "1", "--concurrence", "0.5", "--kind", "chsh"])
    report = json.loads(text)
    assert code == 0 and report["best_value"] == pytest.approx(2 * math.sqrt(1.25), abs=1e-6)
