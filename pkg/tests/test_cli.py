import csv
import io
import json
import subprocess
import sys

import pytest

from hardy_lab import cli
from hardy_lab.hardy import P_MAX


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    return doc


def test_construct_golden_example(capsys):
    doc = run_json(capsys, "construct", "--theta-a", "0", "--theta-a-prime", "76.3454",
                   "--theta-b", "0", "--theta-b-prime", "76.3454")
    sq = doc["squared"]
    assert sq["c_pp"] == 0.0
    assert sq["c_pm"] == pytest.approx(0.381966, abs=1e-5)
    assert sq["c_mp"] == pytest.approx(0.381966, abs=1e-5)
    assert sq["c_mm"] == pytest.approx(0.236068, abs=1e-5)


def test_construct_degenerate_exit_3(capsys):
    code, out, err = run_cli(capsys, "construct", "--theta1", "180", "--theta2", "60")
    assert code == 3
    assert out == ""
    assert len(err.strip().splitlines()) == 1
    assert "a" in err and "degenerate" in err.lower()


@pytest.mark.parametrize("argv", [
    ["construct", "--theta1", "800"],
    ["construct", "--theta-a", "nan"],
    ["construct", "--format", "csv"],
    ["frobnicate"],
    [],
    ["scan", "--resolution", "1"],
    ["sample", "--samples", "0"],
    ["sample", "--seed", "-3"],
    ["check", "--variant", "sideways"],
    ["check", "--theta1", "30", "--theta-a", "10"],
    ["optimize", "--resolution", "10"],
    ["optimize", "--refine-tol", "0"],
    ["check", "--zero-tol", "-1"],
])
def test_validation_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.startswith("hardy-lab: error:")


def test_angles_normalized(capsys):
    a = run_json(capsys, "prob", "--theta1", "-283.6545847", "--theta2", "436.3454153")
    b = run_json(capsys, "prob", "--theta1", "76.3454153", "--theta2", "76.3454153")
    assert a["probability"] == pytest.approx(b["probability"], abs=1e-12)


def test_check_reports_holds(capsys):
    doc = run_json(capsys, "check", "--theta1", "90", "--theta2", "90")
    assert doc["report"]["holds"] is True
    assert doc["report"]["p1d"] == pytest.approx(1 / 12, abs=1e-14)


@pytest.mark.parametrize("variant", ["original", "flip-both", "flip-a", "flip-b"])
def test_check_variants(capsys, variant):
    doc = run_json(capsys, "check", "--variant", variant, "--theta1", "40", "--theta2", "130")
    assert doc["report"]["holds"] is True


def test_prob_diagonal(capsys):
    doc = run_json(capsys, "prob", "--diagonal", "90")
    assert doc["probability"] == pytest.approx(1 / 12, abs=1e-15)


def test_scan_csv_round_trip_bit_exact(capsys):
    code, out, _ = run_cli(capsys, "scan", "--resolution", "181", "--format", "csv")
    assert code == 0
    assert "\r" not in out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta1_deg", "theta2_deg", "probability"]
    assert len(rows) == 1 + 181 * 181
    values = [float(r[2]) for r in rows[1:]]
    # 2-degree grid: the best cell sits 0.35 degrees from the peak
    assert max(values) == pytest.approx(0.090169, abs=1e-5)
    assert max(values) <= P_MAX

    doc = run_json(capsys, "scan", "--resolution", "181")
    flat = [v for row in doc["probability"] for v in row]
    assert values == flat


def test_slice_csv(capsys):
    code, out, _ = run_cli(capsys, "slice", "--resolution", "361", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["theta_deg", "probability"]
    best = max(rows[1:], key=lambda r: float(r[1]))
    assert float(best[0]) in (76.0, 284.0)


def test_schmidt_output(capsys):
    doc = run_json(capsys, "schmidt")
    assert doc["lambda_plus"] == pytest.approx(0.822648, abs=1e-6)
    assert doc["lambda_minus"] == pytest.approx(0.177352, abs=1e-6)
    assert doc["class"] == "partial"
    off = doc["phi_a_minus_theta_a_deg"]
    assert min(abs(off - 111.4586), abs(off - (360 - 111.4586))) < 1e-3


def test_optimize_agrees_with_prob(capsys):
    doc = run_json(capsys, "optimize")
    assert len(doc["maxima"]) == 4
    for m in doc["maxima"]:
        opt = m["optimum"]
        assert opt["p_max"] == pytest.approx(P_MAX, abs=1e-9)
        point = run_json(capsys, "prob", "--theta1", repr(opt["theta1_deg"]),
                         "--theta2", repr(opt["theta2_deg"]))
        assert point["probability"] == pytest.approx(opt["p_max"], abs=1e-12)
    assert [round(d["theta_deg"], 4) for d in doc["diagonal_maxima"]] == [76.3454, 283.6546]


def test_lhv(capsys):
    doc = run_json(capsys, "lhv")
    assert doc["strategies_total"] == 16
    assert len(doc["consistent_strategies"]) == 5
    assert doc["lhv_bound"] == 0.0
    assert doc["gap"] == pytest.approx(P_MAX, abs=1e-12)


def test_sample_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("HARDY_LAB_THREADS", "1")
    a = run_json(capsys, "sample", "--samples", "200000", "--seed", "11")
    monkeypatch.setenv("HARDY_LAB_THREADS", "4")
    b = run_json(capsys, "sample", "--samples", "200000", "--seed", "11")
    assert a == b
    assert a["counts"]["a,b"]["++"] == 0
    assert a["report"]["holds"] is True


def test_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run_cli(capsys, "construct", "--output", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["command"] == "construct"


def test_deterministic_repeat(capsys):
    first = run_cli(capsys, "lhv", "--theta1", "50", "--theta2", "120")
    second = run_cli(capsys, "lhv", "--theta1", "50", "--theta2", "120")
    assert first == second


def test_bad_threads_env_is_a_validation_error(capsys, monkeypatch):
    monkeypatch.setenv("HARDY_LAB_THREADS", "many")
    code, _, err = run_cli(capsys, "scan", "--resolution", "200")
    assert code == 2
    assert "HARDY_LAB_THREADS" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hardy_lab", "prob", "--theta1", "90",
                           "--theta2", "90"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["probability"] == pytest.approx(1 / 12)
