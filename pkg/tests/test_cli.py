import json
import subprocess
import sys

import pytest

from pzf.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_min(capsys):
    code, out, _ = run_cli(capsys, "exact", "path:6", "--min")
    assert code == 0 and out.split()[:3] == ["path:6", "vertex:2", "11/3"]


def test_exact_json(capsys):
    code, out, _ = run_cli(capsys, "exact", "cycle:4", "--start", "vertex:0", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["expected_pt"] == "7/3" and doc["decimal"].startswith("2.33333")


def test_exact_cap_exit_code(capsys):
    code, _, err = run_cli(capsys, "exact", "grid:5x5", "--min")
    assert code == 3 and "cap" in err


@pytest.mark.parametrize("argv", [
    ["exact", "grid:0x3", "--min"],
    ["simulate", "path:5", "--start", "origin"],
    ["chain", "9", "--exact", "--stationary"],
    ["chain", "--stationary"],
    ["chain", "--table", "2-4"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])
    assert exc.value.code == 2


def test_chain_matrix(capsys):
    code, out, _ = run_cli(capsys, "chain", "2", "--exact", "--matrix")
    doc = json.loads(out)
    assert code == 0 and doc["matrix"][1] == ["1/16", "9/32", "3/32", "9/16"]


def test_chain_stationary_float(capsys):
    code, out, _ = run_cli(capsys, "chain", "3", "--float", "--stationary")
    assert code == 0 and abs(float(json.loads(out)["mu"]) - 1861 / 491117) < 1e-15


def test_chain_table(capsys, tmp_path):
    out_file = tmp_path / "t.csv"
    code, _, _ = run_cli(capsys, "chain", "--table", "2..3", "--exact", "--out", str(out_file))
    assert code == 0 and "2,1/77,1/75" in out_file.read_text()


def test_chain_sample(capsys):
    code, out, _ = run_cli(capsys, "chain", "3", "--sample", "1000", "--seed", "4")
    doc = json.loads(out)
    assert code == 0 and doc["steps"] == 1000 and doc["white_visits"] + doc["elapsed"] == 1000


def test_simulate(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "simulate", "grid:7x7", "--trials", "10",
                           "--out", str(tmp_path / "r.csv"))
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["finished"] == 10
    assert (tmp_path / "r.summary.json").exists()


def test_couple_test(capsys):
    code, out, _ = run_cli(capsys, "couple-test", "grid:5x5", "--trials", "20")
    assert code == 0 and json.loads(out)["ok"] is True


def test_verify_reports_are_byte_identical(capsys, tmp_path):
    reports = []
    for name in ("a.txt", "b.txt"):
        path = tmp_path / name
        code, out, _ = run_cli(capsys, "verify", "--max-float-d", "4", "--coupling-trials", "10",
                               "--out", str(path))
        assert code == 0 and out.rstrip().endswith("all checks passed")
        reports.append(path.read_bytes())
    assert reports[0] == reports[1]


def test_verify_fails_on_perturbed_reference(capsys, monkeypatch):
    from pzf import verification
    bad = [row[:] for row in verification.P2_REFERENCE]
    bad[3][0] *= 2
    monkeypatch.setattr(verification, "P2_REFERENCE", bad)
    code, out, _ = run_cli(capsys, "verify", "--max-float-d", "2", "--coupling-trials", "2")
    assert code == 1
    assert "FAIL  P_2 matrix  [entry (1, 1)->(0, 0): expected 1/128, got 1/256]" in out
    assert out.rstrip().endswith("verification FAILED")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "pzf", "exact", "path:4", "--min"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "8/3" in res.stdout
