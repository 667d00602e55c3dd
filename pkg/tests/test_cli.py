import json
import re
import subprocess
import sys

import pytest

from avoider_enforcer.cli import main


def _spec_file(tmp_path, runs):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps({"name": "cli", "runs": runs}))
    return p


GOOD = {"id": "g", "n": 50, "bias": 30, "avoider": "avoider.staged", "enforcer": "enforcer.random", "repeat": 2}


def test_simulate_success(tmp_path, capsys):
    spec = _spec_file(tmp_path, [GOOD])
    assert main(["simulate", str(spec), "--out", str(tmp_path / "o"), "--jobs", "1", "--quiet"]) == 0
    assert "2/2 runs ok" in capsys.readouterr().out
    assert (tmp_path / "o" / "transcripts" / "g-s1.jsonl").exists()


def test_simulate_config_errors_exit_1(tmp_path, capsys):
    bad = _spec_file(tmp_path, [dict(GOOD, enforcer="enforcer.unknown")])
    assert main(["simulate", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "unknown enforcer strategy" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()
    assert main(["simulate", str(tmp_path / "nope.json")]) == 1


def test_unknown_command_and_bad_flags_exit_1():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--n", "ten"])
    assert exc.value.code == 1


def test_sweep_prints_curve(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["sweep", "--n", "40", "--b-grid", "5,2000", "--seeds", "2", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text == out.read_text()
    assert text.splitlines()[0].startswith("b,c,runs")
    assert len(text.splitlines()) == 3


def test_sweep_empty_grid_and_conflicts(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["sweep", "--n", "40", "--b-grid", "", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1
    assert main(["sweep", "--n", "40", "--b-grid", "3", "--c-grid", "1"]) == 1
    assert main(["sweep", "--n", "40", "--b-grid", "3", "--enforcer-params", "[1]"]) == 1
    assert main(["sweep", "--n", "40", "--b-grid", "3", "--avoider", "fp.none"]) == 1


def test_sweep_c_grid(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert main(["sweep", "--n", "30", "--c-grid", "0.5,1", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()[1:]
    assert [r.split(",")[0] for r in rows] == ["52", "103"]


def test_solve_table_and_snapshot(tmp_path, capsys):
    snap = tmp_path / "snap.jsonl"
    assert main(["solve", "--n", "4", "--family", "spanning-tree", "--snapshot", str(snap)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,family,b,winner"
    assert lines[1] == "4,spanning-tree,1,enforcer" and lines[2] == "4,spanning-tree,2,avoider"
    assert json.loads(lines[-1]) == {"f_minus": 1, "f_plus": 1, "flips": []}
    assert json.loads(snap.read_text())["f_minus"] == 1
    assert main(["solve", "--n", "5", "--family", "spanning-tree", "--b", "3"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "5,spanning-tree,3,avoider"


def test_solve_refuses_large_boards(capsys):
    assert main(["solve", "--n", "7", "--family", "cycle", "--b", "1"]) == 1
    assert "n <= 6" in capsys.readouterr().err
    assert main(["solve", "--n", "4", "--family", "hamiltonian", "--b", "1"]) == 1


def test_bias_command(capsys):
    assert main(["bias", "--n", "10000", "--b", "5000"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["theorem2"]["certified"] is True
    assert out["t"] >= 2 and out["edges"] == 49_995_000
    assert main(["bias", "--n", "3250"]) == 0
    assert "error" in json.loads(capsys.readouterr().out)["theorem2"]
    assert main(["bias", "--n", "2"]) == 1


def test_analyze_exit_codes(tmp_path, capsys):
    spec = _spec_file(tmp_path, [dict(GOOD, repeat=1)])
    main(["simulate", str(spec), "--out", str(tmp_path), "--quiet"])
    capsys.readouterr()
    path = tmp_path / "transcripts" / "g-s0.jsonl"
    assert main(["analyze", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["audit_ok"] is True
    lines = path.read_text().splitlines()
    rec = json.loads(lines[1])
    rec["enforcer"], rec["avoider"] = rec["avoider"], rec["enforcer"]
    lines[1] = json.dumps(rec)
    path.write_text("\n".join(lines) + "\n")
    code = main(["analyze", str(path)])
    assert code == 2
    assert main(["analyze", str(tmp_path / "missing.jsonl")]) == 2


def test_verify_quick_subset(tmp_path, capsys):
    assert main(["verify", "--quick", "--only", "1,6", "--out", str(tmp_path / "rep")]) == 0
    out = capsys.readouterr().out
    assert re.search(r"criterion +1 PASS", out) and re.search(r"criterion +6 PASS", out)
    report = json.loads((tmp_path / "rep" / "acceptance.json").read_text())
    assert {r["number"] for r in report["criteria"]} == {1, 6} and report["passed"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "avoider_enforcer", "bias", "--n", "100"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 100
