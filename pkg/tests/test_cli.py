import csv
import json
import subprocess
import sys

import pytest

from herd.cli import main

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_mixed3(capsys):
    code, out, _ = run(capsys, "analyze", str(DATA / "mixed3.json"))
    assert code == 0
    report = json.loads(out)
    assert report["input_connectable"] is True
    assert report["herdable_states"] == [1, 2, 3]
    assert report["complete_herdability"]["herdable"] is True
    assert report["rank"] == 3
    assert report["system"] == {"n": 3, "m": 2, "positive": False}
    assert report["controllability_matrix"][2] == ["0", "3", "-6", "-8", "0", "20"]
    assert report["branching"] is None


def test_analyze_negative_dilation_certificate(capsys):
    code, out, _ = run(capsys, "analyze", str(DATA / "dilation_neg.json"))
    verdict = json.loads(out)["complete_herdability"]
    assert code == 0
    assert verdict["herdable"] is False and verdict["certificate"] == ["1", "1"]


def test_analyze_positive_dilation_positive(capsys):
    _, out, _ = run(capsys, "analyze", str(DATA / "dilation_pos.json"))
    report = json.loads(out)
    assert report["system"]["positive"] is True
    assert report["positive_system_verdict"]["herdable"] is True
    assert report["unisigned_assignment"] == {"x1": 1, "x2": 1}
    assert report["branching"]["is_out_branching"] is True


def test_analyze_empty_graph(capsys):
    code, out, _ = run(capsys, "analyze", str(DATA / "empty.json"))
    report = json.loads(out)
    assert code == 0
    assert report["input_connectable"] is False
    assert report["herdable_states"] == []


def test_check_singleton(capsys):
    code, out, _ = run(capsys, "check", "--set", "1", str(DATA / "dilation_neg.json"))
    assert code == 0
    assert json.loads(out) == {"set": [1], "herdable": True, "witness": ["-1", "0"]}


def test_check_out_of_range(capsys):
    code, _, err = run(capsys, "check", "--set", "4", str(DATA / "dilation_neg.json"))
    assert code == 2 and "outside" in err


def test_walksets(capsys):
    code, out, _ = run(capsys, "walksets", "--input", "1", "--max-depth", "2", str(DATA / "two_input.json"))
    assert code == 0
    assert json.loads(out) == [
        {"input": "u1", "depth": 1, "P": ["x2"], "N": []},
        {"input": "u1", "depth": 2, "P": [], "N": ["x3"]},
    ]


def test_walksets_csv(capsys):
    _, out, _ = run(capsys, "walksets", "--format", "csv", "--max-depth", "1", str(DATA / "two_input.json"))
    rows = list(csv.reader(out.splitlines()))
    assert rows == [["input", "depth", "P", "N"], ["u1", "1", "x2", ""], ["u2", "1", "x3", "x1"]]


def test_branching(capsys):
    code, out, _ = run(capsys, "branching", str(DATA / "binary_tree.json"))
    b = json.loads(out)
    assert code == 0
    assert b["maximal_families"] == [[1, 3, 6], [1, 4, 5], [2, 3, 6], [2, 4, 5]]
    assert b["max_herdable_size"] == 3 and b["d_max"] == 2


def test_branching_multi_input(capsys):
    code, _, _ = run(capsys, "branching", str(DATA / "two_input.json"))
    assert code == 2
    code, out, _ = run(capsys, "branching", "--input", "1", str(DATA / "two_input.json"))
    assert code == 0 and json.loads(out) == {"is_out_branching": False}


def test_simulate_to_file(capsys, tmp_path):
    target = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "simulate", "--system", str(DATA / "mixed3.json"), "--set", "1,2,3",
                       "--threshold", "1", "--horizon", "1", "--steps", "200", "--out", str(target))
    assert code == 0
    summary = json.loads(out)
    assert summary["success"] is True
    rows = list(csv.reader(target.read_text().splitlines()))
    assert rows[0] == ["t", "x1", "x2", "x3", "u1", "u2"]
    assert len(rows) == 202
    assert all(float(v) >= 1 for v in rows[-1][1:4])


def test_simulate_not_herdable(capsys):
    code, _, err = run(capsys, "simulate", str(DATA / "dilation_neg.json"), "--set", "1,2", "--steps", "10")
    assert code == 1 and "not herdable" in err


def test_negative_threshold_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", str(DATA / "mixed3.json"), "--set", "1", "--threshold", "-1"])
    assert exc.value.code == 2


def test_unknown_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--bogus", str(DATA / "mixed3.json")])
    assert exc.value.code == 2


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"A": [[1]],\n "B": ')
    code, out, err = run(capsys, "analyze", str(bad))
    assert code == 2 and out == ""
    assert "line 2, column" in err


def test_non_integral_float_needs_float_mode(capsys, tmp_path):
    f = tmp_path / "f.json"
    f.write_text('{"A": [[0.5]], "B": [[1]]}')
    assert run(capsys, "check", "--set", "1", str(f))[0] == 2
    code, out, _ = run(capsys, "check", "--set", "1", "--float-mode", str(f))
    assert code == 0 and json.loads(out)["herdable"] is True


def test_out_flag(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", "--out", str(target), str(DATA / "mixed3.json"))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["rank"] == 3


def test_deterministic_output(capsys):
    outs = {run(capsys, "analyze", str(DATA / name))[1] for name in ["binary_tree.json"] * 3}
    assert len(outs) == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "herd", "check", "--set", "1,2", str(DATA / "dilation_pos.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["herdable"] is True
