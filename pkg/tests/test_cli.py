import json
import subprocess
import sys

import numpy as np
import pytest

from affmed.cli import main, read_points, DataError


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_single_point(tmp_path, capsys):
    f = tmp_path / "p.csv"
    f.write_text("1.5,-2.0\n")
    code, out, _ = run(["estimate", "--input", str(f), "--json"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["estimate"] == [1.5, -2.0]
    assert set(rep) == {"estimate", "outlyingness", "iterations", "constraints", "k_buckets", "seed", "undefined"}


def test_estimate_plain_text(tmp_path, capsys):
    f = tmp_path / "p.csv"
    X = np.random.default_rng(0).standard_normal((40, 2))
    f.write_text("x,y\r\n" + "\r\n".join(f"{a},{b}" for a, b in X) + "\r\n")
    code, out, _ = run(["estimate", "--input", str(f), "--estimator", "tukey"], capsys)
    assert code == 0
    assert len(out.splitlines()[0].split()) == 2


def test_read_points_errors(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,b\n1,2\n3\n")
    with pytest.raises(DataError, match=":3:"):
        read_points(f)
    f.write_text("1,2\n3,oops\n")
    with pytest.raises(DataError, match=":2:"):
        read_points(f)
    f.write_text("")
    with pytest.raises(DataError):
        read_points(f)


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n1,2,3\n")
    assert run(["estimate", "--input", str(bad)], capsys)[0] == 2
    assert run(["estimate", "--input", str(tmp_path / "missing.csv")], capsys)[0] == 2
    assert run(["estimate", "--input", str(bad), "--bogus"], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run(["bench", "--config", str(cfg), "--out", str(tmp_path / "o.csv")], capsys)[0] == 2


def test_runtime_failure_exit(tmp_path, capsys, monkeypatch):
    f = tmp_path / "p.csv"
    f.write_text("1,2\n3,4\n")

    def boom(*a, **k):
        raise RuntimeError("solver exploded")

    monkeypatch.setattr("affmed.cli.estimate", boom)
    assert run(["estimate", "--input", str(f)], capsys)[0] == 3


def test_hardcase_rows(tmp_path, capsys):
    out = tmp_path / "hc.csv"
    code, _, _ = run(["hardcase", "--d", "20", "--n", "2000", "--trials", "1", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert {ln.split(",")[5] for ln in lines[1:]} == {"ours", "tukey", "stahel_donoho", "empirical_mean"}


def test_bench_and_lowerbound(tmp_path, capsys):
    cfg = {"families": [{"kind": "intuition_gamma", "params": {"gamma": "auto", "noise": 0.1}}],
           "grid": {"d": [3], "n": [300], "eta": [0.0, 0.02]},
           "contamination": [{"mode": "replace", "strategy": "far_along_min_variance", "scale": 20}],
           "estimators": [{"kind": "ours"}, {"kind": "empirical_mean"}], "trials": 2, "base_seed": 3,
           "output": {"format": "json"}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "o.json"
    assert run(["bench", "--config", str(path), "--out", str(out)], capsys)[0] == 0
    assert len(json.loads(out.read_text()) if out.suffix == ".json" else []) == 8
    lb = tmp_path / "lb.csv"
    assert run(["lowerbound", "--family", "quant", "--d", "5", "--n", "300", "--eta", "0.05",
                "--trials", "1", "--out", str(lb)], capsys)[0] == 0
    assert lb.read_text().count("\n") == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "affmed", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "hardcase" in res.stdout
