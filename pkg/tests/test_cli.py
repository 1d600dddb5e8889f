import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "zetafock.cli"]


def run_cli(*args):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=600
    )


def test_verify_exit_zero_and_report_shape(tmp_path):
    out = tmp_path / "report.json"
    res = run_cli(
        "verify", "abstract",
        "--p", "1", "--dims", "1",
        "--r-max", "1", "--m-max", "2", "--degree-max", "1",
        "--out", str(out),
    )
    assert res.returncode == 0, res.stderr
    report = json.loads(out.read_text())
    assert report["summary"]["failed"] == 0
    assert report["summary"]["total"] == report["summary"]["passed"]
    for rec in report["records"]:
        assert set(rec) == {
            "suite", "params", "status", "lhs", "rhs", "witness", "elapsed_ms",
        }


def test_verify_deterministic_output(tmp_path):
    args = (
        "verify", "dims",
        "--p", "2", "--dims", "0,1", "--degree-max", "2",
    )
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        res = run_cli(*args, "--out", str(out))
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_invalid_configs_exit_two(tmp_path):
    # dims length mismatch
    assert run_cli("verify", "dims", "--p", "2", "--dims", "1").returncode == 2
    # degree step finer than the mode lattice
    assert (
        run_cli("verify", "dims", "--p", "1", "--dims", "1", "--degree-max", "1/2").returncode
        == 2
    )
    # unknown suite in a config file
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suites": ["bogus"]}))
    assert run_cli("verify", "all", "--config", str(cfg)).returncode == 2
    # zero total dimension
    assert run_cli("verify", "dims", "--p", "1", "--dims", "0").returncode == 2


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 2, "dims": [0, 1], "degree_max": "2"}))
    out = tmp_path / "r.json"
    res = run_cli("verify", "dims", "--config", str(cfg), "--out", str(out))
    assert res.returncode == 0, res.stderr
    report = json.loads(out.read_text())
    assert report["records"][0]["params"]["p"] == 2


def test_table_corrections():
    res = run_cli("table", "corrections", "--p", "2", "--dims", "0,1", "--r-max", "1")
    assert res.returncode == 0, res.stderr
    assert "1/16" in res.stdout
    assert "1/128" in res.stdout
    assert "7/1920" in res.stdout


def test_table_zeta():
    res = run_cli("table", "zeta", "--r-max", "2")
    assert res.returncode == 0, res.stderr
    assert "-1/12" in res.stdout
    assert "1/120" in res.stdout
    assert "-1/252" in res.stdout


def test_table_central():
    res = run_cli("table", "central", "--r-max", "0", "--m-max", "3")
    assert res.returncode == 0, res.stderr
    assert "1/12" in res.stdout
    assert "2/3" in res.stdout
    assert "9/4" in res.stdout


def test_bernoulli_command():
    res = run_cli("bernoulli", "--n", "8")
    assert res.returncode == 0
    assert res.stdout.strip() == "-1/30"
    res = run_cli("bernoulli", "--n", "3", "--x", "1/2")
    assert res.returncode == 0
    assert res.stdout.strip() == "0"


def test_usage_error_exit_two():
    res = run_cli("verify", "nonsense-suite")
    assert res.returncode == 2
