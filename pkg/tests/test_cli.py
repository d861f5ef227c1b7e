import csv
import io
import json

import pytest

from erwspeed.cli import EXIT_FAIL, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, main, run


def _doc(argv):
    code, text = run(argv + ["--no-timestamp"])
    return code, json.loads(text)


def test_certify_d9_passes():
    code, doc = _doc(["certify", "--d", "9"])
    assert code == EXIT_OK
    assert doc["verdict"]["verdict"] == "monotone-all-beta"
    assert set(doc["meta"]) == {"version", "command", "config", "seed"}
    row = doc["results"][0]
    assert set(row) >= {"name", "value", "error", "units", "paper_anchor"}
    assert row["value"] < 0.975


def test_certify_exit_codes():
    assert run(["certify", "--d", "5"])[0] == EXIT_RESOURCE
    assert run(["certify", "--d", "8"])[0] == EXIT_FAIL


def test_usage_errors():
    assert run(["certify"])[0] == EXIT_USAGE
    assert run(["simulate", "--d", "3", "--beta", "2"])[0] == EXIT_USAGE
    assert run(["nonsense"])[0] == EXIT_USAGE
    assert run(["scan", "--d", "3", "--betas", "1,0.5", "--n", "5", "--replicas", "5"])[0] == EXIT_USAGE


def test_divergent_greens_reports_error():
    code, doc = _doc(["greens", "--d", "4", "--n", "2"])
    assert code == EXIT_RESOURCE
    assert doc["verdict"]["error"] == "DivergenceError"


def test_greens_and_constants():
    code, doc = _doc(["greens", "--d", "8", "--n", "2"])
    assert code == EXIT_OK
    assert doc["results"][0]["value"] == pytest.approx(1.2890027899, abs=1e-8)
    code, doc = _doc(["constants", "--d", "9"])
    assert code == EXIT_OK and doc["verdict"]["divergent"] == []


def test_bounds_and_expansion():
    code, doc = _doc(["bounds", "--d", "10", "--nmax", "3"])
    assert code == EXIT_OK
    names = [r["name"] for r in doc["results"]]
    assert "pi_norm_bound[N=3]" in names and "total (beta=1)" in names
    code, doc = _doc(["expansion", "--d", "3", "--beta", "1/2", "--mmax", "4"])
    assert code == EXIT_OK
    code, doc = _doc(["crosscheck", "--d", "2", "--beta", "1", "--mmax", "4"])
    assert code == EXIT_OK and doc["verdict"]["passed"]


def test_scan_csv_columns():
    code, text = run(["scan", "--d", "3", "--betas", "0,0.5,1", "--n", "50",
                      "--replicas", "100", "--format", "csv"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["beta", "mean", "stderr", "diff", "diff_stderr"]
    assert len(rows) == 3 and rows[0]["diff"] == ""


def test_seed_env_and_flag_precedence(monkeypatch):
    base = ["simulate", "--d", "3", "--beta", "1", "--n", "40", "--replicas", "60", "--no-timestamp"]
    monkeypatch.setenv("ERW_SEED", "17")
    from_env = json.loads(run(base)[1])
    assert from_env["meta"]["seed"] == 17
    flagged = json.loads(run(base + ["--seed", "17"])[1])
    assert flagged["results"] == from_env["results"]
    other = json.loads(run(base + ["--seed", "18"])[1])
    assert other["meta"]["seed"] == 18


def test_thread_count_gives_identical_bytes():
    argv = ["scan", "--d", "4", "--n", "60", "--replicas", "1200", "--seed", "3", "--no-timestamp"]
    one = run(argv + ["--threads", "1"])[1]
    four = run(argv + ["--threads", "4"])[1]
    assert "threads" not in json.loads(one)["meta"]["config"]
    assert four == one


def test_main_writes_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["certify", "--d", "9", "-o", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["meta"]["command"] == "certify"
    assert main(["certify", "--d", "9", "--no-timestamp"]) == EXIT_OK
    assert '"monotone-all-beta"' in capsys.readouterr().out
