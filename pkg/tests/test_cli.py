from __future__ import annotations

import csv
import io
import json
import shutil
import subprocess
import sys

import pytest

from reflecta.cli import EXIT_BUDGET, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_regular_text(capsys):
    code, out, _ = run(capsys, "verify", "--family", "B", "--n", "3")
    assert code == EXIT_PASS
    assert "overall: PASS" in out and "closure: 21" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--family", "D", "--n", "4", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_PASS and doc["overall"] == "pass" and doc["totals"]["derived"] == 78


def test_verify_blocks_with_labels(capsys):
    code, out, _ = run(capsys, "verify", "--family", "B", "--n", "4", "--scope", "blocks", "--format", "csv",
                       "--label", "([2,1],[1])", "--label", "([2],[1,1])")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS
    assert [(r["label"], r["computed_type"], r["computed_dim"]) for r in rows] == [
        ("([2,1],[1])", "sl", "63"), ("([2],[1,1])", "so", "15")]


@pytest.mark.parametrize("threads", ["1", "3"])
def test_output_independent_of_threads(capsys, monkeypatch, threads):
    monkeypatch.setenv("REFLECTA_THREADS", threads)
    _, env_out, _ = run(capsys, "verify", "--family", "D", "--n", "4", "--scope", "blocks", "--format", "json")
    _, flag_out, _ = run(capsys, "verify", "--family", "D", "--n", "4", "--scope", "blocks", "--format", "json",
                         "--threads", "2")
    strip = lambda text: {k: v for k, v in json.loads(text).items() if k != "seconds"}  # noqa: E731
    assert strip(env_out) == strip(flag_out)


def test_verify_d2_notes(capsys):
    code, out, _ = run(capsys, "verify", "--family", "D", "--n", "2")
    assert code == EXIT_PASS and "abelian" in out


def test_budget_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--family", "B", "--n", "5", "--max-group-order", "100")
    assert code == EXIT_BUDGET and "PARTIAL" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "B"],
    ["verify", "--family", "Q", "--n", "3"],
    ["verify", "--family", "B", "--n", "0"],
    ["verify", "--family", "B", "--n", "3", "--label", "([1],[1])"],
    ["verify", "--family", "B", "--n", "3", "--scope", "blocks", "--label", "([1],[1])"],
    ["verify", "--family", "B", "--n", "3", "--scope", "blocks", "--label", "{[2],[1]}"],
    ["irrep", "--family", "B", "--label", "nonsense"],
    ["irrep", "--family", "B"],
    ["tables", "--family", "D", "--n", "2"],
    ["verify", "--family", "B", "--n", "3", "--threads", "0"],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_irrep_json_and_csv(capsys, tmp_path):
    out = tmp_path / "rep.json"
    code, _, _ = run(capsys, "irrep", "--family", "D", "--label", "{[2],+}", "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == EXIT_PASS and doc["dim"] == 3 and "s~4" in doc["generators"]
    code, text, _ = run(capsys, "irrep", "--family", "B", "--label", "([1],[1])", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == EXIT_PASS and {r["generator"] for r in rows} == {"s1", "t1", "t2"}


def test_irrep_approx_text(capsys):
    code, text, _ = run(capsys, "irrep", "--family", "B", "--label", "([2],[1])", "--mode", "approx", "--format",
                        "text")
    assert code == EXIT_PASS and "approx_orthogonal" in text


def test_irrep_budget(capsys):
    code, _, err = run(capsys, "irrep", "--family", "B", "--label", "([2,1],[2,1])", "--max-group-order", "100")
    assert code == EXIT_BUDGET and "budget" in err


def test_tables(capsys):
    code, text, _ = run(capsys, "tables", "--family", "D", "--n", "6")
    rows = {r["label"]: r for r in csv.DictReader(io.StringIO(text))}
    assert code == EXIT_PASS
    assert rows["{[2,1],+}"]["predicted_type"] == "sl" and rows["{[2,1],+}"]["module_dim"] == "40"
    assert rows["{[3,1,1],[1]}"]["predicted_type"] == "so"
    code, text, _ = run(capsys, "tables", "--family", "B", "--n", "4", "--format", "json")
    doc = json.loads(text)
    assert doc["sum_of_squares"] == 384 and len(doc["rows"]) == 20


def test_deterministic_output(capsys):
    first = run(capsys, "tables", "--family", "B", "--n", "5", "--format", "json")[1]
    second = run(capsys, "tables", "--family", "B", "--n", "5", "--format", "json")[1]
    assert first == second


def test_console_script():
    exe = shutil.which("reflecta")
    cmd = [exe] if exe else [sys.executable, "-m", "reflecta.cli"]
    proc = subprocess.run(cmd + ["tables", "--family", "B", "--n", "2", "--format", "text"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "([1],[1])" in proc.stdout
