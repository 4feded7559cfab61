import json
import os
import subprocess
import sys

import pytest

from projcoh.cli import main, parse_k_range, parse_lambda, UsageError

FIELDS = ["command", "inputs", "status", "residual", "exceptional_values", "witness", "notes",
          "duration_ms"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_verify_cocycle_pass(capsys):
    code, doc = run(capsys, "verify", "cocycle", "--name", "J3", "--lambda", "symbolic")
    assert code == 0 and doc["status"] == "pass" and doc["residual"] == "0"
    assert list(doc)[:8] == FIELDS


def test_verify_sl2(capsys):
    code, doc = run(capsys, "verify", "sl2", "--name", "J4")
    assert code == 0 and set(doc["result"].values()) == {"0"}


def test_fixed_weight_error(capsys):
    code = main(["verify", "cocycle", "--name", "J6_0", "--lambda", "1"])
    assert code == 2
    assert "λ=0" in capsys.readouterr().err


@pytest.mark.parametrize("bad", ["x", "1/0", "0.5"])
def test_malformed_lambda(bad, capsys):
    assert main(["verify", "cocycle", "--name", "J3", "--lambda", bad]) == 2


def test_unknown_name(capsys):
    assert main(["verify", "cocycle", "--name", "J9"]) == 2


def test_failing_verify_exits_nonzero(capsys):
    code, doc = run(capsys, "verify", "correspondence", "--name", "I6")
    assert code == 1 and doc["status"] == "fail"
    assert any(n.startswith("discrepancy") for n in doc["notes"])


def test_solve_coboundary(capsys):
    code, doc = run(capsys, "solve", "coboundary", "--name", "J3")
    assert code == 0
    assert [e["lambda"] for e in doc["exceptional_values"]] == ["-1/2"]
    assert doc["witness"] == "λ=-1/2: 2 d^2"


def test_solve_coboundary_indeterminate(capsys):
    code, doc = run(capsys, "solve", "coboundary", "--name", "J4", "--order-bound", "1")
    assert code == 0 and doc["status"] == "indeterminate"


def test_solve_classify(capsys):
    code, doc = run(capsys, "solve", "classify", "--m", "1")
    assert doc["result"]["basis"] == ["2λ φ ψ' - 2μ φ' ψ"]


def test_solve_invariance(capsys):
    code, doc = run(capsys, "solve", "invariance", "--template", "I4")
    assert doc["result"]["solution"] == {"a1": "-(1/2)λ"}


def test_table_rows(capsys, tmp_path):
    tex = tmp_path / "t.tex"
    code, doc = run(capsys, "table", "--k-range", "0..1", "--latex", str(tex))
    assert code == 0 and [r["generic_dimension"] for r in doc["result"]] == [0, 0]
    assert doc["exceptional_values"] == []
    assert tex.read_text().startswith(r"\begin{tabular}")


def test_table_range_checked(capsys):
    assert main(["table", "--k-range", "3..9"]) == 2
    with pytest.raises(UsageError):
        parse_k_range("2-4")


def test_reports_are_deterministic(capsys):
    _, a = run(capsys, "table", "--k-range", "2..4")
    _, b = run(capsys, "table", "--k-range", "2..4", "--jobs", "2")
    a.pop("duration_ms"), b.pop("duration_ms")
    assert json.dumps(a, ensure_ascii=False) == json.dumps(b, ensure_ascii=False)


def test_parse_lambda():
    assert parse_lambda("symbolic") is None
    assert parse_lambda("-3/2") == parse_lambda("-6/4")


def test_max_jet_environment_variable():
    env = dict(os.environ, PROJCOH_MAX_JET="4")
    proc = subprocess.run([sys.executable, "-m", "projcoh.cli", "verify", "cocycle", "--name", "J5"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 2 and "jet" in proc.stderr.lower()
