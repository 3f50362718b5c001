import csv
import io
import json

import pytest

from gbta import cli


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_idempotents_json(capsys):
    code, out, _ = run(capsys, "idempotents", "--lambda", "0.75", "--beta", "0.5", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["count"] == 7 and len(d["idempotents"]) == 7 and d["verified"] and not d["in_P"]
    j0 = d["idempotents"][d["labels"].index("j0")]
    assert j0 == pytest.approx([0, 0.6, 0.6, 0.72], abs=1e-12)


def test_trajectory_csv(capsys):
    code, out, _ = run(capsys, "trajectory", "--alpha", "0.25", "--beta", "0.5", "--x0", "0,0,0,1",
                       "--steps", "50", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["step", "x1", "x2", "x3", "x4"]
    assert len(rows) == 52  # header + 51 states
    assert [float(v) for v in rows[1][1:]] == [0, 0, 0, 1]
    assert [float(v) for v in rows[2][1:]] == [0, 0.25, 0.25, 0.5]


def test_isomorphic(capsys):
    code, out, _ = run(capsys, "isomorphic", "--lhs", "0.6,0.3", "--rhs", "0.6,0.7")
    assert code == 0
    d = json.loads(out)
    assert d["isomorphic"] is True and d["reason"] == "SwapBeta"
    code, out, _ = run(capsys, "isomorphic", "--lhs", "0.6,0.3", "--rhs", "0.5,0.3", "--trials", "20")
    assert code == 0 and json.loads(out)["isomorphic"] is False


def test_seventeen_digits(capsys):
    _, out, _ = run(capsys, "multiply", "--lambda", "0.3", "--beta", "0.4", "--x=0,1,0,0", "--y=0,0,1,0")
    assert "-0.33333333333333348" in out  # (0.3 - 0.4) / 0.3 in doubles
    d = json.loads(out)
    assert d["product"][3] == 1


def test_rational_output(capsys):
    code, out, _ = run(capsys, "multiply", "--lambda", "1/3", "--beta", "1/2", "--mode", "rational",
                       "--x=0,1,-1,0", "--y=0,1,-1,0")
    assert code == 0
    assert json.loads(out)["product"] == ["0", "2", "2", "-2"]


def test_phenotype_basis(capsys):
    _, out, _ = run(capsys, "multiply", "--alpha", "0.25", "--beta", "0.5", "--basis", "phenotype",
                    "--x=1,0,0,0", "--y=0,0,0,1")
    assert json.loads(out)["product"] == [0, 0.5, 0.5, 0]


@pytest.mark.parametrize("cmd", [
    ["table", "--lambda", "0.5", "--beta", "0.3"],
    ["evolve", "--lambda", "0.5", "--beta", "0.3", "--x0", "0.25,0.25,0.25,0.25"],
    ["nilpotents", "--lambda", "0.5", "--beta", "0.3", "--seeds", "50"],
    ["solvable", "--lambda", "3/11", "--beta", "7/22", "--mode", "rational", "--index", "5", "--x=0,9,1,0"],
    ["ideals", "--lambda", "0.5", "--beta", "0.5", "--trials", "100"],
    ["enveloping", "--lambda", "0.3", "--beta", "0.3"],
])
def test_subcommands_emit_json(capsys, cmd):
    code, out, _ = run(capsys, *cmd)
    assert code == 0
    json.loads(out)


def test_solvable_index(capsys):
    _, out, _ = run(capsys, "solvable", "--lambda", "3/11", "--beta", "7/22", "--mode", "rational", "--index", "5")
    d = json.loads(out)
    assert d["in_P"] and d["family"]["index"] == 5
    a = d["family"]["a_coeff"]
    _, out, _ = run(capsys, "solvable", "--lambda", "3/11", "--beta", "7/22", "--mode", "rational", f"--x=0,{a},1,0")
    assert json.loads(out)["index"] == 5


def test_enveloping_text(capsys):
    code, out, _ = run(capsys, "enveloping", "--lambda", "0.6", "--beta", "0.4", "--format", "text")
    assert code == 0 and "pattern: M1" in out


def test_output_file(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--lambda", "0.5", "--beta", "0.5", "--format", "csv", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("left,right,o,a,b,ab")


def test_usage_errors(capsys):
    code, _, err = run(capsys, "idempotents", "--beta", "0.5")
    assert code == 2 and "usage" in err
    assert run(capsys, "idempotents", "--lambda", "0.5", "--alpha", "0.5", "--beta", "0.5")[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "multiply", "--lambda", "0.5", "--beta", "0.5", "--x=1,2", "--y=1,2,3,4")[0] == 2
    assert run(capsys, "enveloping", "--lambda", "0.5", "--beta", "0.5", "--format", "csv")[0] == 2


def test_domain_errors(capsys):
    code, _, err = run(capsys, "idempotents", "--lambda", "1.5", "--beta", "0.5")
    assert code == 1 and "lambda" in err
    assert run(capsys, "evolve", "--lambda", "0.5", "--beta", "0.5", "--x0", "1,1,0,0")[0] == 1
    assert run(capsys, "solvable", "--lambda", "0.5", "--beta", "0.5", "--index", "1")[0] == 1
    assert run(capsys, "table", "--lambda", "0.3", "--beta", "0.5", "--tol", "-1")[0] == 1


def test_byte_identical(capsys):
    argv = ["nilpotents", "--lambda", "0.4", "--beta", "0.2", "--seeds", "30"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first


def test_seed_from_environment(capsys, monkeypatch):
    argv = ["ideals", "--lambda", "0.5", "--beta", "0.3", "--trials", "50"]
    monkeypatch.setenv("GBTA_SEED", "7")
    env7 = run(capsys, *argv)[1]
    assert run(capsys, *argv, "--seed", "7")[1] == env7
    monkeypatch.delenv("GBTA_SEED")
    assert run(capsys, *argv, "--seed", "42")[1] == run(capsys, *argv)[1]
    monkeypatch.setenv("GBTA_SEED", "x")
    assert run(capsys, *argv)[0] == 2


def test_verify_subset(capsys):
    code, out, err = run(capsys, "verify", "--only", "10,3")
    assert code == 0
    assert json.loads(out)["passed"] is True
    assert "[PASS] criterion 10" in err
    assert run(capsys, "verify", "--only", "11")[0] == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    from gbta import acceptance

    monkeypatch.setitem(acceptance.CHECKS, 10, lambda: acceptance.CheckResult(10, "forced", False, "x"))
    assert run(capsys, "verify", "--only", "10")[0] == 3
