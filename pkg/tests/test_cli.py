import json
import subprocess
import sys

import pytest

from honestdeg.cli import main
from honestdeg.cupping import loads
from cli_cases import MOCK, cases, run_to_file


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_psi_trace(tmp_path, capsys):
    path = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "psi", "--gamma", "TOWERDIAG", "--schedule", "scaled", "--n", "20",
                       "--out", str(path))
    assert code == 0
    header, rows = loads(path.read_text())
    assert header["config"]["schedule"] == "scaled"
    assert sum(r["type"] == "IterStart" for r in rows) >= 21
    summary = json.loads(out)
    assert summary["ElseBranch"] == 2 and summary["Removal"] == 2


def test_psi_negative_n_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["psi", "--n", "-1"])
    assert info.value.code == 2


def test_psi_paper_schedule_on_concrete_program(capsys):
    code, _, err = run(capsys, "psi", "--schedule", "paper", "--subject", "concrete-program", "--n", "3",
                       "--cap", "10000")
    assert code == 1
    rec = json.loads(err.strip().splitlines()[-1])
    assert rec["error"] == "CapExceeded" and rec["e"] == 33 and rec["m"] == 3


def test_compare_verdicts(capsys):
    code, out, _ = run(capsys, "compare", "--f", "POW2", "--g", "TOWER_2", "--kmax", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# honestdeg-growth-csv v1 ")
    assert lines[-1] == "# verdict: WitnessK(1)"
    _, out, _ = run(capsys, "compare", "--f", "POW2", "--f", "POW2")
    assert out.splitlines()[-1] == "# verdict: WitnessK(1)"
    code, out, _ = run(capsys, "compare", "--f", "TOWERDIAG", "--g", "POW2", "--kmax", "6", "--strict")
    assert code == 1
    assert out.splitlines()[-1] == "# verdict: NoWitnessUpTo(6)"


def test_compare_needs_two_functions(capsys):
    code, _, _ = run(capsys, "compare", "--f", "POW2")
    assert code == 2


def test_ord_commands(capsys):
    assert run(capsys, "ord", "norm", "w^w + 3")[1] == "6\n"
    assert run(capsys, "ord", "norm", "0")[1] == "0\n"
    assert run(capsys, "ord", "enum", "w^2", "--normbound", "3")[1] == "[0, 1, 2, 3, w, w+1]\n"
    assert run(capsys, "ord", "iterate", "w", "--n", "1")[1] == "E:17\n"
    assert run(capsys, "ord", "fundseq", "w^w", "--k", "2")[1] == "w^3\n"
    code, _, err = run(capsys, "ord", "norm", "w+w^2")
    assert code == 2 and json.loads(err)["error"] == "OrdinalParseError"
    code, _, err = run(capsys, "ord", "iterate", "w^w", "--n", "3", "--max-nodes", "50")
    assert code == 1 and json.loads(err)["error"] == "BudgetExhausted"


def test_prov_commands(tmp_path, capsys):
    empty = tmp_path / "empty.mock"
    empty.write_text("")
    code, out, _ = run(capsys, "prov", "--mock", str(empty), "--s", "5")
    assert code == 0
    _, rows = loads(out, "honestdeg-prov-trace")
    assert sum(r["type"] == "pAdvance" for r in rows) == 6

    mock = tmp_path / "t.mock"
    mock.write_text(MOCK)
    code, out, _ = run(capsys, "prov", "--mock", str(mock), "--helper", "--pair", "pi:ZERO", "--s", "2")
    rec = json.loads(out)
    assert code == 0 and rec["result"] == "AHalted" and rec["t"] == 2

    bad = tmp_path / "bad.mock"
    bad.write_text("sentence a false\n")
    code, _, err = run(capsys, "prov", "--mock", str(bad), "--s", "1")
    assert code == 2 and json.loads(err)["line"] == 1


def test_prov_strict_horizon(tmp_path, capsys):
    mock = tmp_path / "t.mock"
    mock.write_text("sentence eta true\nproof 0 disj eta\n")
    code, out, _ = run(capsys, "prov", "--mock", str(mock), "--s", "3", "--horizon", "5", "--strict")
    assert code == 1
    assert loads(out, "honestdeg-prov-trace")[1][-1]["type"] == "ExceededHorizon"


def test_every_command_is_deterministic(tmp_path, capsys):
    for name, argv in cases(str(tmp_path)).items():
        first = run_to_file(argv, str(tmp_path / f"{name}.1"))
        second = run_to_file(argv, str(tmp_path / f"{name}.2"))
        capsys.readouterr()
        assert first[0] == 0, name
        assert first == second, name
        assert first[1].startswith(b"{") or first[1].startswith(b"#"), name


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "honestdeg", "ord", "norm", "w"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "2\n"
