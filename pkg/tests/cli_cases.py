"""Command lines shared by the CLI tests and the acceptance run."""
import os

from honestdeg.cli import main

MOCK = """\
sentence pi true
sentence eta true
sentence bad false negwitness 1
proof 0 cup pi ZERO
proof 1 cup bad POW2
proof 2 disj eta
"""


def cases(tmp):
    mock = os.path.join(tmp, "theory.mock")
    with open(mock, "w") as fh:
        fh.write(MOCK)
    return {
        "psi": ["psi", "--gamma", "TOWERDIAG", "--schedule", "scaled", "--n", "20"],
        "psi-paper": ["psi", "--schedule", "paper", "--n", "12"],
        "psi-ordinal": ["psi", "--schedule", "ordinal", "--iterate-mode", "ordinal", "--n", "10"],
        "compare-leq": ["compare", "--f", "POW2", "--g", "TOWER_2", "--kmax", "3"],
        "compare-same": ["compare", "--f", "POW2", "--f", "POW2"],
        "compare-ll": ["compare", "--f", "POW2", "--g", "TOWERDIAG", "--mode", "ll", "--kmax", "2",
                       "--mmax", "4", "--tail", "5"],
        "compare-diag": ["compare", "--f", "TOWERDIAG", "--g", "POW2", "--kmax", "6"],
        "ord-norm": ["ord", "norm", "w^w + 3"],
        "ord-enum": ["ord", "enum", "w^2", "--normbound", "3"],
        "ord-iterate": ["ord", "iterate", "w", "--n", "1"],
        "ord-fundseq": ["ord", "fundseq", "e0", "--k", "3"],
        "prov": ["prov", "--mock", mock, "--s", "8", "--horizon", "50"],
        "prov-helper": ["prov", "--mock", mock, "--helper", "--pair", "pi:ZERO", "--s", "2"],
    }


def run_to_file(argv, path):
    code = main(argv + ["--out", path])
    with open(path, "rb") as fh:
        return code, fh.read()
