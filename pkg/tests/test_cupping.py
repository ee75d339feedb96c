import json

import pytest

from honestdeg.cupping import (
    PsiCapExceeded, PsiConfig, PsiFn, audit_no_resurrection, audit_removals, cap_witness_config,
    dumps, loads, psi_run,
)
from honestdeg.honest import BuiltinFn, check_honesty
from honestdeg.hyperint import HyperInt, exp2, max_h
from oracles import NaivePsi

FIXTURES = [
    PsiConfig(),
    PsiConfig(gamma="TOWER_2", initial=(12, 33)),
    PsiConfig(removal_steps="per-eval", initial=(2,)),
]


def types(trace):
    return [ev.type for ev in trace]


@pytest.fixture(scope="module")
def default40():
    return psi_run(PsiConfig(), 40)


def test_default_run_shape(default40):
    ts = types(default40.trace)
    assert ts.count("ElseBranch") >= 2
    assert ts.count("Removal") >= 1
    assert ts[-1] == "Output"
    assert [ev.m for ev in default40.trace if ev.type == "Removal"] == [2, 16]
    assert [ev.m for ev in default40.trace if ev.type == "ElseBranch"] == [3, 17]


def test_trace_audits(default40):
    assert audit_removals(default40.trace) == []
    assert audit_no_resurrection(default40.trace) == []
    seq = [ev.seq for ev in default40.trace]
    assert seq == list(range(len(seq)))


def test_k_keeps_growing_after_removals(default40):
    trace = default40.trace
    for i, ev in enumerate(trace):
        if ev.type == "Removal":
            later = trace[i + 1:]
            assert any(e.type == "HaltObserved" for e in later) or \
                any(e.type == "IterStart" and not e.extra["C"] for e in later)


def test_m_is_accounted_for(default40):
    # every M is the running max of 1, observed outputs, else-branch budgets and 2^m
    M = HyperInt.exact(1)
    for ev in default40.trace:
        if ev.type == "HaltObserved":
            M = max_h(M, ev.value, exp2(ev.m))
        elif ev.type == "ElseBranch":
            M = max_h(M, HyperInt.exact((ev.m + 2) ** ev.k), exp2(ev.m))
        elif ev.type == "MUpdate":
            assert ev.M == M


def test_prefix_determinism():
    short, long = psi_run(PsiConfig(), 10), psi_run(PsiConfig(), 25)
    assert short.trace[:-1] == long.trace[:len(short.trace) - 1]
    assert psi_run(PsiConfig(), 25).trace_jsonl() == long.trace_jsonl()


@pytest.mark.parametrize("cfg", FIXTURES, ids=["default", "tower2-loop", "per-eval"])
def test_matches_naive_resimulation(cfg):
    fast = psi_run(cfg, 12)
    M, events, account = NaivePsi(cfg).run(12)
    assert [json.dumps(ev.to_record()) for ev in fast.trace] == [json.dumps(r) for r in events]
    assert fast.state.step_account == HyperInt.exact(account)
    assert M == fast.M


def test_naive_values_agree():
    naive = NaivePsi(PsiConfig())
    psi = PsiFn()
    for n in range(8):
        assert naive.value(n) == psi(n)


def test_psi_is_honest_on_small_range():
    rep = check_honesty(PsiFn(), 20, degree=4)
    assert rep.ok, rep.witnesses
    assert rep.measured_c is not None


def test_psi_values():
    psi = PsiFn()
    assert [psi(n).to_int() for n in range(5)] == [1, 2, 4, 125, 125]
    assert psi(21) == HyperInt.exact(2 ** 21)


def test_trace_round_trip(default40):
    text = default40.trace_jsonl()
    header, rows = loads(text)
    assert header["format"] == "honestdeg-psi-trace" and header["version"] == 1
    assert header["config"]["gamma"] == "TOWERDIAG"
    assert rows == [ev.to_record() for ev in default40.trace]
    assert audit_removals(rows) == []
    assert dumps(header["config"], default40.trace) == text


def test_audit_catches_forged_removal(default40):
    rows = [ev.to_record() for ev in default40.trace]
    forged = [dict(r) for r in rows]
    for r in forged:
        if r["type"] == "RemovalCheck" and r["removed"]:
            r["removed"] = False
    assert audit_removals(forged)
    forged = rows + [{"seq": len(rows), "type": "HaltObserved", "e": 0, "m": 41}]
    assert audit_no_resurrection(forged)


def test_other_schedules_run():
    for cfg in (PsiConfig(schedule="paper"), PsiConfig(schedule="ordinal"), PsiConfig(iterate_mode="ordinal")):
        r = psi_run(cfg, 20)
        assert audit_removals(r.trace) == [] and audit_no_resurrection(r.trace) == []
        assert r.M.compare(2 ** 20) >= 0


def test_cap_exceeded_names_the_culprit():
    with pytest.raises(PsiCapExceeded) as info:
        psi_run(PsiConfig(schedule="paper", initial=(33,), cap=10_000), 5)
    assert info.value.psi_e == 33 and info.value.m == 3


def test_bad_config_rejected():
    for kw in ({"schedule": "fast"}, {"iterate_mode": "x"}, {"removal_steps": "y"}, {"initial": (1, 1)}):
        with pytest.raises(ValueError):
            PsiConfig(**kw)


def test_cap_witness_below_both_arms():
    psi, diag = PsiFn(), BuiltinFn("TOWERDIAG")
    a = cap_witness_config(psi, diag)
    for n in range(15):
        assert a(n) == min(psi(n), diag(n))
        assert a(n) <= psi(n) and a(n) <= diag(n)
