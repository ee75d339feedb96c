import pytest

from honestdeg.honest import (
    AssociateFn, BuiltinFn, ClosedForm, EvaluationDiverged, HonestyViolation, check_honesty,
    cumulative_hat, honest_associate,
)
from honestdeg.hyperint import HyperInt
from honestdeg.machine import Catalog, Halted, Runner, StillRunning
from oracles import associate_value, halting_time

CAT = Catalog.default()
TOTAL = ["ZERO", "ID", "SUCC", "POW2", "TOWER_1", "TOWER_2", "TOWER_3", "TOWERDIAG"]
# small register programs: identity, a doubler and a halting loop on register 1
PROGRAMS = [1, 2 * 7 + 1, 2 * 1234 + 1]


def test_associate_of_zero_is_honest_with_c4():
    rep = check_honesty(honest_associate(CAT.index("ZERO")), 10, degree=2, constant=4)
    assert rep.ok, rep.witnesses


def test_constant_zero_fails_domination():
    rep = check_honesty(ClosedForm("zero", lambda n: 0), 3)
    assert not rep.dominates_2x_ok
    assert rep.witnesses["dominates_2x"][0] == 0
    assert rep.to_record()["dominates_2x"] is False


@pytest.mark.parametrize("name", TOTAL)
def test_associates_of_total_entries(name):
    f = honest_associate(CAT.index(name))
    prev = None
    for n in range(13):
        v = f(n)
        assert v.compare(HyperInt.exact(2 ** n)) >= 0
        if prev is not None:
            assert v.compare(prev) >= 0
        prev = v


@pytest.mark.parametrize("e", PROGRAMS + [CAT.index(n) for n in ("ZERO", "SUCC", "POW2")])
def test_associate_against_direct_runs(e):
    runner = Runner(CAT)
    f = AssociateFn(e, runner)
    for n in range(8):
        want = associate_value(runner.decode(e), n)
        assert f(n) == HyperInt.exact(want)
        # the catalog machine ASSOC(e) agrees in output and steps
        r = runner.run(CAT.assoc(e), n)
        assert r == Halted(f(n), f.cost(n))


def test_associate_halts_iff_all_inputs_halt():
    e = CAT.partial_at(3)
    runner = Runner(CAT)
    f = AssociateFn(e, runner, budget=10 ** 6)
    for n in range(6):
        all_halt = all(halting_time(runner.decode(e), m, 10 ** 6) is not None for m in range(n + 1))
        if all_halt:
            f(n)
        else:
            with pytest.raises(EvaluationDiverged):
                f(n)
        assert isinstance(runner.run(CAT.hat(e), n, 10 ** 6), Halted) == all_halt
    assert cumulative_hat(e) == CAT.hat(e)


def test_memo_consistency():
    f = honest_associate(CAT.index("POW2"))
    assert f.evaluate(6) == f.evaluate(6)
    g = BuiltinFn("TOWERDIAG")
    assert g.evaluate(4) == g.evaluate(4)


def test_budget_overrun_diverges():
    f = honest_associate(CAT.index("POW2"))
    f(5)
    with pytest.raises(EvaluationDiverged):
        f.evaluate(5, budget=3)


def test_builtin_divergence_reported():
    f = BuiltinFn(CAT.decode(CAT.partial_at(2)))
    assert f(1) == HyperInt.exact(2)
    with pytest.raises(EvaluationDiverged):
        f(2)


def test_dishonest_claim_caught():
    with pytest.raises(HonestyViolation):
        ClosedForm("liar", lambda n: 0, honest=True)(0)
    f = ClosedForm("dip", lambda n: [8, 4][n], honest=True)
    f(1)
    with pytest.raises(HonestyViolation):
        f(0)


def test_towerdiag_only_fails_at_zero():
    # 2_0^0 = 0, so the raw diagonal misses 2^x at the origin and nowhere else
    rep = check_honesty(BuiltinFn("TOWERDIAG"), 8, degree=1)
    assert rep.monotone_ok
    assert rep.witnesses["dominates_2x"] == [0]
    rep = check_honesty(BuiltinFn("POW2"), 8, degree=1)
    assert rep.ok and rep.measured_c == 1


def test_report_record_fields():
    rec = check_honesty(BuiltinFn("POW2"), 5, degree=1).to_record()
    assert set(rec) == {"type", "name", "range", "degree", "constant", "monotone", "dominates_2x",
                        "runtime_poly", "witnesses", "measured_c"}
    assert rec["range"] == [0, 5]
