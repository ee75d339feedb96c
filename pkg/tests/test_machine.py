import random

import pytest

from honestdeg.hyperint import HyperInt
from honestdeg.machine import (
    CAP_ENV, BuiltinSpec, CapExceeded, Catalog, FirstHalt, Halted, Instr, NoneHalted,
    ProgramParseError, RegisterProgram, Runner, StillRunning, default_cap, pair, unpair,
)
from oracles import halting_time, round_robin, step_program

CAT = Catalog.default()
ZERO, POW2 = CAT.index("ZERO"), CAT.index("POW2")
LOOP = 33  # DECJZ 1 0: spins forever


def prog_index(p):
    return 2 * p.godel() + 1


def random_program(rng, length=5, regs=2):
    code = []
    for _ in range(length):
        r = rng.random()
        if r < 0.45:
            code.append(Instr("INC", rng.randrange(regs)))
        elif r < 0.9:
            code.append(Instr("DECJZ", rng.randrange(regs), rng.randrange(length)))
        else:
            code.append(Instr("HALT"))
    return RegisterProgram(tuple(code))


PROGRAMS = [random_program(random.Random(s), length=random.Random(s).randrange(1, 7)) for s in range(150)]


def test_pairing_roundtrip():
    for z in range(2000):
        assert pair(*unpair(z)) == z
    assert pair(0, 0) == 0 and pair(1, 0) == 1 and pair(0, 1) == 2


def test_godel_roundtrip():
    for p in PROGRAMS:
        assert RegisterProgram.from_godel(p.godel()) == p
        assert RegisterProgram.parse(p.to_text()) == p


def test_decode_is_total():
    for e in range(3000):
        CAT.decode(e)
    assert str(CAT.decode(LOOP).instructions[0]) == "DECJZ 1 0"


def test_enumeration_hits_every_builtin():
    for b, spec in enumerate(CAT.entries):
        for j in range(101):
            assert CAT.decode(2 * pair(b, j)) is spec


def test_parse_errors():
    for bad in ("FOO 1", "INC", "DECJZ 0 5", "INC -1", ""):
        with pytest.raises(ProgramParseError):
            RegisterProgram.parse(bad)


@pytest.mark.parametrize("n", [0, 1, 3, 7])
def test_runs_match_literal_interpreter(n):
    runner = Runner(CAT, cap=10_000)
    for p in PROGRAMS:
        want = step_program(p, n, 500)
        got = runner.run(prog_index(p), n, 500)
        if want is None:
            assert isinstance(got, StillRunning)
        else:
            assert got == Halted(HyperInt.exact(want[0]), HyperInt.exact(want[1]))


def test_budget_monotone_and_resumable():
    runner = Runner(CAT, cap=10_000)
    for p in PROGRAMS[:60]:
        e = prog_index(p)
        small = runner.run(e, 4, 20)
        big = runner.run(e, 4, 400)
        again = Runner(CAT, cap=10_000).run(e, 4, 400)
        assert big == again
        if isinstance(small, Halted):
            assert big == small


def test_builtins_use_declared_costs():
    r = Runner(CAT)
    assert r.run(ZERO, 3, 5) == Halted(HyperInt.exact(0), HyperInt.exact(1))
    assert r.run(POW2, 10, 1024) == Halted(HyperInt.exact(1024), HyperInt.exact(1024))
    assert isinstance(r.run(POW2, 10, 1023), StillRunning)
    assert isinstance(r.run(CAT.partial_at(2), 2, 10 ** 9), StillRunning)
    assert isinstance(r.run(CAT.partial_at(2), 1, 10), Halted)
    assert r.run(CAT.index("TOWERDIAG"), 5).output == HyperInt.tower(5, 5)


def test_dovetail_examples():
    r = Runner(CAT)
    assert r.dovetail([(ZERO, 3)], 5) == FirstHalt(ZERO, 3, HyperInt.exact(0), HyperInt.exact(1), 0, 0,
                                                   HyperInt.exact(1))
    fh = r.dovetail([(POW2, 10), (ZERO, 10)], 8)
    assert isinstance(fh, FirstHalt) and fh.e == ZERO and fh.position == 1
    assert isinstance(r.dovetail([(POW2, 10)], 8), NoneHalted)


def test_dovetail_matches_round_robin():
    rng = random.Random(11)
    runner = Runner(CAT, cap=10_000)
    for _ in range(200):
        tasks = []
        for _ in range(rng.randrange(1, 5)):
            if rng.random() < 0.3:
                tasks.append((rng.choice([ZERO, POW2, CAT.index("SUCC")]), rng.randrange(6)))
            else:
                tasks.append((prog_index(rng.choice(PROGRAMS)), rng.randrange(6)))
        budget = rng.randrange(1, 60)
        machines = [(runner.decode(e), n) for e, n in tasks]
        want = round_robin(machines, budget)
        got = runner.dovetail(tasks, budget)
        if want is None:
            assert isinstance(got, NoneHalted)
        else:
            pos, quantum = want
            assert isinstance(got, FirstHalt)
            assert got.position == pos
            assert got.spent == HyperInt.exact(quantum)
            assert got.steps.to_int() == halting_time(machines[pos][0], tasks[pos][1], budget)


def test_single_task_dovetail_equals_run():
    runner = Runner(CAT, cap=10_000)
    for p in PROGRAMS[:50]:
        e = prog_index(p)
        r = runner.run(e, 2, 100)
        d = runner.dovetail([(e, 2)], 100)
        if isinstance(r, Halted):
            assert (d.output, d.steps) == (r.output, r.steps)
        else:
            assert isinstance(d, NoneHalted)


def test_cap_exceeded_is_loud():
    r = Runner(CAT, cap=1000)
    with pytest.raises(CapExceeded):
        r.run(LOOP, 0, 5000)
    with pytest.raises(CapExceeded) as info:
        r.dovetail([(POW2, 20), (LOOP, 0)], 10 ** 6)
    assert info.value.position == 1
    assert isinstance(r.run(LOOP, 0, 999), StillRunning)


def test_cap_env_override(monkeypatch):
    monkeypatch.setenv(CAP_ENV, "1234")
    assert default_cap() == 1234
    assert Runner().cap == 1234


def test_builtin_spec_validation():
    with pytest.raises(ValueError):
        BuiltinSpec("BAD", "nope", "one")
