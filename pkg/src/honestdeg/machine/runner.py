"""Step-exact bounded execution and dovetailing.

Every machine is driven through an *execution*: a resumable object whose
``advance(limit)`` runs until the machine halts or has consumed ``limit``
steps, whichever comes first.  Register programs are interpreted one
instruction per step; builtins resolve in one go at their declared cost;
composite machines account the steps of their constituents.

``cap`` is the ceiling on concrete interpretation.  Asking a register
program for more than ``cap`` steps while it is still running raises
``CapExceeded``: the experiment must raise its cap, the program is never
silently declared divergent.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Optional, Sequence, Union

from ..hyperint import HyperInt, ZERO, add_saturating, exp2, max_h, mul_small
from .catalog import BuiltinSpec, Catalog, Parallel, Sequential
from .program import RegisterProgram

DEFAULT_CAP = 10**7
CAP_ENV = "HONESTDEG_CAP"

Budget = Union[HyperInt, int, None]


def default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


class CapExceeded(RuntimeError):
    """A register program was still running when it reached the cap.

    ``at`` is the time, in steps of the outermost machine being advanced,
    at which the offending step would have been executed.
    """

    def __init__(self, e: int, n: int, cap: int, at: HyperInt):
        super().__init__(f"machine {e} on input {n} still running at cap {cap}")
        self.e = e
        self.n = n
        self.cap = cap
        self.at = at
        self.position = None  # task position, when raised from a dovetail

    def shifted(self, delta: HyperInt) -> "CapExceeded":
        return CapExceeded(self.e, self.n, self.cap, add_saturating(self.at, delta))


@dataclass(frozen=True)
class Halted:
    output: HyperInt
    steps: HyperInt


@dataclass(frozen=True)
class StillRunning:
    budget_spent: Optional[HyperInt]


@dataclass(frozen=True)
class FirstHalt:
    e: int
    input: int
    output: HyperInt
    steps: HyperInt
    position: int
    ties: int  # other tasks halting at the same quantum, all later in the list
    spent: HyperInt  # steps executed across all tasks


@dataclass(frozen=True)
class NoneHalted:
    spent: HyperInt


def _limit(budget: Budget) -> Optional[HyperInt]:
    return None if budget is None else HyperInt.coerce(budget)


def _sub(limit: Optional[HyperInt], done: HyperInt) -> Optional[HyperInt]:
    if limit is None:
        return None
    if limit.is_exact and done.is_exact:
        return HyperInt.exact(max(0, limit.top - done.top))
    # a tower budget absorbs whatever was spent before it
    return limit.flagged() if done != ZERO else limit


def _within(x: HyperInt, limit: Optional[HyperInt]) -> bool:
    return limit is None or x.compare(limit) <= 0


class _Progress:
    """Furthest-advanced state of one (program, input) computation, shared
    by every execution of it inside a runner."""

    __slots__ = ("code", "pc", "regs", "steps", "halted")

    def __init__(self, program: RegisterProgram, n: int):
        code = []
        for ins in program.instructions:
            if ins.op == "INC":
                code.append((0, ins.reg, 0))
            elif ins.op == "DECJZ":
                code.append((1, ins.reg, ins.label))
            else:
                code.append((2, 0, 0))
        code.append((2, 0, 0))  # running off the end
        self.code = code
        self.pc = 0
        self.regs = [0] * program.registers
        self.regs[0] = n
        self.steps = 0
        self.halted = False

    def run_to(self, target: int) -> None:
        code, regs = self.code, self.regs
        pc, steps = self.pc, self.steps
        halted = False
        while steps < target:
            op, r, lab = code[pc]
            steps += 1
            if op == 0:
                regs[r] += 1
                pc += 1
            elif op == 1:
                if regs[r]:
                    regs[r] -= 1
                    pc += 1
                else:
                    pc = lab
            else:
                halted = True
                break
        self.pc, self.steps, self.halted = pc, steps, halted


class _RegisterExecution:
    def __init__(self, runner: "Runner", e: int, n: int, progress: _Progress):
        self.runner, self.e, self.n = runner, e, n
        self._p = progress
        self.steps = ZERO
        self.halted = False
        self.output: Optional[HyperInt] = None

    def advance(self, limit: Optional[HyperInt]) -> bool:
        if self.halted:
            return True
        cap = self.runner.cap
        over = limit is None or limit.compare(cap) > 0
        target = cap if over else limit.top
        p = self._p
        if not p.halted and p.steps < target:
            p.run_to(target)
        if p.halted and p.steps <= target:
            self.halted = True
            self.steps = HyperInt.exact(p.steps)
            self.output = HyperInt.exact(p.regs[0])
            return True
        if over:
            raise CapExceeded(self.e, self.n, cap, HyperInt.exact(cap + 1))
        self.steps = HyperInt.exact(target)
        return False


class _BuiltinExecution:
    def __init__(self, spec: BuiltinSpec, n: int):
        self.spec, self.n = spec, n
        self.steps = ZERO
        self.halted = False
        self.output: Optional[HyperInt] = None

    def advance(self, limit: Optional[HyperInt]) -> bool:
        if self.halted:
            return True
        cost = self.spec.cost_at(self.n)
        if cost is not None and _within(cost, limit):
            self.halted = True
            self.steps = cost
            self.output = self.spec.output_at(self.n)
            return True
        if limit is not None:
            self.steps = limit
        return False


class _SequentialExecution:
    def __init__(self, runner: "Runner", spec: Sequential, n: int):
        self.runner, self.spec, self.n = runner, spec, n
        self._i = 0
        self._child = None
        self._done = ZERO
        self._total = ZERO
        self._bookkeeping = False
        self.steps = ZERO
        self.halted = False
        self.output: Optional[HyperInt] = None

    def advance(self, limit: Optional[HyperInt]) -> bool:
        if self.halted:
            return True
        assoc = self.spec.mode == "assoc"
        while True:
            if self._bookkeeping:
                after = add_saturating(self._done, HyperInt.exact(1))
                if not _within(after, limit):
                    self.steps = limit
                    return False
                self._done = after
                self._bookkeeping = False
                self._i += 1
            if self._i > self.n:
                self.halted = True
                self.steps = self._done
                if assoc:
                    self.output = max_h(exp2(self.n), self._total)
                else:
                    self.output = ZERO
                return True
            if self._child is None:
                self._child = self.runner.execution(self.spec.inner, self._i)
            try:
                ok = self._child.advance(_sub(limit, self._done))
            except CapExceeded as exc:
                raise exc.shifted(self._done) from None
            if not ok:
                self.steps = add_saturating(self._done, self._child.steps)
                return False
            self._done = add_saturating(self._done, self._child.steps)
            self._total = add_saturating(self._total, self._child.steps)
            self._child = None
            if assoc:
                self._bookkeeping = True
            else:
                self._i += 1


def _half(limit: Optional[HyperInt], round_up: bool) -> Optional[HyperInt]:
    if limit is None:
        return None
    if limit.is_exact:
        return HyperInt.exact((limit.top + round_up) // 2)
    if limit.height == 1:
        return HyperInt.tower(1, limit.top - 1)
    return limit.flagged()


class _ParallelExecution:
    def __init__(self, runner: "Runner", spec: Parallel, n: int):
        self.spec, self.n = spec, n
        self.left = runner.execution(spec.left, n)
        self.right = runner.execution(spec.right, n)
        self.steps = ZERO
        self.halted = False
        self.output: Optional[HyperInt] = None

    def advance(self, limit: Optional[HyperInt]) -> bool:
        if self.halted:
            return True
        if self.spec.mode == "both":
            return self._both(limit)
        return self._either(limit)

    def _both(self, limit):
        # interleaving does not change the total: both halt within L iff s1 + s2 <= L
        if not self.left.advance(limit):
            self.steps = limit
            return False
        try:
            ok = self.right.advance(_sub(limit, self.left.steps))
        except CapExceeded as exc:
            raise exc.shifted(self.left.steps) from None
        if not ok:
            self.steps = limit
            return False
        self.halted = True
        self.steps = add_saturating(self.left.steps, self.right.steps)
        self.output = ZERO
        return True

    def _either(self, limit):
        # rounds run one left step then one right step: left halting after
        # s steps happens at time 2s - 1, right at time 2s
        events = []
        for side, ex, lim in ((0, self.left, _half(limit, True)), (1, self.right, _half(limit, False))):
            try:
                if ex.advance(lim):
                    events.append((_interleaved(ex.steps, side), side, None))
            except CapExceeded as exc:
                events.append((_interleaved(exc.at, side), side, exc))
        if not events:
            self.steps = limit
            return False
        t, side, exc = min(events, key=cmp_to_key(_event_order))
        if exc is not None:
            raise CapExceeded(exc.e, exc.n, exc.cap, t)
        self.halted = True
        self.steps = t
        self.output = ZERO
        return True


def _interleaved(s: HyperInt, side: int) -> HyperInt:
    d = mul_small(s, 2)
    if side == 0 and d.is_exact:
        return HyperInt.exact(d.top - 1)
    return d


def _event_order(a, b) -> int:
    c = a[0].compare(b[0])
    return c if c else (a[1] > b[1]) - (a[1] < b[1])


class Runner:
    """Executes machine indices against one catalog and one cap.

    Register computations are cached per (program, input), so re-running a
    machine resumes from where any earlier run of it stopped.
    """

    def __init__(self, catalog: Optional[Catalog] = None, cap: Optional[int] = None):
        self.catalog = catalog if catalog is not None else Catalog.default()
        self.cap = default_cap() if cap is None else int(cap)
        if self.cap < 1:
            raise ValueError("cap must be positive")
        self._decoded: dict[int, object] = {}
        self._progress: dict[tuple[int, int], _Progress] = {}

    def decode(self, e: int):
        p = self._decoded.get(e)
        if p is None:
            p = self._decoded[e] = self.catalog.decode(e)
        return p

    def execution(self, e: int, n: int):
        if n < 0:
            raise ValueError("negative input")
        p = self.decode(e)
        if isinstance(p, RegisterProgram):
            key = (e, n)
            prog = self._progress.get(key)
            if prog is None:
                prog = self._progress[key] = _Progress(p, n)
            return _RegisterExecution(self, e, n, prog)
        if isinstance(p, BuiltinSpec):
            return _BuiltinExecution(p, n)
        if isinstance(p, Sequential):
            return _SequentialExecution(self, p, n)
        return _ParallelExecution(self, p, n)

    def run(self, e: int, n: int, budget: Budget = None):
        """Run machine ``e`` on ``n`` for at most ``budget`` steps (None: no budget)."""
        limit = _limit(budget)
        ex = self.execution(e, n)
        if ex.advance(limit):
            return Halted(ex.output, ex.steps)
        return StillRunning(limit)

    def _rounds(self, budget: HyperInt):
        t = 1
        while budget.compare(t) > 0 and t <= self.cap:
            yield HyperInt.exact(t)
            t *= 2
        yield budget

    def dovetail(self, tasks: Sequence[tuple[int, int]], budget: Budget):
        """Round-robin the tasks one step at a time, each for at most ``budget`` steps.

        Returns the task halting at the earliest global quantum, ties going to
        the earlier list position.  Implemented by advancing every task to
        doubling horizons, which yields the same winner as literal
        interleaving because every event up to a horizon is seen before any
        later one.
        """
        if budget is None:
            raise ValueError("dovetail needs a finite budget")
        budget = HyperInt.coerce(budget)
        if not tasks:
            return NoneHalted(ZERO)
        execs = [self.execution(e, x) for e, x in tasks]
        for horizon in self._rounds(budget):
            events = []
            for pos, ex in enumerate(execs):
                try:
                    if ex.advance(horizon):
                        events.append((ex.steps, pos, None))
                except CapExceeded as exc:
                    events.append((exc.at, pos, exc))
            if not events:
                continue
            events.sort(key=cmp_to_key(_event_order))
            t, pos, exc = events[0]
            if exc is not None:
                exc.position = pos
                raise exc
            ties = sum(1 for ev in events[1:] if ev[0] == t and ev[2] is None)
            e, x = tasks[pos]
            return FirstHalt(e, x, execs[pos].output, t, pos, ties, _spent(t, pos, len(tasks)))
        return NoneHalted(_times(budget, len(tasks)))


def _times(x: HyperInt, c: int) -> HyperInt:
    if x.is_exact or c <= x.top:
        return mul_small(x, c)
    return x.flagged()


def _spent(t: HyperInt, pos: int, count: int) -> HyperInt:
    if t.is_exact:
        q = t.top
        return HyperInt.exact(q * (pos + 1) + (q - 1) * (count - pos - 1))
    return _times(t, count)


def run(e: int, n: int, budget: Budget = None, cap: Optional[int] = None, catalog: Optional[Catalog] = None):
    return Runner(catalog, cap).run(e, n, budget)


def dovetail(tasks, budget: Budget, cap: Optional[int] = None, catalog: Optional[Catalog] = None):
    return Runner(catalog, cap).dovetail(tasks, budget)


def decode(e: int, catalog: Optional[Catalog] = None):
    return (catalog or Catalog.default()).decode(e)
