"""Join and meet of honest functions, taken pointwise on representatives.

Degrees themselves are never built; every statement is about the
representative functions and their values.
"""
from __future__ import annotations

from dataclasses import dataclass

from .honest import Evaluation, HonestFn
from .hyperint import ONE, add_saturating, max_h, min_h


class _Pointwise(HonestFn):
    op = None
    symbol = "?"

    def __init__(self, f: HonestFn, g: HonestFn, name: str = None):
        super().__init__(name or f"{self.symbol}[{f.name},{g.name}]")
        self.f = f
        self.g = g
        self.claims_honest = f.claims_honest and g.claims_honest

    def _compute(self, n, budget):
        a = self.f.evaluate(n, budget)
        b = self.g.evaluate(n, budget)
        return Evaluation(type(self).op(a.value, b.value), self._cost(a.cost, b.cost))

    @staticmethod
    def _cost(a, b):
        return add_saturating(a, b)

    def apply_symbolic(self, x):
        a = self.f.apply_symbolic(x)
        b = self.g.apply_symbolic(x)
        return self._combine(a, b)


class JoinFn(_Pointwise):
    """max[f, g]"""

    op = staticmethod(max_h)
    symbol = "max"

    @staticmethod
    def _combine(a, b):
        # None stands for a value too large to compute
        if a is None or b is None:
            return None
        return max_h(a, b)


class MeetFn(_Pointwise):
    """min[f, g].  The arms run in lockstep and the first to finish settles
    the evaluation, so the cost is twice the cheaper arm's plus one."""

    op = staticmethod(min_h)
    symbol = "min"

    @staticmethod
    def _cost(a, b):
        c = min_h(a, b)
        return add_saturating(add_saturating(c, c), ONE)

    @staticmethod
    def _combine(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return min_h(a, b)


def join(f: HonestFn, g: HonestFn) -> JoinFn:
    return JoinFn(f, g)


def meet(f: HonestFn, g: HonestFn) -> MeetFn:
    return MeetFn(f, g)


def cap_witness(x: HonestFn, b: HonestFn) -> MeetFn:
    """The meet of x and b, labelled ``a`` as in the no-cupping argument."""
    return MeetFn(x, b, name=f"a=min[{x.name},{b.name}]")


@dataclass(frozen=True)
class DegreeRep:
    rep: HonestFn
    label: str

    def join(self, other: "DegreeRep") -> "DegreeRep":
        return DegreeRep(join(self.rep, other.rep), f"({self.label} | {other.label})")

    def meet(self, other: "DegreeRep") -> "DegreeRep":
        return DegreeRep(meet(self.rep, other.rep), f"({self.label} & {other.label})")
