"""Honest functions: memoized handles, honest associates, honesty reports."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .hyperint import HyperInt, ONE, add_saturating, compare, exp2, max_h, mul_small, pow_small
from .machine import BuiltinSpec, Catalog, Halted, Runner

Budget = Union[HyperInt, int, None]


class EvaluationDiverged(RuntimeError):
    """The function did not halt on ``n`` within the budget it was given."""

    def __init__(self, n: int, budget=None, name: str = "?"):
        super().__init__(f"{name} did not halt on input {n} within budget {budget}")
        self.n = n
        self.budget = budget


class HonestyViolation(AssertionError):
    pass


@dataclass(frozen=True)
class Evaluation:
    value: HyperInt
    cost: HyperInt


class HonestFn:
    """A unary function handle with a write-once memo of (value, cost).

    Subclasses implement ``_compute(n, budget)``.  ``claims_honest`` marks
    sources that are honest by construction; the memo then rejects any
    value below 2^n or any decrease between neighbouring inputs.
    """

    claims_honest = False

    def __init__(self, name: str, budget: Budget = None):
        self.name = name
        self.budget = budget
        self._memo: dict[int, Evaluation] = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    def _compute(self, n: int, budget) -> Evaluation:
        raise NotImplementedError

    def evaluate(self, n: int, budget: Budget = None) -> Evaluation:
        if n < 0:
            raise ValueError("negative input")
        if budget is None:
            budget = self.budget
        ev = self._memo.get(n)
        if ev is None:
            ev = self._compute(n, budget)
            self._store(n, ev)
        elif budget is not None and compare(ev.cost, budget) > 0:
            raise EvaluationDiverged(n, budget, self.name)
        return ev

    def _store(self, n: int, ev: Evaluation) -> None:
        if self.claims_honest:
            if ev.value < exp2(n):
                raise HonestyViolation(f"{self.name}({n}) = {ev.value} < 2^{n}")
            below, above = self._memo.get(n - 1), self._memo.get(n + 1)
            if below is not None and ev.value < below.value:
                raise HonestyViolation(f"{self.name} decreases at {n - 1}")
            if above is not None and above.value < ev.value:
                raise HonestyViolation(f"{self.name} decreases at {n}")
        self._memo[n] = ev

    def __call__(self, n: int) -> HyperInt:
        return self.evaluate(n).value

    def cost(self, n: int) -> HyperInt:
        return self.evaluate(n).cost

    def apply_symbolic(self, x: HyperInt) -> Optional[HyperInt]:
        """Value at a possibly-tower argument; None when that is not computable."""
        if x.is_exact:
            return self(x.top)
        return None


class ClosedForm(HonestFn):
    """Wraps a plain Python function of n (values int or HyperInt)."""

    def __init__(self, name: str, fn: Callable[[int], object], cost: Optional[Callable[[int], object]] = None,
                 symbolic: Optional[Callable[[HyperInt], Optional[HyperInt]]] = None, honest: bool = False):
        super().__init__(name)
        self._fn = fn
        self._cost = cost
        self._symbolic = symbolic
        self.claims_honest = honest

    def _compute(self, n, budget):
        v = HyperInt.coerce(self._fn(n))
        c = HyperInt.coerce(self._cost(n)) if self._cost else ONE
        if budget is not None and compare(c, budget) > 0:
            raise EvaluationDiverged(n, budget, self.name)
        return Evaluation(v, c)

    def apply_symbolic(self, x):
        if self._symbolic is not None:
            return self._symbolic(x)
        return super().apply_symbolic(x)


class BuiltinFn(HonestFn):
    """A catalog builtin viewed as a function: value and cost are its closed forms."""

    def __init__(self, spec: Union[BuiltinSpec, str], catalog: Optional[Catalog] = None):
        if isinstance(spec, str):
            catalog = catalog or Catalog.default()
            spec = catalog.entries[catalog.number(spec)]
        super().__init__(spec.name)
        self.spec = spec

    def _compute(self, n, budget):
        cost = self.spec.cost_at(n)
        if cost is None or (budget is not None and compare(cost, budget) > 0):
            raise EvaluationDiverged(n, budget, self.name)
        return Evaluation(self.spec.output_at(n), cost)

    def apply_symbolic(self, x):
        return self.spec.apply_symbolic(x)


class AssociateFn(HonestFn):
    """The honest associate of machine ``e``.

    On n it runs machine e on 0, 1, ..., n in succession; if all halt the
    value is max(2^n, total steps).  The evaluation cost is the total plus
    one bookkeeping step per run, which is exactly the step count of the
    catalog's ASSOC(e) machine.
    """

    claims_honest = True

    def __init__(self, e: int, runner: Optional[Runner] = None, budget: Budget = None):
        self.runner = runner or Runner()
        super().__init__(f"ASSOC({self.runner.catalog.describe(e)})", budget)
        self.e = e
        self._steps: list[HyperInt] = []  # halting times of e on 0, 1, ...

    feed_limit = 1 << 16

    def apply_symbolic(self, x):
        # beyond this the evaluation is hopeless; callers read None as +infinity
        if x.is_exact and x.top <= self.feed_limit:
            return self(x.top)
        return None

    def _compute(self, n, budget):
        limit = None if budget is None else HyperInt.coerce(budget)
        total = HyperInt.exact(0)
        spent = HyperInt.exact(0)
        for i in range(n + 1):
            if i < len(self._steps):
                s = self._steps[i]
            else:
                remaining = None if limit is None else _remaining(limit, spent)
                r = self.runner.run(self.e, i, remaining)
                if not isinstance(r, Halted):
                    raise EvaluationDiverged(n, budget, self.name)
                s = r.steps
                self._steps.append(s)
            total = add_saturating(total, s)
            spent = add_saturating(spent, add_saturating(s, ONE))
            if limit is not None and compare(spent, limit) > 0:
                raise EvaluationDiverged(n, budget, self.name)
        return Evaluation(max_h(exp2(n), total), spent)


def _remaining(limit: HyperInt, spent: HyperInt) -> HyperInt:
    if limit.is_exact and spent.is_exact:
        return HyperInt.exact(max(0, limit.top - spent.top))
    return limit


def honest_associate(e: int, runner: Optional[Runner] = None, budget: Budget = None) -> AssociateFn:
    return AssociateFn(e, runner, budget)


def cumulative_hat(e: int, catalog: Optional[Catalog] = None) -> int:
    """Index of the machine that runs e on 0..n in succession, halting iff all do."""
    return (catalog or Catalog.default()).hat(e)


@dataclass
class HonestyReport:
    name: str
    n_max: int
    degree: int
    constant: Optional[Fraction]
    monotone_ok: bool
    dominates_2x_ok: bool
    runtime_poly_ok: bool
    witnesses: dict = field(default_factory=dict)
    measured_c: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.monotone_ok and self.dominates_2x_ok and self.runtime_poly_ok

    def to_record(self) -> dict:
        return {
            "type": "HonestyReport",
            "name": self.name,
            "range": [0, self.n_max],
            "degree": self.degree,
            "constant": None if self.constant is None else str(self.constant),
            "monotone": self.monotone_ok,
            "dominates_2x": self.dominates_2x_ok,
            "runtime_poly": self.runtime_poly_ok,
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
            "measured_c": None if self.measured_c is None else str(self.measured_c),
        }


def check_honesty(f: HonestFn, n_max: int, degree: int = 2, constant=None) -> HonestyReport:
    """Check monotonicity, domination of 2^x, and cost <= c * f(n)^degree on 0..n_max.

    With ``constant=None`` the smallest admissible constant is measured and
    reported, and the runtime check passes iff one exists (every f(n) > 0
    and every cost exact).  Raises EvaluationDiverged if f is not total on
    the range.
    """
    evs = [f.evaluate(n) for n in range(n_max + 1)]
    wit = {"monotone": [], "dominates_2x": [], "runtime_poly": []}
    for n in range(n_max):
        if evs[n + 1].value < evs[n].value:
            wit["monotone"].append(n)
    for n, ev in enumerate(evs):
        if ev.value < exp2(n):
            wit["dominates_2x"].append(n)

    measured: Optional[Fraction] = Fraction(0)
    for n, ev in enumerate(evs):
        if ev.value == 0:
            measured = None
            break
        if ev.value.is_exact and ev.cost.is_exact:
            ratio = Fraction(ev.cost.top, ev.value.top ** degree)
            measured = max(measured, ratio)
        elif compare(ev.cost, pow_small(ev.value, degree)) <= 0:
            measured = max(measured, Fraction(1))  # bound, not a ratio
        else:
            measured = None
            break

    c = None if constant is None else Fraction(constant)
    if c is None:
        if measured is None:
            wit["runtime_poly"] = [n for n, ev in enumerate(evs)
                                   if ev.value == 0 or compare(ev.cost, pow_small(ev.value, degree)) > 0]
    else:
        for n, ev in enumerate(evs):
            if not _cost_within(ev.cost, ev.value, degree, c):
                wit["runtime_poly"].append(n)

    return HonestyReport(
        name=f.name,
        n_max=n_max,
        degree=degree,
        constant=c,
        monotone_ok=not wit["monotone"],
        dominates_2x_ok=not wit["dominates_2x"],
        runtime_poly_ok=not wit["runtime_poly"],
        witnesses=wit,
        measured_c=measured,
    )


def _cost_within(cost: HyperInt, value: HyperInt, d: int, c: Fraction) -> bool:
    if cost.is_exact and value.is_exact:
        return cost.top * c.denominator <= c.numerator * value.top ** d
    bound = pow_small(value, d)
    if c >= 1:
        bound = mul_small(bound, int(c)) if bound.is_exact or int(c) <= bound.top else bound
    return compare(cost, bound) <= 0
