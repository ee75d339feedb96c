"""Finite iteration and bounded comparators for growth rates.

``leq_e_proxy`` looks for k with f <= g^k on a finite range, and
``ll_e_proxy`` for k with f^m <= g^k on a tail of the range for every
m up to a bound.  Both are semi-decisions: a negative verdict says
nothing beyond the parameters tested.

Comparators iterate g symbolically, so a tower-valued g^k(x) is still
compared exactly when g knows how to act on towers (the catalog
builtins do).  When a value cannot be computed at all it is treated as
+infinity, which is sound for the <= direction.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .honest import ClosedForm, Evaluation, HonestFn
from .hyperint import HyperInt, compare

DEFAULT_RANGE = range(0, 17)
DEFAULT_K_MAX = 6
DEFAULT_M_MAX = 6


class IterateOverflow(ArithmeticError):
    """The j-th intermediate of an iterate was a tower."""

    def __init__(self, step: int, value: HyperInt = None):
        super().__init__(f"iterate left the concrete regime at step {step} ({value})")
        self.step = step
        self.value = value


FnLike = Union[HonestFn, Callable[[int], object]]


def as_fn(f: FnLike, name: Optional[str] = None) -> HonestFn:
    if isinstance(f, HonestFn):
        return f
    return ClosedForm(name or getattr(f, "__name__", "f"), f)


def iterate(f: FnLike, k: int, x: int) -> HyperInt:
    """k-fold application of f to x.  Every intermediate must be exact."""
    if k < 0:
        raise ValueError("negative iteration count")
    f = as_fn(f)
    v = HyperInt.coerce(x)
    for j in range(1, k + 1):
        v = f(v.top)
        if not v.is_exact:
            raise IterateOverflow(j, v)
    return v


def iterate_symbolic(f: FnLike, k: int, x) -> Optional[HyperInt]:
    """k-fold application allowing tower intermediates; None means +infinity."""
    f = as_fn(f)
    v = HyperInt.coerce(x)
    for _ in range(k):
        v = f.apply_symbolic(v)
        if v is None:
            return None
    return v


def _leq(a: Optional[HyperInt], b: Optional[HyperInt]) -> bool:
    if b is None:
        return True
    if a is None:
        return False
    return compare(a, b) <= 0


class Iterated(HonestFn):
    """The handle for f^k."""

    def __init__(self, f: FnLike, k: int):
        self.inner = as_fn(f)
        self.k = k
        super().__init__(f"{self.inner.name}^{k}")
        self.claims_honest = self.inner.claims_honest and k >= 1

    def _compute(self, n, budget):
        return Evaluation(iterate(self.inner, self.k, n), HyperInt.exact(1))

    def apply_symbolic(self, x):
        return iterate_symbolic(self.inner, self.k, x)


@dataclass(frozen=True)
class WitnessK:
    k: int

    def __str__(self):
        return f"WitnessK({self.k})"


@dataclass(frozen=True)
class NoWitnessUpTo:
    k_max: int
    counterexamples: tuple = field(default=())  # (k, x, f(x), g^k(x))

    def __str__(self):
        return f"NoWitnessUpTo({self.k_max})"


@dataclass(frozen=True)
class Fails:
    k_max: int
    counterexamples: tuple = field(default=())  # (k, m, x, f^m(x), g^k(x))

    def __str__(self):
        return f"Fails({self.k_max})"


def _fmt(v: Optional[HyperInt]) -> str:
    return "inf" if v is None else str(v)


def dominated_on(f: FnLike, g: FnLike, xs: Iterable[int] = DEFAULT_RANGE):
    """(True, None) if f(x) <= g(x) on xs, else (False, first counterexample x)."""
    f, g = as_fn(f), as_fn(g)
    for x in xs:
        if f(x) > g(x):
            return False, x
    return True, None


def leq_e_proxy(f: FnLike, g: FnLike, k_max: int = DEFAULT_K_MAX, xs: Iterable[int] = DEFAULT_RANGE):
    """Smallest k <= k_max with f <= g^k on xs."""
    f, g = as_fn(f), as_fn(g)
    xs = list(xs)
    fx = {x: f(x) for x in xs}
    bad = []
    for k in range(k_max + 1):
        miss = []
        for x in xs:
            gk = iterate_symbolic(g, k, x)
            if not _leq(fx[x], gk):
                miss.append((k, x, fx[x], gk))
        if not miss:
            return WitnessK(k)
        bad.extend(miss)
    return NoWitnessUpTo(k_max, tuple(bad))


def ll_e_proxy(f: FnLike, g: FnLike, k_max: int = DEFAULT_K_MAX, m_max: int = DEFAULT_M_MAX,
               tail_start: int = 0, xs: Iterable[int] = DEFAULT_RANGE):
    """Smallest k <= k_max with f^m(x) <= g^k(x) for all m <= m_max and x >= tail_start in xs."""
    f, g = as_fn(f), as_fn(g)
    xs = [x for x in xs if x >= tail_start]
    fm = {(m, x): iterate_symbolic(f, m, x) for m in range(m_max + 1) for x in xs}
    bad = []
    for k in range(k_max + 1):
        miss = []
        for x in xs:
            gk = iterate_symbolic(g, k, x)
            for m in range(m_max + 1):
                if not _leq(fm[m, x], gk):
                    miss.append((k, m, x, fm[m, x], gk))
        if not miss:
            return WitnessK(k)
        bad.extend(miss)
    return Fails(k_max, tuple(bad))


def growth_csv(f: FnLike, g: FnLike, k_max: int = DEFAULT_K_MAX, xs: Iterable[int] = DEFAULT_RANGE,
               verdict=None) -> str:
    """Growth curves as CSV: x, f(x), g(x), g^2(x), ...; a final comment line holds the verdict."""
    f, g = as_fn(f), as_fn(g)
    xs = list(xs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", f.name] + [f"{g.name}^{k}" for k in range(1, k_max + 1)])
    for x in xs:
        w.writerow([x, _fmt(f.apply_symbolic(HyperInt.exact(x)))]
                   + [_fmt(iterate_symbolic(g, k, x)) for k in range(1, k_max + 1)])
    if verdict is None:
        verdict = leq_e_proxy(f, g, k_max, xs)
    buf.write(f"# verdict: {verdict}\n")
    return buf.getvalue()
