"""Nonnegative integers extended with symbolic towers of twos.

A ``HyperInt`` is either an exact integer or ``2_k^x``, the k-fold iterate
of ``x -> 2**x`` applied to ``x``.  Values are kept canonical so that
structural equality is numeric equality:

* anything below ``2**64`` is exact;
* a tower ``2_k^x`` has ``x >= 64`` (smaller tops are expanded one level);
* an exact power of two ``>= 2**64`` is lifted into a tower.

Comparison is exact for every pair of values, however tall.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Union

BOUND_BITS = 64
BOUND = 1 << BOUND_BITS

_TEXT = re.compile(r"^(?:E:(\d+)|T:(\d+):(\d+))$")


class NotExact(ArithmeticError):
    """Raised when an operation needs a concrete integer but got a tower."""


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


def _canon(k: int, x: int) -> tuple[int, int]:
    if k < 0 or x < 0:
        raise ValueError(f"negative tower parameters ({k}, {x})")
    while k > 0 and x < BOUND_BITS:
        x = 1 << x
        k -= 1
    while x >= BOUND and _is_pow2(x):
        x = x.bit_length() - 1
        k += 1
    return k, x


def _cmp(ak: int, ax: int, bk: int, bx: int) -> int:
    # Operands are canonical; every reduction below keeps them canonical.
    sign = 1
    if ak and bk:
        s = min(ak, bk)
        ak -= s
        bk -= s
    if not ak and not bk:
        return (ax > bx) - (ax < bx)
    if ak:
        ak, ax, bk, bx = bk, bx, ak, ax
        sign = -1
    # exact ax against the tower 2^T, T = 2_{bk-1}^bx
    if ax < BOUND:
        return -sign
    # canonical ax >= 2^64 is not a power of two: 2^(bl-1) < ax < 2^bl
    bl = ax.bit_length()
    tower_wins = _cmp(bk - 1, bx, 0, bl) >= 0
    return -sign if tower_wins else sign


@total_ordering
@dataclass(frozen=True)
class HyperInt:
    """Canonical exact-or-tower value.  ``height == 0`` means exact."""

    height: int
    top: int
    saturated: bool = field(default=False, compare=False)

    @classmethod
    def exact(cls, value: int) -> "HyperInt":
        k, x = _canon(0, int(value))
        return cls(k, x)

    @classmethod
    def tower(cls, k: int, x: int) -> "HyperInt":
        """The value ``2_k^x`` in canonical form."""
        k, x = _canon(int(k), int(x))
        return cls(k, x)

    @classmethod
    def coerce(cls, v: Union["HyperInt", int]) -> "HyperInt":
        if isinstance(v, HyperInt):
            return v
        if isinstance(v, int) and not isinstance(v, bool):
            return cls.exact(v)
        raise TypeError(f"cannot interpret {v!r} as HyperInt")

    @property
    def is_exact(self) -> bool:
        return self.height == 0

    def to_int(self) -> int:
        if self.height:
            raise NotExact(f"{self} is a tower")
        return self.top

    def __int__(self) -> int:
        return self.to_int()

    def compare(self, other: Union["HyperInt", int]) -> int:
        o = HyperInt.coerce(other)
        return _cmp(self.height, self.top, o.height, o.top)

    def __lt__(self, other):
        if not isinstance(other, (HyperInt, int)):
            return NotImplemented
        return self.compare(other) < 0

    def __eq__(self, other):
        if isinstance(other, HyperInt):
            return self.height == other.height and self.top == other.top
        if isinstance(other, int) and not isinstance(other, bool):
            return self.height == 0 and self.top == other
        return NotImplemented

    def __hash__(self):
        return hash((self.height, self.top))

    def __str__(self) -> str:
        if self.height == 0:
            return f"E:{self.top}"
        return f"T:{self.height}:{self.top}"

    def __repr__(self) -> str:
        flag = ", saturated" if self.saturated else ""
        return f"HyperInt({self}{flag})"

    def flagged(self) -> "HyperInt":
        return HyperInt(self.height, self.top, True)


ZERO = HyperInt.exact(0)
ONE = HyperInt.exact(1)


def parse(text: str) -> HyperInt:
    """Inverse of ``str``: ``E:<decimal>`` or ``T:<k>:<decimal>``."""
    m = _TEXT.match(text.strip())
    if not m:
        raise ValueError(f"not a HyperInt literal: {text!r}")
    if m.group(1) is not None:
        return HyperInt.exact(int(m.group(1)))
    return HyperInt.tower(int(m.group(2)), int(m.group(3)))


def compare(a, b) -> int:
    """-1, 0 or 1 according to the denoted integers."""
    return HyperInt.coerce(a).compare(b)


def exp2(a) -> HyperInt:
    a = HyperInt.coerce(a)
    return HyperInt.tower(a.height + 1, a.top)


def tower(k: int, m) -> HyperInt:
    """k-fold ``exp2`` of ``m``; ``tower(0, m) == m``."""
    if k < 0:
        raise ValueError("negative tower height")
    m = HyperInt.coerce(m)
    if k == 0:
        return m
    return HyperInt.tower(m.height + k, m.top)


def max_h(*vals) -> HyperInt:
    vals = [HyperInt.coerce(v) for v in vals]
    best = vals[0]
    for v in vals[1:]:
        if v.compare(best) > 0:
            best = v
    return best


def min_h(*vals) -> HyperInt:
    vals = [HyperInt.coerce(v) for v in vals]
    best = vals[0]
    for v in vals[1:]:
        if v.compare(best) < 0:
            best = v
    return best


def add_exact(a, b) -> HyperInt:
    a, b = HyperInt.coerce(a), HyperInt.coerce(b)
    if a.height or b.height:
        raise NotExact(f"add_exact({a}, {b}): step counter left the concrete regime")
    return HyperInt.exact(a.top + b.top)


def add_saturating(a, b) -> HyperInt:
    """``a + b``; with a tower operand the larger side absorbs the sum (flagged)."""
    a, b = HyperInt.coerce(a), HyperInt.coerce(b)
    if not a.height and not b.height:
        return HyperInt.exact(a.top + b.top)
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return max_h(a, b).flagged()


def mul_small(a, c: int) -> HyperInt:
    """``a * c`` for a small positive factor.

    Towers absorb the factor when ``c`` does not exceed the tower's top
    (the dominance slack); the result then carries ``saturated=True``.
    A power-of-two factor on a height-1 tower stays exact.
    """
    a = HyperInt.coerce(a)
    if c < 1:
        raise ValueError("mul_small needs a positive factor")
    if not a.height:
        return HyperInt.exact(a.top * c)
    if c == 1:
        return a
    if a.height == 1 and _is_pow2(c):
        return HyperInt.tower(1, a.top + c.bit_length() - 1)
    if c > a.top:
        raise ValueError(f"factor {c} exceeds the dominance slack of {a}")
    return a.flagged()


def pow_small(a, d: int) -> HyperInt:
    """``a ** d``; exact for exact bases and height-1 towers, saturating above."""
    a = HyperInt.coerce(a)
    if d < 0:
        raise ValueError("negative exponent")
    if not a.height:
        return HyperInt.exact(a.top ** d)
    if d == 0:
        return ONE
    if a.height == 1:
        return HyperInt.tower(1, a.top * d)
    return a if d == 1 else a.flagged()
