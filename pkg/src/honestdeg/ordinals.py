"""Ordinals below epsilon_0 in Cantor normal form.

Text syntax::

    expr     := term ('+' term)*
    term     := power ('*' NAT)? | NAT
    power    := 'w' ('^' exponent)?
    exponent := NAT | 'w' ('^' exponent)? | '(' expr ')'

so ``w^(w+1)*2+w+3``.  Adjacent terms with equal exponents are merged;
increasing exponents are rejected.  ``e0`` denotes the marker for
epsilon_0, accepted only where a fundamental sequence source is expected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Optional, Union

from .growth import IterateOverflow, as_fn
from .hyperint import HyperInt, max_h


@total_ordering
@dataclass(frozen=True)
class OrdinalCNF:
    """``terms`` is a tuple of (exponent, coefficient), exponents strictly decreasing."""

    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for e, c in self.terms:
            if not isinstance(e, OrdinalCNF) or c < 1:
                raise ValueError("bad CNF term")
            if prev is not None and not e < prev:
                raise ValueError("CNF exponents must strictly decrease")
            prev = e

    @classmethod
    def nat(cls, n: int) -> "OrdinalCNF":
        if n < 0:
            raise ValueError("negative")
        return cls(((ZERO, n),)) if n else ZERO

    @classmethod
    def omega_pow(cls, e: "OrdinalCNF", c: int = 1) -> "OrdinalCNF":
        return cls(((e, c),))

    def __lt__(self, other):
        if not isinstance(other, OrdinalCNF):
            return NotImplemented
        return compare_ord(self, other) < 0

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return all(e.is_zero for e, _ in self.terms)

    def as_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    def __str__(self):
        return format_ord(self)

    def __repr__(self):
        return f"OrdinalCNF({format_ord(self)})"


ZERO = OrdinalCNF()
ONE = OrdinalCNF(((ZERO, 1),))
OMEGA = OrdinalCNF(((ONE, 1),))


class EpsilonZero:
    """Stands for epsilon_0; only usable as a fundamental-sequence source."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __str__(self):
        return "e0"

    __repr__ = __str__


EPSILON_ZERO = EpsilonZero()


def compare_ord(a: OrdinalCNF, b: OrdinalCNF) -> int:
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare_ord(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def norm(a: OrdinalCNF) -> int:
    return sum(c * (1 + norm(e)) for e, c in a.terms)


def natural_sum(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    coeffs: dict = {}
    for e, c in a.terms + b.terms:
        coeffs[e] = coeffs.get(e, 0) + c
    return OrdinalCNF(tuple(sorted(coeffs.items(), key=lambda t: t[0], reverse=True)))


def enum_below_with_norm(alpha: OrdinalCNF, bound: int) -> list:
    """All beta < alpha with norm(beta) <= bound, ascending."""
    out = list(_below(alpha, bound))
    out.sort()
    return out


def _below(alpha: OrdinalCNF, bound: int):
    # Builds CNFs term by term; a prefix that is already >= alpha is pruned,
    # since appending terms only makes it larger.
    if alpha.is_zero:
        return
    lead = alpha.terms[0][0]

    def extend(prefix: tuple, cap: Optional[OrdinalCNF], budget: int):
        cur = OrdinalCNF(prefix)
        if compare_ord(cur, alpha) >= 0:
            return
        yield cur
        if budget <= 0:
            return
        # next exponent: strictly below the previous one, at most alpha's lead
        exps = [] if cap is not None and cap.is_zero else None
        if exps is None:
            top = cap if cap is not None else lead
            exps = list(_below(top, budget - 1))
            if cap is None and norm(lead) <= budget - 1:
                exps.append(lead)
        for e in exps:
            unit = 1 + norm(e)
            for c in range(1, budget // unit + 1):
                yield from extend(prefix + ((e, c),), e, budget - c * unit)

    yield from extend((), None, bound)


def in_slim(a) -> bool:
    if a is EPSILON_ZERO:
        return True
    return len(a.terms) == 1 and a.terms[0][1] == 1 and not a.terms[0][0].is_zero


class NotSLim(ValueError):
    pass


def _limit_seq(lam: OrdinalCNF, k: int) -> OrdinalCNF:
    # standard sequence for any limit lam = P + w^e
    *head, (e, c) = lam.terms
    head = list(head)
    if c > 1:
        head.append((e, c - 1))
    if e.is_limit:
        last = [(_limit_seq(e, k), 1)]
    else:
        last = [(_pred(e), k + 1)]
    return OrdinalCNF(tuple(head + last))


def _pred(a: OrdinalCNF) -> OrdinalCNF:
    *head, (e, c) = a.terms
    if not e.is_zero:
        raise ValueError(f"{a} has no predecessor")
    if c > 1:
        head.append((e, c - 1))
    return OrdinalCNF(tuple(head))


def fund_seq(a, k: int) -> OrdinalCNF:
    """k-th element of the canonical fundamental sequence of ``a`` (which must be w^b, b > 0, or e0)."""
    if k < 0:
        raise ValueError("negative index")
    if a is EPSILON_ZERO:
        out = ONE
        for _ in range(k):
            out = OrdinalCNF.omega_pow(out)
        return out
    if not in_slim(a):
        raise NotSLim(f"{a} is not of the form w^b with b > 0")
    return _limit_seq(a, k)


# --- transfinite iterates --------------------------------------------------

@dataclass(frozen=True)
class IterBudget:
    max_recursion_nodes: int = 100_000
    max_value_bits: int = 32

    def __post_init__(self):
        if self.max_recursion_nodes < 1 or self.max_value_bits < 1:
            raise ValueError("budget fields must be positive")


class BudgetExhausted(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"transfinite iterate exceeded {nodes} recursion nodes")
        self.nodes = nodes


def trans_iterate(f, alpha: OrdinalCNF, n, budget: IterBudget = IterBudget()) -> HyperInt:
    """f_alpha(n): f_0 = f, f_a(n) = max f_b(f_b(n)) over b < a with N(b) <= N(a) + n.

    Tower-valued intermediates are followed symbolically where possible:
    f itself is applied via ``apply_symbolic``, and for finite b the norm
    bound is vacuous at a tower argument so every j < b is a candidate.
    An infinite b at a tower (or over-wide) argument raises IterateOverflow.
    """
    f = as_fn(f)
    memo: dict = {}
    nodes = 0

    def ev(beta: OrdinalCNF, x: HyperInt) -> HyperInt:
        nonlocal nodes
        key = (beta, x)
        if key in memo:
            return memo[key]
        nodes += 1
        if nodes > budget.max_recursion_nodes:
            raise BudgetExhausted(budget.max_recursion_nodes)
        if beta.is_zero:
            r = f.apply_symbolic(x)
            if r is None:
                raise IterateOverflow(0, x)
        else:
            if beta.is_finite:
                j = beta.as_int()
                if x.is_exact:
                    j = min(j, norm(beta) + x.top + 1)
                cands = [OrdinalCNF.nat(i) for i in range(j)]
            else:
                if not x.is_exact or x.top.bit_length() > budget.max_value_bits:
                    raise IterateOverflow(0, x)
                cands = enum_below_with_norm(beta, norm(beta) + x.top)
            r = None
            for g in cands:
                v = ev(g, ev(g, x))
                r = v if r is None else max_h(r, v)
        memo[key] = r
        return r

    return ev(alpha, HyperInt.coerce(n))


# --- text syntax ---------------------------------------------------------

class OrdinalParseError(ValueError):
    def __init__(self, pos: int, msg: str):
        super().__init__(f"at {pos}: {msg}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|(e0|w|\^|\*|\+|\(|\)))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise OrdinalParseError(pos, f"unexpected {text[pos:pos + 5]!r}")
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((int(m.group(1)) if m.group(1) else m.group(2), start))
        pos = m.end()
    out.append((None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, want=None):
        tok = self.peek()
        if want is not None and tok != want:
            raise OrdinalParseError(self.pos(), f"expected {want!r}")
        self.i += 1
        return tok

    def expr(self) -> OrdinalCNF:
        terms = []
        while True:
            at = self.pos()
            e, c = self.term()
            if c:
                if terms and terms[-1][0] == e:
                    terms[-1] = (e, terms[-1][1] + c)
                elif terms and compare_ord(terms[-1][0], e) < 0:
                    raise OrdinalParseError(at, "terms not in decreasing order")
                else:
                    terms.append((e, c))
            if self.peek() != "+":
                return OrdinalCNF(tuple(terms))
            self.take()

    def term(self):
        tok = self.peek()
        if isinstance(tok, int):
            return ZERO, self.take()
        if tok != "w":
            raise OrdinalParseError(self.pos(), "expected a natural or 'w'")
        e = self.power()
        c = 1
        if self.peek() == "*":
            self.take()
            if not isinstance(self.peek(), int) or self.peek() == 0:
                raise OrdinalParseError(self.pos(), "expected a positive coefficient")
            c = self.take()
        return e, c

    def power(self) -> OrdinalCNF:
        # after 'w': the exponent of this power
        self.take("w")
        if self.peek() != "^":
            return ONE
        self.take()
        tok = self.peek()
        if isinstance(tok, int):
            return OrdinalCNF.nat(self.take())
        if tok == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if tok == "w":
            return OrdinalCNF.omega_pow(self.power())
        raise OrdinalParseError(self.pos(), "bad exponent")


def parse_ord(text: str, allow_epsilon: bool = False) -> Union[OrdinalCNF, EpsilonZero]:
    if text.strip() == "e0":
        if not allow_epsilon:
            raise OrdinalParseError(0, "e0 is not a CNF ordinal")
        return EPSILON_ZERO
    p = _Parser(text)
    if p.peek() is None:
        raise OrdinalParseError(0, "empty input")
    a = p.expr()
    if p.peek() is not None:
        raise OrdinalParseError(p.pos(), f"trailing {p.peek()!r}")
    return a


def format_ord(a) -> str:
    if a is EPSILON_ZERO:
        return "e0"
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        s = "w" + _fmt_exp(e)
        parts.append(s if c == 1 else f"{s}*{c}")
    return "+".join(parts)


def _fmt_exp(e: OrdinalCNF) -> str:
    if e == ONE:
        return ""
    if e.is_finite:
        return f"^{e.as_int()}"
    if len(e.terms) == 1 and e.terms[0][1] == 1:
        return "^w" + _fmt_exp(e.terms[0][0])
    return f"^({format_ord(e)})"
