"""Declared-cost builtin machines and the index space they live in.

Machine indices: an even index ``2*pair(b, j)`` names catalog entry ``b``
(the padding ``j`` is ignored, so each entry recurs infinitely often); an
odd index ``2*c + 1`` names the register program with Goedel code ``c``.

Catalog numbers below ``len(catalog)`` are the fixed named entries.  Larger
numbers ``len(catalog) + pair(family, param)`` encode parametrised machines
built from other indices (associates, hats, parallel compositions).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Optional

from ..hyperint import HyperInt, exp2, max_h, tower
from .program import RegisterProgram, pair, unpair

_DIAG_LIMIT = 1 << 20


def _formula_table() -> dict[str, tuple[Callable[[int], HyperInt], Callable[[HyperInt], Optional[HyperInt]]]]:
    def succ_sym(x: HyperInt):
        return HyperInt.exact(x.top + 1) if x.is_exact else None

    def diag_sym(x: HyperInt):
        if x.is_exact and x.top <= _DIAG_LIMIT:
            return tower(x.top, x)
        return None

    table = {
        "zero": (lambda n: HyperInt.exact(0), lambda x: HyperInt.exact(0)),
        "one": (lambda n: HyperInt.exact(1), lambda x: HyperInt.exact(1)),
        "id": (HyperInt.exact, lambda x: x),
        "succ": (lambda n: HyperInt.exact(n + 1), succ_sym),
        "pow2": (exp2, exp2),
        "towerdiag": (lambda n: tower(n, HyperInt.exact(n)), diag_sym),
    }
    for k in range(1, 33):
        table[f"tower:{k}"] = (
            (lambda k: lambda n: tower(k, HyperInt.exact(n)))(k),
            (lambda k: lambda x: tower(k, x))(k),
        )
    return table


FORMULAS = _formula_table()


@dataclass(frozen=True)
class BuiltinSpec:
    """A machine with a closed-form output and a declared step cost.

    ``diverge_from`` makes the machine partial: it never halts on inputs
    ``>= diverge_from``.  Costs are floored at 1.
    """

    name: str
    output: str
    cost: str
    diverge_from: Optional[int] = None

    def __post_init__(self):
        for f in (self.output, self.cost):
            if f not in FORMULAS:
                raise ValueError(f"{self.name}: unknown formula {f!r}")

    def output_at(self, n: int) -> HyperInt:
        return FORMULAS[self.output][0](n)

    def cost_at(self, n: int) -> Optional[HyperInt]:
        """Declared steps on input n, or None when the machine diverges."""
        if self.diverge_from is not None and n >= self.diverge_from:
            return None
        return max_h(HyperInt.exact(1), FORMULAS[self.cost][0](n))

    def apply_symbolic(self, x: HyperInt) -> Optional[HyperInt]:
        """Output on a possibly-tower input, or None if not representable."""
        if self.diverge_from is not None:
            if not x.is_exact or x.top >= self.diverge_from:
                return None
        return FORMULAS[self.output][1](x)

    def to_dict(self) -> dict:
        d = {"name": self.name, "output": self.output, "cost": self.cost}
        if self.diverge_from is not None:
            d["diverge_from"] = self.diverge_from
        return d


# Parametrised families, numbered after the fixed catalog entries.
PARTIAL_AT, ASSOC, HAT, PAR_BOTH, PAR_EITHER = range(5)
FAMILY_NAMES = ("PARTIAL_AT", "ASSOC", "HAT", "PAR_BOTH", "PAR_EITHER")


@dataclass(frozen=True)
class Sequential:
    """Runs ``inner`` on 0..n in succession.

    ``assoc``: output max(2^n, total steps), one bookkeeping step per run.
    ``hat``: output 0, no bookkeeping.
    """

    inner: int
    mode: str


@dataclass(frozen=True)
class Parallel:
    """Alternates steps of two machines; ``both`` halts when both have,
    ``either`` when the first one does.  Output 0."""

    left: int
    right: int
    mode: str


_CALL = re.compile(r"^([A-Z_]+)\(([\d\s,]*)\)$")


@dataclass(frozen=True)
class Catalog:
    entries: tuple[BuiltinSpec, ...]

    def __post_init__(self):
        names = [b.name for b in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate builtin names")

    @classmethod
    def default(cls) -> "Catalog":
        return DEFAULT_CATALOG

    @classmethod
    def from_dict(cls, data: dict) -> "Catalog":
        return cls(tuple(BuiltinSpec(**b) for b in data["builtins"]))

    @classmethod
    def load(cls, path) -> "Catalog":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"builtins": [b.to_dict() for b in self.entries]}

    def __len__(self) -> int:
        return len(self.entries)

    def number(self, name: str) -> int:
        for i, b in enumerate(self.entries):
            if b.name == name:
                return i
        raise KeyError(name)

    def index(self, name: str, padding: int = 0) -> int:
        """Machine index of a named builtin."""
        return 2 * pair(self.number(name), padding)

    def family_index(self, family: int, param: int) -> int:
        return 2 * pair(len(self.entries) + pair(family, param), 0)

    def partial_at(self, j: int) -> int:
        return self.family_index(PARTIAL_AT, j)

    def assoc(self, e: int) -> int:
        return self.family_index(ASSOC, e)

    def hat(self, e: int) -> int:
        return self.family_index(HAT, e)

    def par_both(self, e1: int, e2: int) -> int:
        return self.family_index(PAR_BOTH, pair(e1, e2))

    def par_either(self, e1: int, e2: int) -> int:
        return self.family_index(PAR_EITHER, pair(e1, e2))

    def decode(self, e: int):
        """Total decoding of a machine index."""
        if e < 0:
            raise ValueError("negative machine index")
        if e % 2:
            return RegisterProgram.from_godel((e - 1) // 2)
        b, _ = unpair(e // 2)
        if b < len(self.entries):
            return self.entries[b]
        fam, param = unpair(b - len(self.entries))
        fam %= len(FAMILY_NAMES)
        if fam == PARTIAL_AT:
            return BuiltinSpec(f"PARTIAL_AT({param})", "pow2", "pow2", diverge_from=param)
        if fam == ASSOC:
            return Sequential(param, "assoc")
        if fam == HAT:
            return Sequential(param, "hat")
        left, right = unpair(param)
        return Parallel(left, right, "both" if fam == PAR_BOTH else "either")

    def resolve(self, text) -> int:
        """Index from an int, a builtin name, or ``FAMILY(args)``."""
        if isinstance(text, int):
            return text
        s = str(text).strip()
        if s.isdigit():
            return int(s)
        m = _CALL.match(s)
        if m:
            fam = m.group(1)
            args = [self.resolve(a) for a in m.group(2).split(",") if a.strip()]
            if fam == "PARTIAL_AT" and len(args) == 1:
                return self.partial_at(args[0])
            if fam in ("ASSOC", "HAT") and len(args) == 1:
                return self.assoc(args[0]) if fam == "ASSOC" else self.hat(args[0])
            if fam in ("PAR_BOTH", "PAR_EITHER") and len(args) == 2:
                f = self.par_both if fam == "PAR_BOTH" else self.par_either
                return f(*args)
            raise KeyError(s)
        return self.index(s)

    def describe(self, e: int) -> str:
        p = self.decode(e)
        if isinstance(p, BuiltinSpec):
            return p.name
        if isinstance(p, Sequential):
            return f"{p.mode.upper()}({p.inner})"
        if isinstance(p, Parallel):
            return f"PAR_{p.mode.upper()}({p.left},{p.right})"
        return f"PROGRAM[{(e - 1) // 2}]"


def _default() -> Catalog:
    items = [
        BuiltinSpec("ZERO", "zero", "one"),
        BuiltinSpec("ID", "id", "succ"),
        BuiltinSpec("SUCC", "succ", "succ"),
        BuiltinSpec("POW2", "pow2", "pow2"),
    ]
    items += [BuiltinSpec(f"TOWER_{k}", f"tower:{k}", f"tower:{k}") for k in range(1, 7)]
    items.append(BuiltinSpec("TOWERDIAG", "towerdiag", "towerdiag"))
    return Catalog(tuple(items))


DEFAULT_CATALOG = _default()
