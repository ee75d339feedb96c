"""Toy register machines and their Goedel numbering."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt


def pair(x: int, y: int) -> int:
    """Cantor pairing."""
    s = x + y
    return s * (s + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


class ProgramParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class Instr:
    op: str  # "INC" | "DECJZ" | "HALT"
    reg: int = 0
    label: int = 0

    def __str__(self) -> str:
        if self.op == "INC":
            return f"INC {self.reg}"
        if self.op == "DECJZ":
            return f"DECJZ {self.reg} {self.label}"
        return "HALT"


HALT = Instr("HALT")


@dataclass(frozen=True)
class RegisterProgram:
    """Straight-line code over INC / DECJZ / HALT.

    Input goes in register 0 and the output is register 0 at HALT.
    ``DECJZ r L`` jumps to instruction ``L`` when register ``r`` is zero,
    otherwise decrements it and falls through.  Running off the end acts
    as an implicit HALT (one step, like an explicit one).
    """

    instructions: tuple[Instr, ...]

    def __post_init__(self):
        n = len(self.instructions)
        if n == 0:
            raise ValueError("empty program")
        for i, ins in enumerate(self.instructions):
            if ins.op == "DECJZ" and not 0 <= ins.label < n:
                raise ValueError(f"instruction {i}: label {ins.label} out of range")

    @property
    def registers(self) -> int:
        return 1 + max((i.reg for i in self.instructions), default=0)

    @classmethod
    def parse(cls, text: str) -> "RegisterProgram":
        out = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            op = parts[0].upper()
            try:
                args = [int(p) for p in parts[1:]]
            except ValueError:
                raise ProgramParseError(lineno, f"non-integer operand in {line!r}") from None
            if any(a < 0 for a in args):
                raise ProgramParseError(lineno, "negative operand")
            if op == "INC" and len(args) == 1:
                out.append(Instr("INC", args[0]))
            elif op == "DECJZ" and len(args) == 2:
                out.append(Instr("DECJZ", args[0], args[1]))
            elif op == "HALT" and not args:
                out.append(HALT)
            else:
                raise ProgramParseError(lineno, f"bad instruction {line!r}")
        if not out:
            raise ProgramParseError(0, "no instructions")
        for i, ins in enumerate(out):
            if ins.op == "DECJZ" and ins.label >= len(out):
                raise ProgramParseError(0, f"instruction {i}: label {ins.label} out of range")
        return cls(tuple(out))

    def to_text(self) -> str:
        return "\n".join(str(i) for i in self.instructions) + "\n"

    # Goedel coding.  A list is 0 for [] and 1 + pair(head, tail) otherwise;
    # an instruction i is HALT (i % 3 == 0), INC i//3 (i % 3 == 1), or
    # DECJZ with pair(reg, label) = i//3 (i % 3 == 2).
    def godel(self) -> int:
        code = 0
        for ins in reversed(self.instructions):
            code = 1 + pair(_instr_code(ins), code)
        return code

    @classmethod
    def from_godel(cls, code: int) -> "RegisterProgram":
        """Total decoding: ill-formed codes give the immediately halting program."""
        items = []
        while code:
            head, code = unpair(code - 1)
            items.append(_instr_from_code(head))
        try:
            return cls(tuple(items))
        except ValueError:
            return HALT_PROGRAM


HALT_PROGRAM = RegisterProgram((HALT,))


def _instr_code(ins: Instr) -> int:
    if ins.op == "HALT":
        return 0
    if ins.op == "INC":
        return 3 * ins.reg + 1
    return 3 * pair(ins.reg, ins.label) + 2


def _instr_from_code(i: int) -> Instr:
    q, t = divmod(i, 3)
    if t == 0:
        return HALT
    if t == 1:
        return Instr("INC", q)
    r, lab = unpair(q)
    return Instr("DECJZ", r, lab)
