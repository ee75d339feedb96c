"""Enumerated machines: register programs plus a declared-cost builtin catalog."""
from .catalog import (
    BuiltinSpec,
    Catalog,
    DEFAULT_CATALOG,
    FAMILY_NAMES,
    FORMULAS,
    Parallel,
    Sequential,
)
from .program import HALT_PROGRAM, Instr, ProgramParseError, RegisterProgram, pair, unpair
from .runner import (
    CAP_ENV,
    DEFAULT_CAP,
    CapExceeded,
    FirstHalt,
    Halted,
    NoneHalted,
    Runner,
    StillRunning,
    decode,
    default_cap,
    dovetail,
    run,
)

__all__ = [
    "BuiltinSpec", "Catalog", "DEFAULT_CATALOG", "FAMILY_NAMES", "FORMULAS", "Parallel",
    "Sequential", "HALT_PROGRAM", "Instr", "ProgramParseError", "RegisterProgram", "pair",
    "unpair", "CAP_ENV", "DEFAULT_CAP", "CapExceeded", "FirstHalt", "Halted", "NoneHalted",
    "Runner", "StillRunning", "decode", "default_cap", "dovetail", "run",
]
