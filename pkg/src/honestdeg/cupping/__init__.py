"""The anti-cupping machine and its trace."""
from .psi import (
    GammaDiverged,
    PsiCapExceeded,
    PsiConfig,
    PsiFn,
    PsiMachine,
    PsiResult,
    PsiState,
    cap_witness_config,
    psi_as_honest_fn,
    psi_run,
)
from .trace import TraceEvent, audit_no_resurrection, audit_removals, dumps, loads

__all__ = [
    "GammaDiverged", "PsiCapExceeded", "PsiConfig", "PsiFn", "PsiMachine", "PsiResult", "PsiState",
    "cap_witness_config", "psi_as_honest_fn", "psi_run",
    "TraceEvent", "audit_no_resurrection", "audit_removals", "dumps", "loads",
]
