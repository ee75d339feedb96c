"""The anti-cupping machine Psi.

On input n the machine keeps a stage counter k (initially 2), a running
output M (initially 1) and a set C of machine indices (initially {0}).
Iteration m dovetails the honest associates of C on m, each for at most
B(k, m) steps.  If one halts with output N, every e in C is tested on
every l < m and dropped when max[Psi, assoc(e)]^e(l) is seen to be below
Gamma(l) within m steps; then M grows to max(M, N, 2^m).  If none halts,
k goes up, the least index never seen in C joins it, and M grows to
max(M, B(k, m), 2^m).  Psi(n) is M after iteration n.

Every decision is logged as a TraceEvent; the trace is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Union

from ..honest import Evaluation, HonestFn
from ..hyperint import ONE, ZERO, HyperInt, add_saturating, exp2, max_h, tower
from ..machine import BuiltinSpec, CapExceeded, Catalog, FirstHalt, Halted, Runner
from ..machine.runner import default_cap
from ..ordinals import BudgetExhausted, IterBudget, fund_seq, parse_ord, trans_iterate
from .trace import TraceEvent
from . import trace as _trace

SCHEDULES = ("scaled", "paper", "ordinal")
ITERATE_MODES = ("finite", "ordinal")
REMOVAL_STEP_MODES = ("total", "per-eval")


class GammaDiverged(RuntimeError):
    def __init__(self, l: int):
        super().__init__(f"Gamma diverges on {l}")
        self.l = l


class PsiCapExceeded(CapExceeded):
    """CapExceeded raised while dovetailing; ``psi_e`` is the member of C responsible."""

    def __init__(self, inner: CapExceeded, psi_e: int, m: int):
        super().__init__(inner.e, inner.n, inner.cap, inner.at)
        self.args = (f"{inner.args[0]} (while running the associate of {psi_e} at m={m})",)
        self.psi_e = psi_e
        self.m = m


@dataclass(frozen=True)
class PsiConfig:
    gamma: Union[str, int] = "TOWERDIAG"
    schedule: str = "scaled"
    alpha: str = "w"  # fundamental-sequence source for the ordinal variants
    iterate_mode: str = "finite"
    cap: Optional[int] = None
    removal_steps: str = "total"
    initial: tuple = (0,)
    catalog: Optional[Catalog] = field(default=None, compare=False)

    def __post_init__(self):
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.iterate_mode not in ITERATE_MODES:
            raise ValueError(f"unknown iterate mode {self.iterate_mode!r}")
        if self.removal_steps not in REMOVAL_STEP_MODES:
            raise ValueError(f"unknown removal step mode {self.removal_steps!r}")
        if len(set(self.initial)) != len(self.initial):
            raise ValueError("initial C has repeated indices")
        if "ordinal" in (self.schedule, self.iterate_mode):
            parse_ord(self.alpha, allow_epsilon=True)

    def resolved_catalog(self) -> Catalog:
        return self.catalog if self.catalog is not None else Catalog.default()

    def to_dict(self) -> dict:
        cat = self.resolved_catalog()
        return {
            "gamma": self.gamma,
            "gamma_index": cat.resolve(self.gamma),
            "schedule": self.schedule,
            "alpha": self.alpha if "ordinal" in (self.schedule, self.iterate_mode) else None,
            "iterate_mode": self.iterate_mode,
            "cap": default_cap() if self.cap is None else self.cap,
            "removal_steps": self.removal_steps,
            "initial": list(self.initial),
            "catalog": "default" if self.catalog is None else self.catalog.to_dict(),
        }


@dataclass
class PsiState:
    k: int = 2
    M: HyperInt = ONE
    C: list = field(default_factory=list)
    ever_in_c: set = field(default_factory=set)
    m_table: list = field(default_factory=list)
    step_account: HyperInt = ZERO
    account_table: list = field(default_factory=list)

    def snapshot(self) -> "PsiState":
        return replace(self, C=list(self.C), ever_in_c=set(self.ever_in_c),
                       m_table=list(self.m_table), account_table=list(self.account_table))


@dataclass
class PsiResult:
    M: HyperInt
    trace: list
    state: PsiState
    config: PsiConfig

    def trace_jsonl(self) -> str:
        return _trace.dumps(self.config.to_dict(), self.trace)


class _Abort(Exception):
    """Iterate produced a number >= m."""


class _OutOfSteps(Exception):
    pass


class _Probe(HonestFn):
    """max[Psi, assoc(e)] as seen from inside a removal check at iteration m."""

    def __init__(self, machine: "PsiMachine", e: int, m: int):
        super().__init__(f"max[Psi,ASSOC({e})]")
        self.machine = machine
        self.e = e
        self.m = m
        self.spent = 0

    def _charge(self, steps: int) -> None:
        self.spent += steps
        if self.spent > self.m:
            raise _OutOfSteps

    def apply_symbolic(self, x: HyperInt) -> HyperInt:
        m = self.m
        if not x.is_exact or x.top >= m:
            raise _Abort
        x = x.top
        per_eval = self.machine.config.removal_steps == "per-eval"
        psi_x = self.machine.state.m_table[x]  # table read
        if per_eval:
            self.spent += 1
            room = m
        else:
            self._charge(1)
            room = m - self.spent
        r = self.machine.runner.run(self.machine.catalog.assoc(self.e), x, room)
        if not isinstance(r, Halted):
            raise _OutOfSteps
        steps = r.steps.to_int()
        if per_eval:
            self.spent += steps
        else:
            self._charge(steps)
        v = max_h(psi_x, r.output)
        if v.compare(m) >= 0:
            raise _Abort
        return v

    def _compute(self, n, budget):
        return Evaluation(self.apply_symbolic(HyperInt.exact(n)), ONE)


class PsiMachine:
    """Runs the main loop one iteration at a time, keeping the full trace."""

    def __init__(self, config: PsiConfig = PsiConfig()):
        self.config = config
        self.catalog = config.resolved_catalog()
        self.runner = Runner(self.catalog, config.cap)
        self.gamma = self.catalog.resolve(config.gamma)
        self.state = PsiState(C=list(config.initial), ever_in_c=set(config.initial))
        self.events: list[TraceEvent] = []
        self.iteration_ends: list[int] = []  # len(events) after each iteration
        self._alpha = None
        if "ordinal" in (config.schedule, config.iterate_mode):
            self._alpha = parse_ord(config.alpha, allow_epsilon=True)
        self._pow2 = None

    # -- schedule ----------------------------------------------------------
    def budget(self, k: int, m: int) -> HyperInt:
        s = self.config.schedule
        if s == "scaled":
            return HyperInt.exact((m + 2) ** k)
        if s == "paper":
            return tower(k, m)
        from ..honest import BuiltinFn
        if self._pow2 is None:
            self._pow2 = BuiltinFn("POW2")
        return trans_iterate(self._pow2, fund_seq(self._alpha, k), m)

    # -- events --------------------------------------------------------------
    def _emit(self, type_, **kw) -> TraceEvent:
        extra = kw.pop("extra", {})
        ev = TraceEvent(len(self.events), type_, extra=extra, **kw)
        self.events.append(ev)
        return ev

    # -- main loop ------------------------------------------------------------
    @property
    def iterations_done(self) -> int:
        return len(self.state.m_table)

    def run_to(self, n: int) -> None:
        while self.iterations_done <= n:
            self.step()

    def step(self) -> None:
        st = self.state
        m = self.iterations_done
        B = self.budget(st.k, m)
        self._emit("IterStart", m=m, k=st.k, M=st.M, value=B, extra={"C": list(st.C)})
        tasks = [(self.catalog.assoc(e), m) for e in st.C]
        try:
            res = self.runner.dovetail(tasks, B)
        except CapExceeded as exc:
            pos = exc.position if exc.position is not None else 0
            raise PsiCapExceeded(exc, st.C[pos], m) from exc
        st.step_account = add_saturating(st.step_account, res.spent)
        if isinstance(res, FirstHalt):
            winner = st.C[res.position]
            N = res.output
            snapshot = list(st.C)
            self._emit("HaltObserved", m=m, e=winner, value=N, k=st.k, M=st.M,
                       extra={"steps": res.steps, "ties": res.ties, "spent": res.spent, "snapshot": snapshot})
            doomed = []
            for e in snapshot:
                for l in range(m):
                    if self._removal_check(e, l, m) and e not in doomed:
                        doomed.append(e)
            for e in doomed:
                st.C.remove(e)
                self._emit("Removal", m=m, e=e, k=st.k, M=st.M)
            st.M = max_h(st.M, N, exp2(m))
        else:
            st.k += 1
            i = 0
            while i in st.ever_in_c:
                i += 1
            st.C.append(i)
            st.ever_in_c.add(i)
            self._emit("ElseBranch", m=m, e=i, k=st.k, M=st.M, extra={"spent": res.spent})
            st.M = max_h(st.M, self.budget(st.k, m), exp2(m))
        st.step_account = add_saturating(st.step_account, ONE)
        self._emit("MUpdate", m=m, k=st.k, M=st.M, value=st.M)
        st.m_table.append(st.M)
        st.account_table.append(st.step_account)
        self.iteration_ends.append(len(self.events))

    def _removal_check(self, e: int, l: int, m: int) -> bool:
        st = self.state
        gamma = self._run_gamma(l, m)
        it = self._run_iterate(e, l, m)
        st.step_account = add_saturating(st.step_account, HyperInt.exact(gamma["steps"] + it["steps"]))
        removed = (gamma["status"] == "halted" and it["status"] == "halted"
                   and it["value"] < gamma["value"])
        self._emit("RemovalCheck", m=m, e=e, l=l, k=st.k, M=st.M,
                   extra={"gamma": gamma, "iterate": it, "removed": removed})
        return removed

    def _run_gamma(self, l: int, m: int) -> dict:
        spec = self.runner.decode(self.gamma)
        if isinstance(spec, BuiltinSpec) and spec.cost_at(l) is None:
            raise GammaDiverged(l)
        r = self.runner.run(self.gamma, l, m)
        if isinstance(r, Halted):
            return {"status": "halted", "value": r.output, "steps": r.steps.to_int()}
        return {"status": "timeout", "value": None, "steps": m}

    def _run_iterate(self, e: int, l: int, m: int) -> dict:
        probe = _Probe(self, e, m)
        try:
            if self.config.iterate_mode == "finite":
                v = HyperInt.exact(l)
                for _ in range(e):
                    v = probe.apply_symbolic(v)
            else:
                v = trans_iterate(probe, fund_seq(self._alpha, e), l, IterBudget(max(1, m), 64))
                if v.compare(m) >= 0:
                    raise _Abort
        except _Abort:
            return {"status": "abort", "value": None, "steps": min(probe.spent, m)}
        except (_OutOfSteps, BudgetExhausted):
            return {"status": "timeout", "value": None, "steps": m}
        if probe.spent > m and self.config.removal_steps == "total":
            return {"status": "timeout", "value": None, "steps": m}
        return {"status": "halted", "value": v, "steps": probe.spent}

    # -- results --------------------------------------------------------------
    def result(self, n: int) -> PsiResult:
        if self.iterations_done > n + 1:
            raise ValueError(f"machine already ran past iteration {n}")
        self.run_to(n)
        M = self.state.m_table[n]
        events = list(self.events)
        events.append(TraceEvent(len(events), "Output", m=n, value=M, M=M))
        return PsiResult(M, events, self.state.snapshot(), self.config)


def psi_run(config: PsiConfig, n: int) -> PsiResult:
    """Psi(n) together with its full trace and final state."""
    if n < 0:
        raise ValueError("negative input")
    return PsiMachine(config).result(n)


class PsiFn(HonestFn):
    """Psi as a function handle; iterations are shared across inputs."""

    claims_honest = True

    def __init__(self, config: PsiConfig = PsiConfig()):
        super().__init__(f"Psi[{config.gamma},{config.schedule}]")
        self.config = config
        self.machine = PsiMachine(config)

    def _compute(self, n, budget):
        self.machine.run_to(n)
        st = self.machine.state
        return Evaluation(st.m_table[n], st.account_table[n])


def psi_as_honest_fn(config: PsiConfig = PsiConfig()) -> PsiFn:
    return PsiFn(config)


def cap_witness_config(x: HonestFn, b: HonestFn) -> HonestFn:
    from ..lattice import cap_witness
    return cap_witness(x, b)
