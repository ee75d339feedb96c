"""Mock semantics for the relative-provability construction.

Provability itself is not modelled.  A mock theory is a table of abstract
Pi_1 sentences (each true, or false with the least number witnessing its
negation) plus a stream of proof events indexed by p.  Against that data
the helper machine A and the main loop run exactly as written, with
horizons standing in for unbounded searches.

File format, one directive per line (``#`` starts a comment)::

    sentence <id> true
    sentence <id> false negwitness <t>
    proof <p> cup <pi> <machine>
    proof <p> disj <eta>
    self <machine>

``<machine>`` is an index, a catalog name, ``FAMILY(args)``, or ``SELF``
(which resolves to the ``self`` directive's machine).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .cupping.trace import TraceEvent, dumps
from .machine import Catalog, Halted, Runner

TRUE_SENTENCE = "0=0"
TRACE_FORMAT = "honestdeg-prov-trace"


class MockParseError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class Sentence:
    truth: bool
    neg_witness: Optional[int] = None  # least t witnessing the negation (false sentences)


@dataclass(frozen=True)
class CupProof:
    pi: str
    e: int


@dataclass(frozen=True)
class DisjProof:
    eta: str


@dataclass(frozen=True)
class Nothing:
    pass


NOTHING = Nothing()
ProofEvent = Union[CupProof, DisjProof, Nothing]


class Pi1Oracle:
    """``witnesses_neg(s, t)``: t is large enough to verify that s is false."""

    def __init__(self, sentences: dict):
        self.sentences = dict(sentences)
        self.sentences.setdefault(TRUE_SENTENCE, Sentence(True))

    def witnesses_neg(self, s: str, t: int) -> bool:
        sent = self.sentences[s]
        return not sent.truth and t >= sent.neg_witness

    def is_true(self, s: str) -> bool:
        return self.sentences[s].truth


@dataclass
class MockTheory:
    sentences: dict = field(default_factory=dict)
    stream: dict = field(default_factory=dict)  # p -> ProofEvent
    self_index: Optional[int] = None

    def oracle(self) -> Pi1Oracle:
        return Pi1Oracle(self.sentences)

    def event(self, p: int) -> ProofEvent:
        return self.stream.get(p, NOTHING)

    def merged(self, other: "MockTheory") -> "MockTheory":
        sentences = dict(self.sentences)
        for k, v in other.sentences.items():
            if k in sentences and sentences[k] != v:
                raise MockParseError(0, f"sentence {k} defined twice")
            sentences[k] = v
        clash = set(self.stream) & set(other.stream)
        if clash:
            raise MockParseError(0, f"proof {min(clash)} defined twice")
        return MockTheory(sentences, {**self.stream, **other.stream},
                          other.self_index if other.self_index is not None else self.self_index)

    def to_dict(self) -> dict:
        def ev(e):
            if isinstance(e, CupProof):
                return ["cup", e.pi, e.e]
            return ["disj", e.eta]
        return {
            "sentences": {k: [v.truth, v.neg_witness] for k, v in sorted(self.sentences.items())},
            "stream": {str(p): ev(e) for p, e in sorted(self.stream.items())},
            "self": self.self_index,
        }


def parse_mock(text: str, catalog: Optional[Catalog] = None) -> MockTheory:
    catalog = catalog or Catalog.default()
    sentences: dict = {TRUE_SENTENCE: Sentence(True)}
    raw_stream = []
    self_index = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        kw = words[0]
        if kw == "sentence":
            _add_sentence(sentences, words, lineno)
        elif kw == "proof":
            if len(words) < 4 or not words[1].isdigit() or words[2] not in ("cup", "disj"):
                raise MockParseError(lineno, "expected: proof <p> cup <pi> <e> | proof <p> disj <eta>")
            if (words[2] == "cup" and len(words) != 5) or (words[2] == "disj" and len(words) != 4):
                raise MockParseError(lineno, "wrong number of fields")
            raw_stream.append((lineno, int(words[1]), words[2:]))
        elif kw == "self":
            if len(words) != 2:
                raise MockParseError(lineno, "expected: self <machine>")
            self_index = _machine(words[1], catalog, lineno, None)
        else:
            raise MockParseError(lineno, f"unknown directive {kw!r}")

    stream = {}
    for lineno, p, rest in raw_stream:
        if p in stream:
            raise MockParseError(lineno, f"proof {p} defined twice")
        for sid in rest[1:2]:
            if sid not in sentences:
                raise MockParseError(lineno, f"unknown sentence {sid!r}")
        if rest[0] == "cup":
            stream[p] = CupProof(rest[1], _machine(rest[2], catalog, lineno, self_index))
        else:
            stream[p] = DisjProof(rest[1])
    return MockTheory(sentences, stream, self_index)


def _add_sentence(table: dict, words: list, lineno: int) -> None:
    if len(words) not in (3, 5) or words[2] not in ("true", "false"):
        raise MockParseError(lineno, "expected: sentence <id> true|false [negwitness <t>]")
    sid, truth = words[1], words[2] == "true"
    t = None
    if len(words) == 5:
        if words[3] != "negwitness" or not words[4].isdigit():
            raise MockParseError(lineno, "expected: negwitness <t>")
        t = int(words[4])
    if truth and t is not None:
        raise MockParseError(lineno, f"true sentence {sid} cannot have a negation witness")
    if not truth and t is None:
        raise MockParseError(lineno, f"false sentence {sid} needs a negwitness")
    if sid in table and table[sid] != Sentence(truth, t):
        raise MockParseError(lineno, f"sentence {sid} defined twice")
    table[sid] = Sentence(truth, t)


def _machine(word: str, catalog: Catalog, lineno: int, self_index: Optional[int]) -> int:
    if word == "SELF":
        if self_index is None:
            raise MockParseError(lineno, "SELF used before a self directive")
        return self_index
    try:
        return catalog.resolve(word)
    except (KeyError, ValueError):
        raise MockParseError(lineno, f"unknown machine {word!r}") from None


def load_mock(path, catalog: Optional[Catalog] = None) -> MockTheory:
    with open(path) as fh:
        return parse_mock(fh.read(), catalog)


# --- the helper machine A ----------------------------------------------------

@dataclass(frozen=True)
class AHalted:
    t: int
    via: Optional[tuple] = None  # the (pi, e) pair that fired, None for the eta clause


@dataclass(frozen=True)
class ExceededHorizon:
    horizon: int
    m: Optional[int] = None


def a_machine_run(eta: str, C, s: int, oracle: Pi1Oracle, horizon: int,
                  runner: Optional[Runner] = None):
    """Run A^eta_C on s: t counts up from s and the run halts at the first t
    where t witnesses not-eta, or where some (pi, e) in C has e halting on
    every n <= s within t steps while t does not witness not-pi.  Gives up
    past ``horizon``."""
    runner = runner or Runner()
    C = list(C)
    need = {}  # e -> steps needed to see e halt on all n <= s, None if not within horizon
    for _, e in C:
        if e in need:
            continue
        worst = 0
        for n in range(s + 1):
            r = runner.run(e, n, horizon)
            if not isinstance(r, Halted):
                worst = None
                break
            worst = max(worst, r.steps.to_int())
        need[e] = worst
    for t in range(s, horizon + 1):
        if oracle.witnesses_neg(eta, t):
            return AHalted(t)
        for pi, e in C:
            if need[e] is not None and need[e] <= t and not oracle.witnesses_neg(pi, t):
                return AHalted(t, (pi, e))
    return ExceededHorizon(horizon)


def halting_condition(C, s: int, oracle: Pi1Oracle, horizon: int, runner: Optional[Runner] = None) -> bool:
    """Some (pi, e) in C has pi true and e halting on 0..s within the horizon."""
    runner = runner or Runner()
    for pi, e in C:
        if oracle.is_true(pi) and all(isinstance(runner.run(e, n, horizon), Halted) for n in range(s + 1)):
            return True
    return False


# --- the main loop -------------------------------------------------------------

@dataclass
class PsiTState:
    run_a: bool = False
    C: list = field(default_factory=list)  # (pi, hat index), in insertion order
    p: int = 0
    eta: str = TRUE_SENTENCE


@dataclass
class PsiTResult:
    outcome: Union[str, ExceededHorizon]  # "Halted" or ExceededHorizon
    trace: list
    state: PsiTState
    config: dict

    def trace_jsonl(self) -> str:
        return dumps(self.config, self.trace, TRACE_FORMAT)


def psi_t_run(theory: MockTheory, s: int, horizon: int, runner: Optional[Runner] = None) -> PsiTResult:
    """Main loop over m <= s.  C stores the cumulative hat of each proof's machine."""
    if s < 0 or horizon < 0:
        raise ValueError("negative input or horizon")
    runner = runner or Runner()
    oracle = theory.oracle()
    st = PsiTState()
    events: list = []

    def emit(type_, **kw):
        extra = kw.pop("extra", {})
        events.append(TraceEvent(len(events), type_, extra=extra, **kw))

    config = {"s": s, "horizon": horizon, "cap": runner.cap, "theory": theory.to_dict()}
    for m in range(s + 1):
        if st.run_a and not oracle.witnesses_neg(st.eta, m):
            emit("RunAEnter", m=m, extra={"eta": st.eta, "C": [list(c) for c in st.C]})
            r = a_machine_run(st.eta, st.C, m, oracle, horizon, runner)
            if isinstance(r, ExceededHorizon):
                out = ExceededHorizon(horizon, m)
                emit("ExceededHorizon", m=m, value=None, extra={"horizon": horizon})
                return PsiTResult(out, events, st, config)
            emit("AHalt", m=m, value=r.t, extra={"via": None if r.via is None else list(r.via)})
            emit("RunAExit", m=m)
            continue
        st.run_a = False
        ev = theory.event(st.p)
        if isinstance(ev, CupProof):
            pair = (ev.pi, runner.catalog.hat(ev.e))
            if pair not in st.C:
                st.C.append(pair)
            emit("CAdd", m=m, e=pair[1], extra={"p": st.p, "pi": ev.pi, "machine": ev.e})
        elif isinstance(ev, DisjProof):
            st.eta = ev.eta
            st.run_a = True
            emit("EtaSet", m=m, extra={"p": st.p, "eta": ev.eta})
        st.p += 1
        emit("pAdvance", m=m, extra={"p": st.p})
    emit("Output", m=s, value=0)
    return PsiTResult("Halted", events, st, config)


def prov_join(e1: int, e2: int, catalog: Optional[Catalog] = None) -> int:
    """Machine converging iff both arms converge."""
    return (catalog or Catalog.default()).par_both(e1, e2)


def prov_meet(e1: int, e2: int, catalog: Optional[Catalog] = None) -> int:
    """Machine converging iff either arm converges."""
    return (catalog or Catalog.default()).par_either(e1, e2)
