"""Trace events for the anti-cupping machine, their JSON-lines form, and audits."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..hyperint import HyperInt, parse

FORMAT = "honestdeg-psi-trace"
VERSION = 1

EVENT_TYPES = ("IterStart", "HaltObserved", "RemovalCheck", "Removal", "ElseBranch", "MUpdate", "Output")


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    type: str
    m: Optional[int] = None
    e: Optional[int] = None
    l: Optional[int] = None
    value: Optional[HyperInt] = None
    k: Optional[int] = None
    M: Optional[HyperInt] = None
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def to_record(self) -> dict:
        rec = {
            "seq": self.seq,
            "type": self.type,
            "m": self.m,
            "e": self.e,
            "l": self.l,
            "value": _txt(self.value),
            "k": self.k,
            "M": _txt(self.M),
        }
        for key in sorted(self.extra):
            rec[key] = _plain(self.extra[key])
        return rec


def _txt(v):
    return None if v is None else str(v)


def _plain(v):
    if isinstance(v, HyperInt):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    return v


def dumps(config: dict, events: Iterable[TraceEvent], fmt: str = FORMAT) -> str:
    lines = [json.dumps({"format": fmt, "version": VERSION, "config": config}, sort_keys=True)]
    lines += [json.dumps(ev.to_record()) for ev in events]
    return "\n".join(lines) + "\n"


def loads(text: str, fmt: str = FORMAT):
    """Parse a JSON-lines trace back into (header, list of plain records)."""
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not rows or rows[0].get("format") != fmt:
        raise ValueError("not a psi trace")
    return rows[0], rows[1:]


def _records(events):
    return [ev.to_record() if isinstance(ev, TraceEvent) else ev for ev in events]


def audit_removals(events) -> list:
    """Every Removal(e) in iteration m needs an earlier RemovalCheck(e, .) in m
    with both sides halted, iterate below Gamma, and removed = true."""
    problems = []
    certified = set()
    for rec in _records(events):
        if rec["type"] == "RemovalCheck" and rec.get("removed"):
            g, it = rec.get("gamma"), rec.get("iterate")
            ok = (g and g["status"] == "halted" and it and it["status"] == "halted"
                  and _text_lt(it["value"], g["value"]))
            if ok:
                certified.add((rec["m"], rec["e"]))
            else:
                problems.append(("unsound check", rec["seq"]))
        elif rec["type"] == "Removal" and (rec["m"], rec["e"]) not in certified:
            problems.append(("uncertified removal", rec["seq"]))
    return problems


def audit_no_resurrection(events) -> list:
    problems = []
    removed = set()
    for rec in _records(events):
        t = rec["type"]
        if t == "Removal":
            removed.add(rec["e"])
        elif t in ("HaltObserved", "ElseBranch") and rec["e"] in removed:
            problems.append((t, rec["e"], rec["seq"]))
        elif t == "IterStart" and removed & set(rec.get("C", ())):
            problems.append(("IterStart", sorted(removed & set(rec["C"])), rec["seq"]))
    return problems


def _text_lt(a: str, b: str) -> bool:
    return parse(a) < parse(b)
