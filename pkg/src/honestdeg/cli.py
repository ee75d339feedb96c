"""Command-line driver.

    honestdeg psi      run the anti-cupping machine, write its trace
    honestdeg compare  growth curves and a comparator verdict as CSV
    honestdeg ord      norm / enum / iterate / fundseq on ordinal text
    honestdeg prov     the provability main loop (or the helper A) on a mock theory

Exit status: 0 success, 1 runtime failure or failed verdict under --strict,
2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from .cupping import GammaDiverged, PsiCapExceeded, PsiConfig, PsiFn, psi_run
from .growth import Fails, IterateOverflow, NoWitnessUpTo, growth_csv, leq_e_proxy, ll_e_proxy
from .honest import AssociateFn, BuiltinFn, ClosedForm
from .hyperint import HyperInt
from .machine import CapExceeded, Catalog, Runner
from .machine.program import RegisterProgram
from .ordinals import (BudgetExhausted, IterBudget, NotSLim, OrdinalParseError, enum_below_with_norm,
                       format_ord, fund_seq, norm, parse_ord, trans_iterate)
from .provability import ExceededHorizon, MockParseError, MockTheory, a_machine_run, load_mock, psi_t_run

# "DECJZ 1 0": register 1 is never touched, so this loops forever
CONCRETE_PROGRAM = 2 * RegisterProgram.parse("DECJZ 1 0").godel() + 1
SUBJECT_ALIASES = {"concrete-program": CONCRETE_PROGRAM}


class UsageError(Exception):
    pass


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m or int(m.group(1)) > int(m.group(2)):
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    return range(int(m.group(1)), int(m.group(2)) + 1)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _error(kind: str, **fields) -> None:
    print(json.dumps({"error": kind, **fields}), file=sys.stderr)


def _catalog(args) -> Catalog:
    return Catalog.load(args.catalog) if getattr(args, "catalog", None) else Catalog.default()


# --- psi -------------------------------------------------------------------------

def _subjects(raw, catalog: Catalog) -> tuple:
    if not raw:
        return (0,)
    out = []
    for item in raw:
        for word in item.split(","):
            word = word.strip()
            out.append(SUBJECT_ALIASES[word] if word in SUBJECT_ALIASES else catalog.resolve(word))
    return tuple(out)


def cmd_psi(args) -> int:
    catalog = _catalog(args)
    try:
        config = PsiConfig(
            gamma=args.gamma,
            schedule=args.schedule,
            alpha=args.alpha,
            iterate_mode=args.iterate_mode,
            cap=args.cap,
            removal_steps=args.removal_steps,
            initial=_subjects(args.subject, catalog),
            catalog=None if not args.catalog else catalog,
        )
        config.to_dict()  # resolves gamma
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    try:
        res = psi_run(config, args.n)
    except PsiCapExceeded as exc:
        _error("CapExceeded", e=exc.psi_e, m=exc.m, machine=exc.e, input=exc.n, cap=exc.cap)
        return 1
    except CapExceeded as exc:
        _error("CapExceeded", machine=exc.e, input=exc.n, cap=exc.cap)
        return 1
    except GammaDiverged as exc:
        _error("GammaDiverged", l=exc.l)
        return 1
    _emit(res.trace_jsonl(), args.out)
    types = [ev.type for ev in res.trace]
    summary = {
        "n": args.n,
        "M": str(res.M),
        "k": res.state.k,
        "C": res.state.C,
        "ElseBranch": types.count("ElseBranch"),
        "Removal": types.count("Removal"),
        "steps": str(res.state.step_account),
    }
    if args.out not in (None, "-"):
        print(json.dumps(summary))
    return 0


# --- compare -------------------------------------------------------------------------

_ASSOC = re.compile(r"^ASSOC\((.+)\)$")


def _function(name: str, catalog: Catalog, cap):
    if name == "PSI":
        return PsiFn(PsiConfig(cap=cap))
    if name in ("x+1", "SUCC_FN"):
        return ClosedForm("x+1", lambda n: n + 1,
                          symbolic=lambda x: HyperInt.exact(x.top + 1) if x.is_exact else None)
    m = _ASSOC.match(name)
    if m:
        return AssociateFn(catalog.resolve(m.group(1)), Runner(catalog, cap))
    try:
        return BuiltinFn(name, catalog)
    except KeyError:
        raise UsageError(f"unknown function {name!r}") from None


def cmd_compare(args) -> int:
    catalog = _catalog(args)
    fs = args.f or []
    if len(fs) == 2 and args.g is None:
        fs, g_name = fs[:1], fs[1]
    else:
        g_name = args.g
    if len(fs) != 1 or g_name is None:
        raise UsageError("need one --f and one --g (or --f given twice)")
    f = _function(fs[0], catalog, args.cap)
    g = _function(g_name, catalog, args.cap)
    xs = args.range
    if args.mode == "leq":
        verdict = leq_e_proxy(f, g, args.kmax, xs)
    else:
        verdict = ll_e_proxy(f, g, args.kmax, args.mmax, args.tail, xs)
    config = {"f": fs[0], "g": g_name, "mode": args.mode, "kmax": args.kmax, "mmax": args.mmax,
              "tail": args.tail, "range": [xs.start, xs.stop - 1]}
    header = f"# honestdeg-growth-csv v1 {json.dumps(config, sort_keys=True)}\n"
    _emit(header + growth_csv(f, g, args.kmax, xs, verdict), args.out)
    if args.out not in (None, "-"):
        print(str(verdict))
    if args.strict and isinstance(verdict, (NoWitnessUpTo, Fails)):
        return 1
    return 0


# --- ord -----------------------------------------------------------------------------

def cmd_ord(args) -> int:
    try:
        a = parse_ord(args.expr, allow_epsilon=args.op == "fundseq")
    except OrdinalParseError as exc:
        _error("OrdinalParseError", pos=exc.pos, message=str(exc))
        return 2
    if args.op == "norm":
        out = str(norm(a))
    elif args.op == "enum":
        if args.normbound is None:
            raise UsageError("enum needs --normbound")
        out = "[" + ", ".join(format_ord(b) for b in enum_below_with_norm(a, args.normbound)) + "]"
    elif args.op == "fundseq":
        try:
            out = format_ord(fund_seq(a, args.k))
        except NotSLim as exc:
            _error("NotSLim", message=str(exc))
            return 1
    else:
        f = _function(args.f, _catalog(args), None)
        try:
            out = str(trans_iterate(f, a, args.n, IterBudget(args.max_nodes, args.max_bits)))
        except BudgetExhausted as exc:
            _error("BudgetExhausted", nodes=exc.nodes)
            return 1
        except IterateOverflow as exc:
            _error("IterateOverflow", step=exc.step)
            return 1
    if args.out not in (None, "-"):
        config = {"op": args.op, "expr": args.expr, "normbound": args.normbound, "k": args.k, "n": args.n,
                  "f": args.f, "max_nodes": args.max_nodes, "max_bits": args.max_bits}
        out = f"# honestdeg-ord v1 {json.dumps(config, sort_keys=True)}\n" + out
    _emit(out + "\n", args.out)
    return 0


# --- prov ----------------------------------------------------------------------------

def cmd_prov(args) -> int:
    catalog = _catalog(args)
    theory = MockTheory()
    try:
        for path in args.mock:
            theory = theory.merged(load_mock(path, catalog))
    except MockParseError as exc:
        _error("MockParseError", line=exc.line, message=str(exc))
        return 2
    except OSError as exc:
        raise UsageError(str(exc)) from None
    runner = Runner(catalog, args.cap)
    if args.helper:
        pairs = []
        for item in args.pair or []:
            pi, _, e = item.partition(":")
            if pi not in theory.oracle().sentences or not e:
                raise UsageError(f"bad pair {item!r}")
            pairs.append((pi, catalog.resolve(e)))
        if args.eta not in theory.oracle().sentences:
            raise UsageError(f"unknown sentence {args.eta!r}")
        r = a_machine_run(args.eta, pairs, args.s, theory.oracle(), args.horizon, runner)
        rec = {"format": "honestdeg-helper-run", "version": 1,
               "config": {"eta": args.eta, "C": [list(p) for p in pairs], "s": args.s, "horizon": args.horizon},
               "result": type(r).__name__, "t": getattr(r, "t", None)}
        _emit(json.dumps(rec) + "\n", args.out)
        return 1 if args.strict and isinstance(r, ExceededHorizon) else 0
    res = psi_t_run(theory, args.s, args.horizon, runner)
    _emit(res.trace_jsonl(), args.out)
    if args.out not in (None, "-"):
        print(json.dumps({"outcome": "Halted" if res.outcome == "Halted" else "ExceededHorizon",
                          "p": res.state.p, "C": [list(c) for c in res.state.C]}))
    if res.outcome != "Halted" and args.strict:
        return 1
    return 0


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="honestdeg", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--catalog", help="builtin catalog JSON (default: built-in)")
        sp.add_argument("--cap", type=_positive, help="step cap for register programs")
        sp.add_argument("--out", help="output file (default: stdout)")

    ps = sub.add_parser("psi", help="run the anti-cupping machine")
    common(ps)
    ps.add_argument("--n", type=_nonneg, required=True)
    ps.add_argument("--gamma", default="TOWERDIAG")
    ps.add_argument("--schedule", choices=["scaled", "paper", "ordinal"], default="scaled")
    ps.add_argument("--alpha", default="w", help="fundamental-sequence source for ordinal modes")
    ps.add_argument("--iterate-mode", choices=["finite", "ordinal"], default="finite")
    ps.add_argument("--removal-steps", choices=["total", "per-eval"], default="total")
    ps.add_argument("--subject", action="append",
                    help="initial member(s) of C; index, name, FAMILY(args) or concrete-program")
    ps.set_defaults(func=cmd_psi)

    pc = sub.add_parser("compare", help="growth comparison as CSV")
    common(pc)
    pc.add_argument("--f", action="append")
    pc.add_argument("--g")
    pc.add_argument("--mode", choices=["leq", "ll"], default="leq")
    pc.add_argument("--kmax", type=_nonneg, default=6)
    pc.add_argument("--mmax", type=_nonneg, default=6)
    pc.add_argument("--tail", type=_nonneg, default=0)
    pc.add_argument("--range", type=_range, default=range(0, 11), help="LO..HI (default 0..10)")
    pc.add_argument("--strict", action="store_true", help="exit 1 when no witness is found")
    pc.set_defaults(func=cmd_compare)

    po = sub.add_parser("ord", help="ordinal expressions")
    common(po)
    po.add_argument("op", choices=["norm", "enum", "iterate", "fundseq"])
    po.add_argument("expr")
    po.add_argument("--normbound", type=_nonneg)
    po.add_argument("--k", type=_nonneg, default=0)
    po.add_argument("--n", type=_nonneg, default=0)
    po.add_argument("--f", default="x+1", help="base function for iterate (x+1 or a catalog name)")
    po.add_argument("--max-nodes", type=_positive, default=100_000)
    po.add_argument("--max-bits", type=_positive, default=32)
    po.set_defaults(func=cmd_ord)

    pp = sub.add_parser("prov", help="provability main loop on a mock theory")
    common(pp)
    pp.add_argument("--mock", action="append", default=[], help="mock theory / stream file (repeatable)")
    pp.add_argument("--s", type=_nonneg, required=True)
    pp.add_argument("--horizon", type=_nonneg, default=1000)
    pp.add_argument("--helper", action="store_true", help="run the helper machine A instead")
    pp.add_argument("--eta", default="0=0")
    pp.add_argument("--pair", action="append", help="PI:MACHINE member of C for --helper")
    pp.add_argument("--strict", action="store_true", help="exit 1 on ExceededHorizon")
    pp.set_defaults(func=cmd_prov)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        _error("UsageError", message=str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
