"""Command line front end: ``mgg apply|run|analyze|tm|bc|count``.

Exit codes: 0 success, 1 usage, 2 parse or invalid input, 3 negative
analysis outcome (no match, incoherent sequence, dangling edge, stuck
circuit), 4 budget exhausted.  Output is assembled in full before anything
is written, so a failing command prints only its diagnostic.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import textio
from .derive import Grammar, Strategy, derive, enumerate_matches, run
from .errors import (
    BudgetExceeded,
    ConditionViolated,
    DanglingEdgeError,
    IncoherentSequenceError,
    MGGError,
    ParseError,
    StuckCircuitError,
)
from .machines.circuit import eval_bc
from .machines.tm import TapeConfig, default_strategy, run_tm
from .production import count_elements
from .sequence import (
    classify_determinism,
    coherence_bool,
    coherence_gf2,
    compatibility_w,
    initial_digraph,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NEGATIVE, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class NegativeResult(Exception):
    """Analysis answered "no"; the message is the diagnostic."""

    def __init__(self, message: str, output: str = ""):
        super().__init__(message)
        self.output = output


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_strategy(text: str, seed: int) -> Strategy:
    """``first``, ``random``, ``priority:p1,p2`` or ``<election>/<allocation>``."""
    prio: tuple = ()
    if text.startswith("priority:"):
        prio = tuple(x for x in text.split(":", 1)[1].split(",") if x)
        return Strategy("priority", "first", seed, prio)
    election, _, allocation = text.partition("/")
    if not allocation:
        allocation = "first" if election == "priority" else election
    try:
        return Strategy(election, allocation, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _grammar_mode(gr: Grammar, mode: Optional[str]) -> Grammar:
    if mode is None or mode == gr.mode:
        return gr
    return Grammar(gr.productions, gr.initial, mode, gr.label_set)


def cmd_apply(args) -> str:
    prods = textio.load(args.production, textio.parse_productions)
    if len(prods) != 1 and args.name is None:
        raise UsageError("the production file holds several productions; pick one with --name")
    if args.name is not None:
        prods = [p for p in prods if p.name == args.name]
        if not prods:
            raise UsageError(f"no production named {args.name!r}")
    p = prods[0]
    g = textio.load(args.graph, textio.parse_graph)
    if args.mode is not None:
        Grammar((p,), g, args.mode)
    ms = enumerate_matches(p, g)
    if not ms:
        raise NegativeResult(f"{p.name}: no match in {args.graph}")
    if args.list:
        return "".join(
            f"{k} " + " ".join(f"{a}:{b}" for a, b in m.describe(p, g)) + "\n" for k, m in enumerate(ms)
        )
    if not 0 <= args.match < len(ms):
        raise UsageError(f"match index {args.match} out of range (0..{len(ms) - 1})")
    return textio.dump_graph(derive(p, ms[args.match], g))


def cmd_run(args) -> str:
    gr = _grammar_mode(textio.load(args.grammar, textio.parse_grammar), args.mode)
    st = parse_strategy(args.strategy, args.seed)
    if "all" in (st.election, st.allocation):
        raise UsageError("run follows one path; use first, random or priority")
    try:
        res = run(gr, st, args.max_steps)
    except BudgetExceeded as exc:
        partial = exc.result
        raise BudgetExceeded(
            f"{exc} ({len(partial.trace)} steps applied)", partial
        ) from None
    out = ""
    if args.trace:
        out += "".join(f"# {t.line().rstrip()}\n" for t in res.trace)
    return out + textio.dump_graph(res.final)


def _section(title: str, body: str) -> str:
    return f"[{title}]\n" + (body or "(zero)\n")


def cmd_analyze(args) -> str:
    sf = textio.load(args.sequence, textio.parse_sequence)
    s = sf.sequence
    ids = s.node_ids
    cp, cm = coherence_bool(s)
    cg = coherence_gf2(s)
    parts = [f"steps={len(s)} nodes={s.n}\n"]
    parts.append(_section("C~+", textio.dump_matrix(cp, ids)))
    parts.append(_section("C~-", textio.dump_matrix(cm, ids)))
    parts.append(_section("C.real", textio.dump_matrix(cg.real, ids)))
    parts.append(_section("C.imag", textio.dump_matrix(cg.imag, ids)))
    coherent = not (cp.any() or cm.any())
    if coherent:
        m = initial_digraph(s)
        parts.append(_section("M_C", textio.dump_matrix(m.real, ids)))
        parts.append(_section("M_N", textio.dump_matrix(m.imag, ids)))
        parts.append(_section("W", textio.dump_matrix(compatibility_w(s), ids)))
    else:
        parts.append("[M]\nnot computed: the sequence is incoherent\n")
        parts.append("[W]\nnot computed: the sequence is incoherent\n")
    verdict = classify_determinism(s, sf.host, args.budget)
    parts.append(f"verdict={verdict.verdict} witnesses={verdict.count}\n")
    report = "".join(parts)
    if not coherent:
        raise NegativeResult("sequence is incoherent", report)
    return report


def cmd_tm(args) -> str:
    spec = textio.load(args.machine, textio.parse_tm)
    tape = tuple(args.tape) if args.tape else (spec.blank,)
    try:
        t0 = TapeConfig(tape, args.head, args.state or spec.start)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    st = default_strategy(spec) if args.strategy is None else parse_strategy(args.strategy, args.seed)
    final, res = run_tm(spec, t0, st, args.max_steps)
    out = f"{final.text}\nhead={final.head} state={final.state}\n"
    return out + "".join(t.production + "\n" for t in res.trace)


def cmd_bc(args) -> str:
    spec = textio.load(args.circuit, textio.parse_circuit)
    assignment = {}
    for tok in args.assignment:
        w, sep, v = tok.partition("=")
        if not sep or v not in ("0", "1"):
            raise UsageError(f"expected <wire>=0|1, got {tok!r}")
        assignment[w] = int(v)
    unknown = sorted(set(assignment) - set(spec.inputs))
    missing = [w for w in spec.inputs if w not in assignment]
    if unknown or missing:
        raise UsageError(f"inputs unknown: {unknown}, missing: {missing}")
    st = parse_strategy(args.strategy or "random", args.seed)
    return f"{eval_bc(spec, assignment, st, args.max_steps)}\n"


def cmd_count(args) -> str:
    if args.n < 0:
        raise UsageError("n must be non-negative")
    return f"{count_elements(args.kind, args.n)}\n"


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mgg", description="Matrix graph grammar toolkit")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, strategy_default):
        p.add_argument("--seed", type=int, default=0, help="seed for random strategies (default 0)")
        p.add_argument("--max-steps", type=int, default=10_000)
        p.add_argument("--strategy", default=strategy_default)
        p.add_argument("--mode", choices=("nodeless", "node-adding", "full"))
        p.add_argument("--out", help="write the result here instead of standard output")

    p = sub.add_parser("apply", help="match a production in a graph and apply it")
    p.add_argument("production")
    p.add_argument("graph")
    p.add_argument("--name", help="production to use when the file holds several")
    p.add_argument("--match", type=int, default=0, help="index of the match to apply (default 0)")
    p.add_argument("--list", action="store_true", help="list the matches instead of applying one")
    common(p, "first")
    p.set_defaults(fn=cmd_apply)

    p = sub.add_parser("run", help="run a grammar from its initial graph")
    p.add_argument("grammar")
    p.add_argument("--trace", action="store_true", help="prefix the output with the trace as comments")
    common(p, "first")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("analyze", help="coherence, initial digraph, compatibility and determinism")
    p.add_argument("sequence")
    p.add_argument("--budget", type=int, default=10**6)
    common(p, "first")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("tm", help="run a Turing machine state table")
    p.add_argument("machine")
    p.add_argument("tape", nargs="?", default="")
    p.add_argument("--head", type=int, default=0)
    p.add_argument("--state")
    common(p, None)
    p.set_defaults(fn=cmd_tm)

    p = sub.add_parser("bc", help="evaluate a Boolean circuit")
    p.add_argument("circuit")
    p.add_argument("assignment", nargs="*", help="<wire>=0|1 for every input")
    common(p, None)
    p.set_defaults(fn=cmd_bc)

    p = sub.add_parser("count", help="number of swaps or productions on n nodes")
    p.add_argument("kind", choices=("swaps", "productions"))
    p.add_argument("n", type=int)
    common(p, "first")
    p.set_defaults(fn=cmd_count)
    return ap


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.max_steps < 0:
            raise UsageError("--max-steps must be non-negative")
        text = args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NegativeResult as exc:
        if exc.output:
            _emit(exc.output, getattr(args, "out", None))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (DanglingEdgeError, IncoherentSequenceError, ConditionViolated, StuckCircuitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MGGError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
