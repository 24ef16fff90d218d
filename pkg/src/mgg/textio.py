"""Line-based text formats for graphs, productions, grammars, sequences,
Turing machines and circuits.

Every format ignores blank lines and ``#`` comments.  Graph lines are
``node <id> <label>`` and ``edge <src> <dst>``.  Productions open with
``prod <name>`` followed by ``lhs:`` and ``rhs:`` blocks; nodes with the same
id on both sides are identified unless explicit ``map <lhs-id> <rhs-id>``
lines are given.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .derive import Grammar
from .errors import MGGError, ParseError
from .graph import SimpleDigraph, natural_key
from .machines.circuit import BCSpec, Gate
from .machines.tm import Row, TMSpec
from .production import Production, embed, from_static
from .sequence import CompletedSequence

__all__ = [
    "dump_graph",
    "dump_matrix",
    "load",
    "parse_circuit",
    "parse_grammar",
    "parse_graph",
    "parse_productions",
    "parse_sequence",
    "parse_tm",
]

_TOKEN = re.compile(r"\S+")


@dataclass
class _Line:
    no: int
    tokens: list
    cols: list

    @property
    def head(self) -> str:
        return self.tokens[0]


def _lines(text: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]
        if toks:
            out.append(_Line(no, [t for t, _ in toks], [c for _, c in toks]))
    return out


class _Reader:
    def __init__(self, text: str, path: str):
        self.path = path
        self.lines = _lines(text)

    def fail(self, line: _Line, msg: str, tok: int = 0) -> ParseError:
        col = line.cols[tok] if tok < len(line.cols) else (line.cols[-1] if line.cols else 1)
        return ParseError(self.path, line.no, col, msg)

    def arity(self, line: _Line, n: int, what: str) -> None:
        if len(line.tokens) != n:
            raise self.fail(line, f"{what} expects {n - 1} argument(s), got {len(line.tokens) - 1}", min(n, len(line.tokens) - 1))


class _GraphBuilder:
    def __init__(self, rd: _Reader, start: Optional[_Line] = None):
        self.rd = rd
        self.start = start
        self.nodes: list[tuple[str, str]] = []
        self.ids: dict[str, _Line] = {}
        self.edges: list[tuple[str, str, _Line]] = []

    def feed(self, line: _Line) -> bool:
        if line.head == "node":
            self.rd.arity(line, 3, "node")
            nid = line.tokens[1]
            if nid in self.ids:
                raise self.rd.fail(line, f"duplicate node id {nid!r}", 1)
            self.ids[nid] = line
            self.nodes.append((nid, line.tokens[2]))
            return True
        if line.head == "edge":
            self.rd.arity(line, 3, "edge")
            self.edges.append((line.tokens[1], line.tokens[2], line))
            return True
        return False

    def build(self) -> SimpleDigraph:
        seen = set()
        for s, t, line in self.edges:
            for k, x in ((1, s), (2, t)):
                if x not in self.ids:
                    raise self.rd.fail(line, f"edge refers to unknown node {x!r}", k)
            if (s, t) in seen:
                raise self.rd.fail(line, f"duplicate edge ({s}, {t})", 1)
            seen.add((s, t))
        return SimpleDigraph.build(self.nodes, [(s, t) for s, t, _ in self.edges])


def parse_graph(text: str, path: str = "<graph>") -> SimpleDigraph:
    rd = _Reader(text, path)
    gb = _GraphBuilder(rd)
    for line in rd.lines:
        if not gb.feed(line):
            raise rd.fail(line, f"unexpected keyword {line.head!r}; expected node or edge")
    return gb.build()


class _ProdBuilder:
    def __init__(self, rd: _Reader, line: _Line):
        rd.arity(line, 2, "prod")
        self.rd = rd
        self.line = line
        self.name = line.tokens[1]
        self.lhs = _GraphBuilder(rd, line)
        self.rhs = _GraphBuilder(rd, line)
        self.block: Optional[_GraphBuilder] = None
        self.maps: list[tuple[str, str, _Line]] = []

    def feed(self, line: _Line) -> bool:
        if line.head in ("lhs:", "rhs:"):
            self.rd.arity(line, 1, line.head)
            self.block = self.lhs if line.head == "lhs:" else self.rhs
            return True
        if line.head == "map":
            self.rd.arity(line, 3, "map")
            self.maps.append((line.tokens[1], line.tokens[2], line))
            return True
        if line.head in ("node", "edge"):
            if self.block is None:
                raise self.rd.fail(line, "node/edge before an lhs: or rhs: block")
            return self.block.feed(line)
        return False

    def build(self) -> Production:
        lhs, rhs = self.lhs.build(), self.rhs.build()
        if self.maps:
            f = {}
            for a, b, line in self.maps:
                if a not in self.lhs.ids:
                    raise self.rd.fail(line, f"unknown lhs node {a!r}", 1)
                if b not in self.rhs.ids:
                    raise self.rd.fail(line, f"unknown rhs node {b!r}", 2)
                f[lhs.index_of(a)] = rhs.index_of(b)
        else:
            f = {lhs.index_of(x): rhs.index_of(x) for x in self.lhs.ids if x in self.rhs.ids}
        try:
            return from_static(lhs, rhs, f, self.name)
        except (MGGError, ValueError) as exc:
            raise self.rd.fail(self.line, str(exc), 1) from None


def _split_blocks(rd: _Reader, extra: Iterable[str]):
    """Walk the lines, collecting productions and handing other keywords back."""
    prods: list[Production] = []
    names: dict[str, _Line] = {}
    cur: Optional[_ProdBuilder] = None
    others: list[_Line] = []
    extra = set(extra)
    for line in rd.lines:
        if line.head == "prod":
            if cur is not None:
                prods.append(cur.build())
            cur = _ProdBuilder(rd, line)
            if cur.name in names:
                raise rd.fail(line, f"duplicate production name {cur.name!r}", 1)
            names[cur.name] = line
            continue
        if line.head in extra:
            if cur is not None:
                prods.append(cur.build())
                cur = None
            others.append(line)
            continue
        if cur is not None and cur.feed(line):
            continue
        if others:
            others.append(line)
            continue
        raise rd.fail(line, f"unexpected keyword {line.head!r}")
    if cur is not None:
        prods.append(cur.build())
    return prods, others


def parse_productions(text: str, path: str = "<productions>") -> list[Production]:
    rd = _Reader(text, path)
    prods, _ = _split_blocks(rd, ())
    return prods


def parse_grammar(text: str, path: str = "<grammar>", mode: Optional[str] = None) -> Grammar:
    rd = _Reader(text, path)
    prods, rest = _split_blocks(rd, ("initial:", "mode"))
    gb = _GraphBuilder(rd)
    file_mode = "nodeless"
    in_initial = False
    first = rest[0] if rest else None
    for line in rest:
        if line.head == "mode":
            rd.arity(line, 2, "mode")
            file_mode = line.tokens[1]
            in_initial = False
        elif line.head == "initial:":
            rd.arity(line, 1, "initial:")
            in_initial = True
        elif in_initial and gb.feed(line):
            pass
        else:
            raise rd.fail(line, f"unexpected keyword {line.head!r} in a grammar file")
    try:
        return Grammar(tuple(prods), gb.build(), mode or file_mode)
    except (MGGError, ValueError) as exc:
        anchor = first or (rd.lines[0] if rd.lines else _Line(1, [""], [1]))
        raise rd.fail(anchor, str(exc)) from None


@dataclass
class SequenceFile:
    sequence: CompletedSequence
    universe: SimpleDigraph
    host: Optional[SimpleDigraph]


def parse_sequence(text: str, path: str = "<sequence>") -> SequenceFile:
    """Productions, a ``universe:`` node block, ``step`` lines and an optional ``host:`` block.

    ``step <prod> <prod-id>=<universe-id> ...`` binds every node of the
    production; steps are listed in application order.
    """
    rd = _Reader(text, path)
    prods, rest = _split_blocks(rd, ("universe:", "step", "host:"))
    by_name = {p.name: p for p in prods}
    uni = _GraphBuilder(rd)
    host = None
    block = None
    steps = []
    for line in rest:
        if line.head == "universe:":
            rd.arity(line, 1, "universe:")
            block = uni
        elif line.head == "host:":
            rd.arity(line, 1, "host:")
            host = _GraphBuilder(rd)
            block = host
        elif line.head == "step":
            block = None
            steps.append(line)
        elif block is not None and block.feed(line):
            pass
        else:
            raise rd.fail(line, f"unexpected keyword {line.head!r} in a sequence file")
    universe = uni.build()
    if universe.edges.any():
        raise rd.fail(uni.edges[0][2], "the universe block lists nodes only")
    ids = universe.node_ids
    seq = []
    for line in steps:
        if len(line.tokens) < 2:
            raise rd.fail(line, "step needs a production name")
        p = by_name.get(line.tokens[1])
        if p is None:
            raise rd.fail(line, f"unknown production {line.tokens[1]!r}", 1)
        mapping = {}
        for k, tok in enumerate(line.tokens[2:], 2):
            a, sep, b = tok.partition("=")
            if not sep:
                raise rd.fail(line, f"expected <prod-id>=<universe-id>, got {tok!r}", k)
            if a not in p.node_ids:
                raise rd.fail(line, f"production {p.name} has no node {a!r}", k)
            if b not in ids:
                raise rd.fail(line, f"universe has no node {b!r}", k)
            mapping[p.node_ids.index(a)] = ids.index(b)
        try:
            seq.append(embed(p, mapping, universe.labels, ids))
        except (MGGError, ValueError) as exc:
            raise rd.fail(line, str(exc), 1) from None
    hg = None
    if host is not None:
        h = host.build()
        for nid, _ in host.nodes:
            if nid not in ids:
                raise rd.fail(host.ids[nid], f"host node {nid!r} is not in the universe", 1)
        idx = [ids.index(x) for x in h.node_ids]
        e = np.zeros((universe.n, universe.n), dtype=bool)
        e[np.ix_(idx, idx)] = h.edges
        v = np.zeros(universe.n, dtype=bool)
        v[idx] = True
        for x in h.node_ids:
            if h.labels[h.index_of(x)] != universe.labels[ids.index(x)]:
                raise rd.fail(host.ids[x], f"host node {x!r} changes its universe label", 2)
        hg = SimpleDigraph(e, v, universe.labels, ids)
    cs = CompletedSequence(tuple((p, None) for p in seq), universe.labels, ids)
    return SequenceFile(cs, universe, hg)


def _kv(rd: _Reader, line: _Line, k: int) -> tuple[str, str]:
    key, sep, val = line.tokens[k].partition("=")
    if not sep or not val:
        raise rd.fail(line, f"expected key=value, got {line.tokens[k]!r}", k)
    return key, val


def parse_tm(text: str, path: str = "<tm>") -> TMSpec:
    rd = _Reader(text, path)
    header = None
    opts: dict = {}
    rows = []
    for line in rd.lines:
        if line.head == "tm":
            if header is not None:
                raise rd.fail(line, "second tm header")
            if len(line.tokens) < 2:
                raise rd.fail(line, "tm header needs a name")
            header = line
            for k in range(2, len(line.tokens)):
                key, val = _kv(rd, line, k)
                if key not in ("blank", "start", "fill"):
                    raise rd.fail(line, f"unknown tm option {key!r}", k)
                opts[key] = val
        elif line.head == "row":
            if header is None:
                raise rd.fail(line, "row before the tm header")
            rd.arity(line, 6, "row")
            _, q, a, w, mv, q2 = line.tokens
            if mv.upper() not in ("HL", "HR", "NMOV"):
                raise rd.fail(line, f"head motion must be HL, HR or NMOV, got {mv!r}", 4)
            write = None if w.upper() in ("NOP", "-") else w
            rows.append(Row(q, a, write, mv.upper(), q2))
        else:
            raise rd.fail(line, f"unexpected keyword {line.head!r} in a tm file")
    if header is None:
        raise ParseError(path, 1, 1, "missing tm header")
    for key in ("blank", "start"):
        if key not in opts:
            raise rd.fail(header, f"tm header lacks {key}=")
    try:
        return TMSpec(header.tokens[1], opts["blank"], opts["start"], tuple(rows), opts.get("fill"))
    except ValueError as exc:
        raise rd.fail(header, str(exc)) from None


def parse_circuit(text: str, path: str = "<circuit>") -> BCSpec:
    rd = _Reader(text, path)
    inputs: list[str] = []
    gates = []
    output = None
    anchor = None
    for line in rd.lines:
        anchor = anchor or line
        if line.head == "input":
            if len(line.tokens) < 2:
                raise rd.fail(line, "input needs at least one wire")
            inputs.extend(line.tokens[1:])
        elif line.head == "gate":
            if len(line.tokens) < 4:
                raise rd.fail(line, "gate needs a kind, an output wire and inputs")
            try:
                gates.append(Gate(line.tokens[1], line.tokens[2], tuple(line.tokens[3:])))
            except ValueError as exc:
                raise rd.fail(line, str(exc), 1) from None
        elif line.head == "output":
            rd.arity(line, 2, "output")
            if output is not None:
                raise rd.fail(line, "second output line")
            output = line.tokens[1]
        else:
            raise rd.fail(line, f"unexpected keyword {line.head!r} in a circuit file")
    if output is None:
        raise ParseError(path, len(text.splitlines()) or 1, 1, "missing output line")
    try:
        return BCSpec(tuple(inputs), tuple(gates), output)
    except ValueError as exc:
        raise rd.fail(anchor, str(exc)) from None


def dump_graph(g: SimpleDigraph) -> str:
    nodes, edges = g.canonical()
    lines = [f"node {i} {lbl}" for i, lbl in nodes]
    lines += [f"edge {s} {t}" for s, t in edges]
    return "\n".join(lines) + ("\n" if lines else "")


def dump_matrix(m, ids) -> str:
    """Nonzero entries of a matrix as ``edge`` lines over the given ids."""
    pairs = [(ids[i], ids[k]) for i, k in zip(*np.nonzero(np.asarray(m, dtype=bool)))]
    pairs.sort(key=lambda p: (natural_key(p[0]), natural_key(p[1])))
    return "".join(f"edge {s} {t}\n" for s, t in pairs)


def load(path: str, parser):
    """Read ``path`` and parse it, turning I/O failures into parse errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(path, 0, 0, exc.strerror or str(exc)) from None
    return parser(text, path)
