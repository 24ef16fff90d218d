"""Turing machines as node-adding grammars.

Host encoding of a configuration:

* one ``Cell`` node per tape cell, chained left to right by edges;
* ``LC`` and ``RC`` nodes pointing at the leftmost and rightmost cell;
* one node per tape symbol (label ``sym:<a>``) with an edge to every cell
  holding that symbol;
* one node per state (label ``state:<q>``); the current state points at
  the head cell;
* marker nodes ``ext:L`` and ``ext:R`` point at the head cell while the
  current state has a row moving left, resp. right.  The tape extension
  rules need that edge, so a machine that can never step off an end (a
  halted one in particular) never grows its tape there.

Each table row becomes one production; ``p_cl`` and ``p_cr`` add a fresh
cell (holding the fill symbol) at the left or right end under the head.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..derive import Grammar, RunResult, Strategy, run
from ..errors import TapeDecodeError
from ..graph import SimpleDigraph
from ..production import Production, from_static

__all__ = ["Row", "TMSpec", "TapeConfig", "compile_tm", "decode_tape", "encode_tape", "row_name", "run_tm"]

MOVES = ("HL", "HR", "NMOV")
EXT_L, EXT_R = "ext:L", "ext:R"


@dataclass(frozen=True)
class Row:
    state: str
    symbol: str
    write: Optional[str]  # None is a no-op
    move: str
    next_state: str

    def __post_init__(self):
        if self.move not in MOVES:
            raise ValueError(f"unknown head motion {self.move!r}")


@dataclass(frozen=True)
class TMSpec:
    name: str
    blank: str
    start: str
    rows: tuple
    fill: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.fill is None:
            object.__setattr__(self, "fill", self.blank)
        names = [row_name(r) for r in self.rows]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"rows collide on names {sorted(dup)}; several rows per key need distinct states")
        for s in self.states:
            if ":" in s or not s:
                raise ValueError(f"bad state name {s!r}")

    @property
    def states(self) -> list[str]:
        seen = [self.start]
        for r in self.rows:
            for q in (r.state, r.next_state):
                if q not in seen:
                    seen.append(q)
        return seen

    @property
    def alphabet(self) -> list[str]:
        seen = [self.blank]
        for a in [self.fill] + [x for r in self.rows for x in (r.symbol, r.write) if x is not None]:
            if a not in seen:
                seen.append(a)
        return seen

    def movers(self, move: str) -> set:
        """States with at least one row of the given head motion."""
        return {r.state for r in self.rows if r.move == move}

    def lookup(self, state: str, symbol: str) -> list[Row]:
        return [r for r in self.rows if r.state == state and r.symbol == symbol]


@dataclass(frozen=True)
class TapeConfig:
    cells: tuple
    head: int
    state: str

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if not self.cells:
            raise ValueError("a tape has at least one cell")
        if not 0 <= self.head < len(self.cells):
            raise ValueError(f"head {self.head} outside a tape of {len(self.cells)} cells")

    @property
    def text(self) -> str:
        return "".join(self.cells)


def row_name(r: Row) -> str:
    """``s1`` reading ``0`` becomes ``p10``; other state names are kept whole."""
    m = re.fullmatch(r"s(\d+)", r.state)
    key = m.group(1) if m else r.state
    return f"p{key}{r.symbol}"


def _sym(a: str) -> str:
    return f"sym:{a}"


def _state(q: str) -> str:
    return f"state:{q}"


def encode_tape(t: TapeConfig, spec: Optional[TMSpec] = None) -> SimpleDigraph:
    """Host graph for a configuration; ``spec`` adds its symbol/state nodes."""
    symbols = list(dict.fromkeys((spec.alphabet if spec else []) + list(t.cells)))
    states = list(dict.fromkeys((spec.states if spec else []) + [t.state]))
    nodes = [(f"c{i}", "Cell") for i in range(len(t.cells))]
    nodes += [("LC", "LC"), ("RC", "RC"), (EXT_L, EXT_L), (EXT_R, EXT_R)]
    nodes += [(_sym(a), _sym(a)) for a in symbols]
    nodes += [(_state(q), _state(q)) for q in states]
    edges = [(f"c{i}", f"c{i + 1}") for i in range(len(t.cells) - 1)]
    edges += [("LC", "c0"), ("RC", f"c{len(t.cells) - 1}")]
    edges += [(_sym(a), f"c{i}") for i, a in enumerate(t.cells)]
    edges.append((_state(t.state), f"c{t.head}"))
    for mark, move in ((EXT_L, "HL"), (EXT_R, "HR")):
        if spec is None or t.state in spec.movers(move):
            edges.append((mark, f"c{t.head}"))
    return SimpleDigraph.build(nodes, edges)


def decode_tape(g: SimpleDigraph) -> TapeConfig:
    """Read a configuration back; cells added by tape extension are included."""
    pres = g.present()
    lab = {i: g.labels[i] for i in pres}
    out = {i: [k for k in pres if g.edges[i, k]] for i in pres}
    cells = {i for i in pres if lab[i] == "Cell"}

    def single(kind: str) -> int:
        found = [i for i in pres if lab[i] == kind]
        if len(found) != 1:
            raise TapeDecodeError(f"expected exactly one {kind} node, found {len(found)}")
        tgt = [k for k in out[found[0]] if k in cells]
        if len(tgt) != 1:
            raise TapeDecodeError(f"{kind} must point at exactly one cell")
        return tgt[0]

    left, right = single("LC"), single("RC")
    order = [left]
    while order[-1] != right:
        nxt = [k for k in out[order[-1]] if k in cells and k != order[-1]]
        if len(nxt) != 1 or nxt[0] in order:
            raise TapeDecodeError(f"broken cell chain at {g.node_ids[order[-1]]}")
        order.append(nxt[0])
    if len(order) != len(cells):
        raise TapeDecodeError("cells outside the chain between LC and RC")
    symbols = []
    for c in order:
        held = [lab[i][4:] for i in pres if lab[i].startswith("sym:") and g.edges[i, c]]
        if len(held) != 1:
            raise TapeDecodeError(f"cell {g.node_ids[c]} holds {len(held)} symbols")
        symbols.append(held[0])
    heads = [(lab[i][6:], c) for i in pres if lab[i].startswith("state:") for c in order if g.edges[i, c]]
    if len(heads) != 1:
        raise TapeDecodeError(f"expected one head, found {len(heads)}")
    state, cell = heads[0]
    return TapeConfig(tuple(symbols), order.index(cell), state)


def _row_production(r: Row, left: set, right: set) -> Production:
    lnodes = [("c", "Cell"), ("q", _state(r.state)), ("a", _sym(r.symbol))]
    ledges = [("q", "c"), ("a", "c")]
    target = "c"
    if r.move == "HL":
        lnodes.append(("d", "Cell"))
        ledges.append(("d", "c"))
        target = "d"
    elif r.move == "HR":
        lnodes.append(("d", "Cell"))
        ledges.append(("c", "d"))
        target = "d"
    new_state = "q"
    if r.next_state != r.state:
        lnodes.append(("q2", _state(r.next_state)))
        new_state = "q2"
    written = "a"
    if r.write is not None and r.write != r.symbol:
        lnodes.append(("w", _sym(r.write)))
        written = "w"
    redges = [x for x in ledges if x not in (("q", "c"), ("a", "c"))]
    redges += [(new_state, target), (written, "c")]
    # the extension markers follow the head when the next state may need them
    for x, movers in (("xl", left), ("xr", right)):
        if r.state in movers or r.next_state in movers:
            lnodes.append((x, EXT_L if x == "xl" else EXT_R))
        if r.state in movers:
            ledges.append((x, "c"))
        if r.next_state in movers:
            redges.append((x, target))
    lhs = SimpleDigraph.build(lnodes, ledges)
    rhs = SimpleDigraph.build(lnodes, redges)
    return from_static(lhs, rhs, {i: i for i in range(lhs.n)}, row_name(r))


def _extension(side: str, fill: str) -> Production:
    mark, ext = ("LC", EXT_L) if side == "l" else ("RC", EXT_R)
    lnodes = [("m", mark), ("x", ext), ("c", "Cell"), ("f", _sym(fill))]
    lhs = SimpleDigraph.build(lnodes, [("m", "c"), ("x", "c")])
    chain = ("n", "c") if side == "l" else ("c", "n")
    rhs = SimpleDigraph.build(lnodes + [("n", "Cell")], [("m", "n"), ("x", "c"), chain, ("f", "n")])
    return from_static(lhs, rhs, {0: 0, 1: 1, 2: 2, 3: 3}, f"p_c{side}")


def compile_tm(spec: TMSpec, tape: Optional[TapeConfig] = None) -> Grammar:
    """One production per row plus ``p_cl``/``p_cr``; node-adding mode."""
    states = set(spec.states)
    for r in spec.rows:
        if r.state not in states or r.next_state not in states:
            raise ValueError(f"row {row_name(r)} refers to an unknown state")
    left, right = spec.movers("HL"), spec.movers("HR")
    prods = [_row_production(r, left, right) for r in spec.rows]
    prods += [_extension("l", spec.fill), _extension("r", spec.fill)]
    t0 = tape if tape is not None else TapeConfig((spec.blank,), 0, spec.start)
    return Grammar(tuple(prods), encode_tape(t0, spec), mode="node-adding")


def default_strategy(spec: TMSpec) -> Strategy:
    """Table rows first, then left and right extension."""
    return Strategy("priority", "first", 0, tuple(row_name(r) for r in spec.rows) + ("p_cl", "p_cr"))


def run_tm(
    spec: TMSpec,
    t0: TapeConfig,
    strategy: Optional[Strategy] = None,
    max_steps: int = 10_000,
    on_step=None,
) -> tuple[TapeConfig, RunResult]:
    gr = compile_tm(spec, t0)
    res = run(gr, strategy or default_strategy(spec), max_steps, on_step)
    return decode_tape(res.final), res
