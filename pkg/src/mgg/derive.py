"""Matching, direct derivations and the grammar run loop.

The matcher backtracks over LHS nodes with host adjacency kept as Python
int bitsets (bit ``j`` of ``out[i]`` set when the host has edge ``i -> j``).
Candidates for the next LHS node are narrowed by label, by the LHS edges to
already placed nodes and by the nihilation edges that must be missing.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, DanglingEdgeError, IllFormedProductionError
from .graph import SimpleDigraph, check_morphism, is_compatible, natural_key
from .production import Production

__all__ = [
    "Application",
    "FreshIds",
    "Grammar",
    "HostIndex",
    "Match",
    "RunResult",
    "Strategy",
    "TraceEntry",
    "derive",
    "derive_full",
    "enumerate_matches",
    "format_trace",
    "is_valid_match",
    "run",
    "step",
]

MODES = ("nodeless", "node-adding", "full")
ELECTIONS = ("first", "all", "random", "priority")
ALLOCATIONS = ("first", "all", "random")


@dataclass(frozen=True)
class Match:
    """Injective map from LHS node indices to host node indices."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def node_map(self) -> dict[int, int]:
        return dict(self.pairs)

    def describe(self, p: Production, g: SimpleDigraph) -> list[tuple[str, str]]:
        return [(p.node_ids[i], g.node_ids[j]) for i, j in self.pairs]


def _bits(rows: np.ndarray) -> list[int]:
    if rows.shape[1] == 0:
        return [0] * rows.shape[0]
    packed = np.packbits(rows, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


class HostIndex:
    """Bitset view of a host graph, shared by every production in a step."""

    def __init__(self, g: SimpleDigraph):
        self.graph = g
        e = g.edges
        self.out = _bits(e)
        self.inn = _bits(np.ascontiguousarray(e.T))
        diag = np.diagonal(e)
        self.loops = _bits(diag[None, :])[0] if g.n else 0
        self._keys = None
        self.labels: dict = {}
        for i in g.present():
            self.labels[g.labels[i]] = self.labels.get(g.labels[i], 0) | (1 << i)

    def key(self, j: int):
        if self._keys is None:
            self._keys = [natural_key(x) for x in self.graph.node_ids]
        return self._keys[j]


class _Plan:
    """Per-production data the matcher needs; cached on the production."""

    def __init__(self, p: Production):
        self.nodes = [int(i) for i in np.flatnonzero(p.lhs.nodes)]
        L, K = p.L, p.K
        self.loop = {i: bool(L[i, i]) for i in self.nodes}
        self.kloop = {i: bool(K[i, i]) for i in self.nodes}
        self.adj = {i: [k for k in self.nodes if k != i and (L[i, k] or L[k, i])] for i in self.nodes}
        self.L = L
        self.K = K
        self.checks: dict = {}
        self.orders: dict = {}


def _plan(p: Production) -> _Plan:
    plan = p.__dict__.get("_plan")
    if plan is None:
        plan = _Plan(p)
        object.__setattr__(p, "_plan", plan)
    return plan


def _order(plan: _Plan, size: dict) -> tuple[int, ...]:
    """Rarest candidate set first, then grow along LHS edges."""
    links = dict.fromkeys(plan.nodes, 0)
    left = list(plan.nodes)
    order = []
    while left:
        nxt = min(left, key=lambda i: (-links[i], size[i], -len(plan.adj[i]), i))
        order.append(nxt)
        left.remove(nxt)
        for k in plan.adj[nxt]:
            links[k] += 1
    return tuple(order)


def _checks(plan: _Plan, order: tuple) -> list:
    L, K = plan.L, plan.K
    checks = []
    for d, i in enumerate(order):
        c = [(k, bool(L[i, k]), bool(L[k, i]), bool(K[i, k]), bool(K[k, i])) for k in order[:d]]
        checks.append([t for t in c if any(t[1:])])
    return checks


def _search(p: Production, hx: HostIndex, limit: Optional[int] = None) -> list[tuple[int, ...]]:
    plan = _plan(p)
    nodes = plan.nodes
    if not nodes:
        return [()]
    cand = {}
    for i in nodes:
        c = hx.labels.get(p.labels[i], 0)
        if plan.loop[i]:
            c &= hx.loops
        if plan.kloop[i]:
            c &= ~hx.loops
        if not c:
            return []
        cand[i] = c

    sizes = tuple(cand[i].bit_count() for i in nodes)
    cached = plan.orders.get(sizes)
    if cached is None:
        order = _order(plan, dict(zip(nodes, sizes)))
        checks = plan.checks.get(order)
        if checks is None:
            checks = plan.checks[order] = _checks(plan, order)
        cached = plan.orders[sizes] = (order, checks)
    order, checks = cached

    out, inn = hx.out, hx.inn
    assign: dict[int, int] = {}
    found: list[tuple[int, ...]] = []
    depth_max = len(order)

    def rec(d: int, used: int) -> bool:
        if d == depth_max:
            found.append(tuple(assign[i] for i in nodes))
            return limit is not None and len(found) >= limit
        i = order[d]
        c = cand[i] & ~used
        for k, lo, li, ko, ki in checks[d]:
            hk = assign[k]
            if lo:
                c &= inn[hk]
            if li:
                c &= out[hk]
            if ko:
                c &= ~inn[hk]
            if ki:
                c &= ~out[hk]
            if not c:
                return False
        while c:
            low = c & -c
            c ^= low
            assign[i] = low.bit_length() - 1
            if rec(d + 1, used | low):
                return True
        return False

    rec(0, 0)
    return found


def _sorted_matches(p: Production, hx: HostIndex, raw) -> list[Match]:
    nodes = _plan(p).nodes
    if len(raw) > 1:
        raw = sorted(raw, key=lambda hs: tuple(hx.key(j) for j in hs))
    return [Match(tuple(zip(nodes, hs))) for hs in raw]


def enumerate_matches(p: Production, g: SimpleDigraph, index: Optional[HostIndex] = None) -> list[Match]:
    """All matches of ``p`` in ``g``, ordered by the ids of the mapped host nodes.

    A match is injective and label preserving, sends LHS edges to host
    edges, and sends nihilation edges between LHS nodes to host non-edges.
    """
    hx = index if index is not None else HostIndex(g)
    return _sorted_matches(p, hx, _search(p, hx))


def has_match(p: Production, g: SimpleDigraph, index: Optional[HostIndex] = None) -> bool:
    hx = index if index is not None else HostIndex(g)
    return bool(_search(p, hx, limit=1))


def is_valid_match(p: Production, m: Match, g: SimpleDigraph) -> bool:
    """Re-check a match against the definition (morphism plus K-absence)."""
    f = m.node_map
    if sorted(f) != _plan(p).nodes:
        return False
    if not check_morphism(f, p.lhs, g):
        return False
    for i in f:
        for k in f:
            if p.K[i, k] and g.edges[f[i], f[k]]:
                return False
    return True


class FreshIds:
    """Monotone id source for nodes created during a run."""

    def __init__(self, prefix: str = "v", start: int = 1):
        self.prefix = prefix
        self.counter = start

    def take(self, taken) -> str:
        while True:
            nid = f"{self.prefix}{self.counter}"
            self.counter += 1
            if nid not in taken:
                return nid


def derive_full(
    p: Production, m: Match, g: SimpleDigraph, fresh: Optional[FreshIds] = None
) -> tuple[SimpleDigraph, dict[int, str]]:
    """``H = r* or (not e*) G`` plus the ids given to the nodes ``p`` adds."""
    pos = m.node_map
    new = [int(i) for i in np.flatnonzero(p.add_nodes)]
    fresh = fresh if fresh is not None else FreshIds()
    taken = set(g.node_ids)
    alloc: dict[int, str] = {}
    for k, i in enumerate(new):
        pos[i] = g.n + k
        alloc[i] = fresh.take(taken)
        taken.add(alloc[i])
    idx_p = sorted(pos)
    idx_h = [pos[i] for i in idx_p]
    inside = np.zeros(p.n, dtype=bool)
    inside[idx_p] = True
    touched = p.e | p.r
    if touched[~inside, :].any() or touched[:, ~inside].any():
        raise IllFormedProductionError(f"{p.name}: rewrites nodes that are neither matched nor created")

    n = g.n + len(new)
    sub = np.ix_(idx_h, idx_h)
    psub = np.ix_(idx_p, idx_p)
    e = np.zeros((n, n), dtype=bool)
    r = np.zeros((n, n), dtype=bool)
    e[sub] = p.e[psub]
    r[sub] = p.r[psub]
    ev = np.zeros(n, dtype=bool)
    rv = np.zeros(n, dtype=bool)
    ev[idx_h] = p.erase_nodes[idx_p]
    rv[idx_h] = p.add_nodes[idx_p]
    ge = np.zeros((n, n), dtype=bool)
    ge[: g.n, : g.n] = g.edges
    gv = np.zeros(n, dtype=bool)
    gv[: g.n] = g.nodes

    labels = g.labels + tuple(p.labels[i] for i in new)
    ids = g.node_ids + tuple(alloc[i] for i in new)
    h = SimpleDigraph(r | (~e & ge), rv | (~ev & gv), labels, ids)
    if not is_compatible(h):
        raise DanglingEdgeError(f"{p.name}: applying the match leaves dangling edges")
    return h.compact(), alloc


def derive(p: Production, m: Match, g: SimpleDigraph, fresh: Optional[FreshIds] = None) -> SimpleDigraph:
    return derive_full(p, m, g, fresh)[0]


@dataclass(frozen=True)
class Grammar:
    productions: tuple
    initial: SimpleDigraph
    mode: str = "nodeless"
    label_set: Optional[frozenset] = None

    def __post_init__(self):
        prods = tuple(self.productions)
        object.__setattr__(self, "productions", prods)
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        names = [p.name for p in prods]
        if len(set(names)) != len(names):
            raise ValueError("production names must be unique")
        for p in prods:
            if self.mode == "nodeless" and not p.is_nodeless():
                raise IllFormedProductionError(f"{p.name}: adds or deletes nodes in a nodeless grammar")
            if self.mode == "node-adding" and p.erase_nodes.any():
                raise IllFormedProductionError(f"{p.name}: deletes nodes in a node-adding grammar")
        used = {self.initial.labels[i] for i in self.initial.present()}
        for p in prods:
            used.update(p.labels[i] for i in range(p.n) if p.lhs.nodes[i] or p.add_nodes[i])
        if self.label_set is None:
            object.__setattr__(self, "label_set", frozenset(used))
        elif not used <= set(self.label_set):
            raise ValueError(f"labels outside the label set: {sorted(used - set(self.label_set))}")

    def production(self, name: str) -> Production:
        for p in self.productions:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class Strategy:
    election: str = "first"
    allocation: str = "first"
    seed: int = 0
    priority: tuple = ()

    def __post_init__(self):
        if self.election not in ELECTIONS:
            raise ValueError(f"unknown election {self.election!r}")
        if self.allocation not in ALLOCATIONS:
            raise ValueError(f"unknown allocation {self.allocation!r}")
        object.__setattr__(self, "priority", tuple(self.priority))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class Application(NamedTuple):
    production: str
    match: Match
    graph: SimpleDigraph
    fresh: dict


@dataclass(frozen=True)
class TraceEntry:
    step: int
    production: str
    pairs: tuple

    def line(self) -> str:
        return f"{self.step} {self.production} " + " ".join(f"{a}:{b}" for a, b in self.pairs)


@dataclass
class RunResult:
    final: SimpleDigraph
    trace: list = field(default_factory=list)
    halted: bool = True

    @property
    def names(self) -> list[str]:
        return [t.production for t in self.trace]


def format_trace(trace: Sequence[TraceEntry]) -> str:
    return "\n".join(t.line().rstrip() for t in trace)


def _ordered(gr: Grammar, st: Strategy) -> list[Production]:
    if st.election != "priority":
        return list(gr.productions)
    missing = [n for n in st.priority if n not in {p.name for p in gr.productions}]
    if missing:
        raise ValueError(f"priority list names unknown productions: {missing}")
    first = [gr.production(n) for n in st.priority]
    return first + [p for p in gr.productions if p.name not in st.priority]


def step(
    gr: Grammar,
    g: SimpleDigraph,
    st: Strategy,
    rng: Optional[np.random.Generator] = None,
    fresh: Optional[FreshIds] = None,
) -> list[Application]:
    """One transition: the elected production(s) applied at the allocated match(es)."""
    rng = rng if rng is not None else st.rng()
    fresh = fresh if fresh is not None else FreshIds()
    hx = HostIndex(g)
    chosen: list[tuple[Production, list[Match]]] = []
    if st.election in ("first", "priority"):
        for p in _ordered(gr, st):
            ms = enumerate_matches(p, g, hx)
            if ms:
                chosen.append((p, ms))
                break
    else:
        if st.election == "all":
            chosen = [(p, ms) for p in gr.productions for ms in [enumerate_matches(p, g, hx)] if ms]
        else:
            live = [p for p in gr.productions if has_match(p, g, hx)]
            if live:
                p = live[int(rng.integers(len(live)))]
                chosen = [(p, enumerate_matches(p, g, hx))]

    picks = []
    for p, ms in chosen:
        if st.allocation == "first":
            picks.append((p, ms[0]))
        elif st.allocation == "random":
            picks.append((p, ms[int(rng.integers(len(ms)))]))
        else:
            picks.extend((p, m) for m in ms)

    out = []
    many = len(picks) > 1
    for p, m in picks:
        src = copy.copy(fresh) if many else fresh
        h, alloc = derive_full(p, m, g, src)
        out.append(Application(p.name, m, h, {p.node_ids[i]: v for i, v in alloc.items()}))
    return out


def run(
    gr: Grammar,
    st: Strategy,
    max_steps: int,
    on_step: Optional[Callable[[int, Application], None]] = None,
) -> RunResult:
    """Iterate transitions from the initial graph until halt or the step budget.

    Raises ``BudgetExceeded`` (carrying the partial ``RunResult``) when the
    budget is spent while a production is still applicable.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    if "all" in (st.election, st.allocation):
        raise ValueError("a run follows a single path; 'all' strategies only make sense for step")
    rng = st.rng()
    fresh = FreshIds()
    res = RunResult(gr.initial)
    for k in range(1, max_steps + 1):
        apps = step(gr, res.final, st, rng, fresh)
        if not apps:
            return res
        a = apps[0]
        p = gr.production(a.production)
        pairs = tuple(a.match.describe(p, res.final)) + tuple(a.fresh.items())
        res.trace.append(TraceEntry(k, a.production, pairs))
        res.final = a.graph
        if on_step is not None:
            on_step(k, a)
    hx = HostIndex(res.final)
    if any(has_match(p, res.final, hx) for p in gr.productions):
        res.halted = False
        raise BudgetExceeded(f"step budget of {max_steps} exhausted before halting", res)
    return res
