"""Generators and independent reference implementations used by the tests."""

from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from mgg.boolalg import Permutation
from mgg.graph import SimpleDigraph, natural_key
from mgg.machines.circuit import BCSpec, Gate
from mgg.machines.tm import Row, TapeConfig, TMSpec
from mgg.production import Production

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# per-edge actions of a nodeless production
NONE, KEEP, DEL, ADD = 0, 1, 2, 3


def ids(n: int) -> tuple:
    return tuple(str(i + 1) for i in range(n))


def graph(edges, labels, nodes=None) -> SimpleDigraph:
    n = len(labels)
    v = np.ones(n, dtype=bool) if nodes is None else np.asarray(nodes, dtype=bool)
    return SimpleDigraph(np.asarray(edges, dtype=bool).reshape(n, n), v, tuple(labels), ids(n))


def from_actions(actions, labels, name: str = "p") -> Production:
    """Nodeless production from a per-edge action matrix."""
    a = np.asarray(actions)
    n = len(labels)
    lhs = graph((a == KEEP) | (a == DEL), labels)
    z = np.zeros(n, dtype=bool)
    return Production(name, lhs, a == DEL, z, a == ADD, z)


def random_nodeless(rng, labels, name: str = "p") -> Production:
    n = len(labels)
    return from_actions(rng.integers(0, 4, (n, n)), labels, name)


def random_production(rng, labels, name: str = "p", p_node: float = 0.3) -> Production:
    """Production that may also delete nodes (with their LHS edges) and add nodes."""
    n = len(labels)
    role = rng.choice(3, size=n, p=[1 - p_node, p_node / 2, p_node / 2])  # 0 keep, 1 delete, 2 add
    lv = role != 2
    a = rng.integers(0, 4, (n, n))
    both_l = np.outer(lv, lv)
    dead = np.outer(role == 1, np.ones(n, bool)) | np.outer(np.ones(n, bool), role == 1)
    in_r = np.outer(role != 1, role != 1)
    L = both_l & ((a == KEEP) | (a == DEL))
    e = L & ((a == DEL) | dead)
    r = ~L & in_r & (a == ADD)
    lhs = SimpleDigraph(L, lv, tuple(labels), ids(n))
    return Production(name, lhs, e, role == 1, r, role == 2)


def random_graph(rng, labels, density: float = 0.4) -> SimpleDigraph:
    n = len(labels)
    return graph(rng.random((n, n)) < density, labels)


def random_label_perm(rng, labels) -> Permutation:
    n = len(labels)
    m = list(range(n))
    groups: dict = {}
    for i, lbl in enumerate(labels):
        groups.setdefault(lbl, []).append(i)
    for cls in groups.values():
        img = list(rng.permutation(cls))
        for i, j in zip(cls, img):
            m[i] = int(j)
    return Permutation(m)


def coherent_history(rng, n: int, m: int):
    """Per-edge valid histories: an initial host and m action matrices.

    Each edge starts present or absent and every step picks an action that
    is legal in the current state, so the sequence applies to that host.
    """
    state = rng.random((n, n)) < 0.5
    host = state.copy()
    steps = []
    for _ in range(m):
        act = np.zeros((n, n), dtype=int)
        roll = rng.random((n, n))
        act[state & (roll < 0.35)] = KEEP
        act[state & (roll >= 0.35) & (roll < 0.7)] = DEL
        act[~state & (roll < 0.5)] = ADD
        steps.append(act)
        state = (state & (act != DEL)) | (act == ADD)
    return host, steps


# ---------------------------------------------------------------- matching
def brute_force_matches(p: Production, g: SimpleDigraph) -> list[tuple[int, ...]]:
    """Every injective map LHS -> host checked against the definition directly."""
    lhs_nodes = [i for i in range(p.n) if p.lhs.nodes[i]]
    host_nodes = [j for j in range(g.n) if g.nodes[j]]
    out = []
    for img in itertools.permutations(host_nodes, len(lhs_nodes)):
        f = dict(zip(lhs_nodes, img))
        if any(p.labels[i] != g.labels[f[i]] for i in lhs_nodes):
            continue
        ok = True
        for i in lhs_nodes:
            for k in lhs_nodes:
                if p.L[i, k] and not g.edges[f[i], f[k]]:
                    ok = False
                if p.K[i, k] and g.edges[f[i], f[k]]:
                    ok = False
        if ok:
            out.append(img)
    out.sort(key=lambda t: tuple(natural_key(g.node_ids[j]) for j in t))
    return out


# ---------------------------------------------------------------- turing machines
COPY_ROWS = [
    ("s1", "0", None, "NMOV", "H"),
    ("s1", "1", "0", "HL", "s2"),
    ("s2", "0", "0", "HL", "s3"),
    ("s2", "1", "1", "HL", "s2"),
    ("s3", "0", "1", "HR", "s4"),
    ("s3", "1", "1", "HL", "s3"),
    ("s4", "0", "0", "HR", "s5"),
    ("s4", "1", "1", "HR", "s4"),
    ("s5", "0", "1", "HL", "s1"),
    ("s5", "1", "1", "HR", "s5"),
]

COPY_TRACE = "p11 p21 p_cl p20 p30 p40 p51 p50 p11 p20 p_cl p31 p30 p41 p40 p50 p10".split()


def copy_machine() -> TMSpec:
    return TMSpec("copy", "0", "s1", tuple(Row(*r) for r in COPY_ROWS))


def tm_interpret(spec: TMSpec, t0: TapeConfig, max_steps: int):
    """Plain list-based simulator; yields the configuration after every move."""
    cells, head, state = list(t0.cells), t0.head, t0.state
    table = {(r.state, r.symbol): r for r in spec.rows}
    for _ in range(max_steps):
        row = table.get((state, cells[head]))
        if row is None:
            return
        if row.write is not None:
            cells[head] = row.write
        if row.move == "HL":
            if head == 0:
                cells.insert(0, spec.fill)
                head = 1
            head -= 1
        elif row.move == "HR":
            if head == len(cells) - 1:
                cells.append(spec.fill)
            head += 1
        state = row.next_state
        yield TapeConfig(tuple(cells), head, state)


def trimmed(t: TapeConfig, pad: str):
    """Configuration with padding cells stripped from both ends (head kept)."""
    cells = list(t.cells)
    lo, hi = 0, len(cells)
    while lo < t.head and cells[lo] == pad:
        lo += 1
    while hi - 1 > t.head and cells[hi - 1] == pad:
        hi -= 1
    return tuple(cells[lo:hi]), t.head - lo, t.state


def random_tm(rng, n_states: int) -> TMSpec:
    states = [f"q{i}" for i in range(n_states)]
    symbols = ["0", "1", "_"]
    rows = []
    for q in states:
        for a in symbols:
            if rng.random() < 0.8:
                w = str(rng.choice(symbols + ["NOP"]))
                nxt = str(rng.choice(states + ["halt"]))
                rows.append(Row(q, a, None if w == "NOP" else w, str(rng.choice(["HL", "HR", "NMOV"])), nxt))
    return TMSpec("rand", "_", states[0], tuple(rows))


# ---------------------------------------------------------------- circuits
def eval_circuit(spec: BCSpec, assignment) -> int:
    """Recursive evaluation straight from the gate list."""
    gates = {g.out: g for g in spec.gates}
    memo: dict = {}

    def val(w):
        if w in assignment:
            return int(assignment[w])
        if w not in memo:
            g = gates[w]
            xs = [val(x) for x in g.ins]
            if g.kind == "not":
                memo[w] = 1 - xs[0]
            elif g.kind == "and":
                memo[w] = int(min(xs))
            else:
                memo[w] = int(max(xs))
        return memo[w]

    return val(spec.output)


def small_circuits(inputs=("a", "b", "c")) -> list[BCSpec]:
    """All 1-gate circuits and all 2-gate circuits whose second gate reads the first."""

    def gates(ws, out):
        for w in ws:
            yield Gate("not", out, (w,))
        for kind in ("and", "or"):
            for x, y in itertools.product(ws, ws):
                yield Gate(kind, out, (x, y))

    ws = list(inputs)
    out = [BCSpec(ws, [g], "g1") for g in gates(ws, "g1")]
    for g1 in gates(ws, "g1"):
        for g2 in gates(ws + ["g1"], "g2"):
            if "g1" in g2.ins:
                out.append(BCSpec(ws, [g1, g2], "g2"))
    return out


def random_circuit(rng, max_gates: int = 8, max_inputs: int = 5) -> BCSpec:
    ni = int(rng.integers(1, max_inputs + 1))
    ins = [f"x{i}" for i in range(ni)]
    wires = list(ins)
    gs = []
    for k in range(int(rng.integers(1, max_gates + 1))):
        kind = str(rng.choice(["not", "and", "or"]))
        arity = 1 if kind == "not" else int(rng.integers(2, 4))
        g = Gate(kind, f"g{k}", tuple(str(rng.choice(wires)) for _ in range(arity)))
        gs.append(g)
        wires.append(g.out)
    return BCSpec(ins, gs, wires[-1])


def assignments(spec: BCSpec):
    for bits in itertools.product((0, 1), repeat=len(spec.inputs)):
        yield dict(zip(spec.inputs, bits))
