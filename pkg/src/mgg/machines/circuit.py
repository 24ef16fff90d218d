"""Boolean circuits as nodeless grammars.

Wires are ``Var`` nodes.  An unassigned wire carries a self-loop; a value
is an edge from the shared ``0`` or ``1`` node.  Gates are nodes labeled
``not``/``or``/``and`` with edges from their inputs and to their output.
Every multi-input gate owns an ``se`` node: ``se -> gate``, ``se -> first
input``, ``last input -> se`` and order edges between consecutive inputs.

Order edges only make sense when each input wire of a multi-input gate is
private to it.  Wires shared with another multi-input gate (or repeated in
one gate) are therefore routed through a double negation first.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union


from ..derive import Grammar, Strategy, run
from ..errors import StuckCircuitError
from ..graph import SimpleDigraph
from ..production import Production, from_static

__all__ = ["BCSpec", "Gate", "compile_bc", "eval_bc", "gate_productions", "seed_inputs", "truth_value"]

KINDS = ("not", "or", "and")


@dataclass(frozen=True)
class Gate:
    kind: str
    out: str
    ins: tuple

    def __post_init__(self):
        object.__setattr__(self, "ins", tuple(self.ins))
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "not" and len(self.ins) != 1:
            raise ValueError(f"not gate {self.out} must have exactly one input")
        if self.kind != "not" and len(self.ins) < 2:
            raise ValueError(f"{self.kind} gate {self.out} needs at least two inputs")


@dataclass(frozen=True)
class BCSpec:
    inputs: tuple
    gates: tuple
    output: str

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "gates", tuple(self.gates))
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError("duplicate input wire")
        driven = set(self.inputs)
        for g in self.gates:
            if g.out in driven:
                raise ValueError(f"wire {g.out} is driven twice")
            driven.add(g.out)
        for g in self.gates:
            for w in g.ins:
                if w not in driven:
                    raise ValueError(f"gate {g.out} reads undefined wire {w}")
        if self.output not in driven:
            raise ValueError(f"output wire {self.output} is undefined")
        self.topological()

    def topological(self) -> list[Gate]:
        """Gates in dependency order; raises on a cycle."""
        by_out = {g.out: g for g in self.gates}
        state: dict = {}
        order: list[Gate] = []

        def visit(w: str, path: tuple) -> None:
            g = by_out.get(w)
            if g is None or state.get(w) == 2:
                return
            if state.get(w) == 1:
                raise ValueError(f"circuit is cyclic through {' -> '.join(path + (w,))}")
            state[w] = 1
            for x in g.ins:
                visit(x, path + (w,))
            state[w] = 2
            order.append(g)

        for g in self.gates:
            visit(g.out, ())
        return order


def truth_value(spec: BCSpec, assignment: Mapping[str, int]) -> int:
    """Direct evaluation, used as the reference semantics."""
    val = {w: int(assignment[w]) for w in spec.inputs}
    for g in spec.topological():
        xs = [val[w] for w in g.ins]
        val[g.out] = 1 - xs[0] if g.kind == "not" else int(any(xs) if g.kind == "or" else all(xs))
    return val[spec.output]


def _prod(name: str, nodes, lhs_edges, rhs_edges) -> Production:
    lhs = SimpleDigraph.build(nodes, lhs_edges)
    rhs = SimpleDigraph.build(nodes, rhs_edges)
    return from_static(lhs, rhs, {i: i for i in range(lhs.n)}, name)


def _minus(edges, drop):
    return [e for e in edges if e not in drop]


def gate_productions() -> list[Production]:
    vals = [("v0", "0"), ("v1", "1")]
    prods = []
    for b in (0, 1):
        v, nv = f"v{b}", f"v{1 - b}"
        nodes = vals + [("x", "Var"), ("g", "not"), ("y", "Var")]
        lhs = [(v, "x"), ("x", "g"), ("g", "y"), ("y", "y")]
        prods.append(_prod(f"not({b})", nodes, lhs, [(v, "x"), (nv, "y")]))
    # absorbing value decides the gate at once; the neutral one walks the chain
    for kind, absorb in (("or", 1), ("and", 0)):
        neutral = 1 - absorb
        va, vn = f"v{absorb}", f"v{neutral}"
        nodes = [(va, str(absorb)), ("x", "Var"), ("g", kind), ("y", "Var")]
        lhs = [(va, "x"), ("x", "g"), ("g", "y"), ("y", "y")]
        prods.append(_prod(f"{kind}({absorb})", nodes, lhs, _minus(lhs, [("y", "y")]) + [(va, "y")]))

        nodes = [(vn, str(neutral)), ("s", "se"), ("x1", "Var"), ("x2", "Var"), ("g", kind), ("y", "Var")]
        lhs = [(vn, "x1"), (vn, "x2"), ("s", "g"), ("s", "x1"), ("x1", "x2"), ("g", "y"), ("y", "y")]
        rhs = _minus(lhs, [("s", "x1"), ("x1", "x2")]) + [("s", "x2")]
        prods.append(_prod(f"{kind}_s({neutral})", nodes, lhs, rhs))

        nodes = [(vn, str(neutral)), ("s", "se"), ("x", "Var"), ("g", kind), ("y", "Var")]
        lhs = [(vn, "x"), ("s", "g"), ("s", "x"), ("x", "s"), ("g", "y"), ("y", "y")]
        prods.append(_prod(f"{kind}_e({neutral})", nodes, lhs, _minus(lhs, [("y", "y")]) + [(vn, "y")]))
    return prods


def _wire(w: str) -> str:
    return f"w:{w}"


def compile_bc(spec: BCSpec) -> tuple[Grammar, SimpleDigraph]:
    """Gate productions and the unassigned circuit graph (every wire looped)."""
    uses = Counter(w for g in spec.gates if g.kind != "not" for w in g.ins)
    nodes = [("val:0", "0"), ("val:1", "1")]
    edges = []
    wires = list(spec.inputs) + [g.out for g in spec.gates]
    nodes += [(_wire(w), "Var") for w in wires]
    edges += [(_wire(w), _wire(w)) for w in wires]

    def add_gate(gid: str, kind: str, ins: Sequence[str], out: str) -> None:
        nodes.append((gid, kind))
        edges.extend((x, gid) for x in ins)
        edges.append((gid, out))

    for k, g in enumerate(spec.gates):
        gid = f"gate:{k}"
        if g.kind == "not":
            add_gate(gid, "not", [_wire(g.ins[0])], _wire(g.out))
            continue
        ins = []
        for pos, w in enumerate(g.ins):
            if uses[w] == 1:
                ins.append(_wire(w))
                continue
            # private copy through a double negation
            mid, priv = f"buf:{k}.{pos}.a", f"buf:{k}.{pos}.b"
            nodes += [(mid, "Var"), (priv, "Var")]
            edges += [(mid, mid), (priv, priv)]
            add_gate(f"gate:{k}.{pos}.a", "not", [_wire(w)], mid)
            add_gate(f"gate:{k}.{pos}.b", "not", [mid], priv)
            ins.append(priv)
        add_gate(gid, g.kind, ins, _wire(g.out))
        se = f"se:{k}"
        nodes.append((se, "se"))
        edges += [(se, gid), (se, ins[0]), (ins[-1], se)]
        edges += list(zip(ins, ins[1:]))
    host = SimpleDigraph.build(nodes, edges)
    return Grammar(tuple(gate_productions()), host, mode="nodeless"), host


def seed_inputs(spec: BCSpec, host: SimpleDigraph, assignment: Mapping[str, int]) -> SimpleDigraph:
    """Replace each input's self-loop by an edge from its value node."""
    e = host.edges.copy()
    for w in spec.inputs:
        b = assignment[w]
        if b not in (0, 1, True, False):
            raise ValueError(f"input {w} must be 0 or 1, got {b!r}")
        i = host.index_of(_wire(w))
        e[i, i] = False
        e[host.index_of(f"val:{int(b)}"), i] = True
    return host.with_parts(edges=e)


def read_wire(host: SimpleDigraph, w: str) -> Optional[int]:
    i = host.index_of(_wire(w))
    for b in (0, 1):
        if host.edges[host.index_of(f"val:{b}"), i]:
            return b
    return None


def eval_bc(
    spec: BCSpec,
    assignment: Union[Mapping[str, int], Sequence[int]],
    strategy: Optional[Strategy] = None,
    max_steps: int = 100_000,
    compiled: Optional[tuple[Grammar, SimpleDigraph]] = None,
) -> int:
    """Run the circuit grammar from the seeded inputs and read the output wire.

    The default strategy picks productions and matches at random (seed 0).
    """
    if not isinstance(assignment, Mapping):
        assignment = dict(zip(spec.inputs, assignment))
    missing = [w for w in spec.inputs if w not in assignment]
    if missing:
        raise ValueError(f"no value for inputs {missing}")
    gr, host = compiled if compiled is not None else compile_bc(spec)
    start = seed_inputs(spec, host, assignment)
    gr = Grammar(gr.productions, start, gr.mode)
    res = run(gr, strategy or Strategy("random", "random", 0), max_steps)
    out = read_wire(res.final, spec.output)
    if out is None:
        raise StuckCircuitError(f"run halted after {len(res.trace)} steps with output {spec.output} unassigned")
    return out
