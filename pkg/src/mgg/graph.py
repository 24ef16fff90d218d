"""Labeled simple digraphs: compatibility, completion, complement, morphisms."""

from __future__ import annotations

import re
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .boolalg import BoolMatrix, BoolVector, as_matrix, as_vector, bool_product, freeze, norm1
from .errors import DimensionError, LabelClashError

__all__ = [
    "Correspondence",
    "SimpleDigraph",
    "check_morphism",
    "complement_wrt",
    "complete",
    "is_compatible",
    "natural_key",
]

# node-index -> node-index, partial and injective
Correspondence = Mapping[int, int]

_DIGITS = re.compile(r"(\d+)")


@lru_cache(maxsize=1 << 16)
def natural_key(s: str):
    """Sort key treating digit runs numerically (``c2`` before ``c10``)."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in _DIGITS.split(s) if p)


@dataclass(frozen=True, eq=False)
class SimpleDigraph:
    """A simple digraph ``(M, V)`` with a node labeling.

    ``edges`` is the adjacency matrix, ``nodes`` the presence vector.
    ``labels`` and ``node_ids`` run over the whole index universe: absent
    indices may keep the label they carry elsewhere (completion needs
    that), present ones must have one.  Negations and complements are not
    graphs in general and are flagged with ``structure=True``.
    """

    edges: BoolMatrix
    nodes: BoolVector
    labels: tuple
    node_ids: tuple
    structure: bool = False

    def __post_init__(self):
        e = as_matrix(self.edges)
        n = e.shape[0]
        v = as_vector(self.nodes, n)
        labels = tuple(self.labels)
        ids = tuple(str(i) for i in self.node_ids)
        if len(labels) != n or len(ids) != n:
            raise DimensionError("labels and node ids must cover every index")
        if len(set(ids)) != n:
            raise ValueError("node ids must be unique")
        if not self.structure:
            for i in np.flatnonzero(v):
                if not labels[i]:
                    raise ValueError(f"node {ids[i]!r} has no label")
        object.__setattr__(self, "edges", freeze(e.copy()))
        object.__setattr__(self, "nodes", freeze(v.copy()))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "node_ids", ids)

    @classmethod
    def build(cls, nodes: Iterable[tuple[str, str]], edges: Iterable[tuple[str, str]] = ()) -> "SimpleDigraph":
        """Build from ``(id, label)`` pairs and ``(src, dst)`` id pairs."""
        nodes = list(nodes)
        ids = [str(i) for i, _ in nodes]
        index = {nid: k for k, nid in enumerate(ids)}
        n = len(ids)
        m = np.zeros((n, n), dtype=bool)
        for s, t in edges:
            try:
                m[index[str(s)], index[str(t)]] = True
            except KeyError as exc:
                raise ValueError(f"edge ({s}, {t}) refers to an unknown node {exc.args[0]!r}") from None
        return cls(m, np.ones(n, dtype=bool), tuple(lbl for _, lbl in nodes), tuple(ids))

    @classmethod
    def empty(cls) -> "SimpleDigraph":
        return cls(np.zeros((0, 0), dtype=bool), np.zeros(0, dtype=bool), (), ())

    @property
    def n(self) -> int:
        return self.edges.shape[0]

    def index_of(self, node_id: str) -> int:
        try:
            return self.node_ids.index(str(node_id))
        except ValueError:
            raise KeyError(node_id) from None

    def present(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.nodes)]

    def edge_ids(self) -> list[tuple[str, str]]:
        return [(self.node_ids[i], self.node_ids[j]) for i, j in zip(*np.nonzero(self.edges))]

    def canonical(self):
        """Index-free view: present ``(id, label)`` nodes and ``(id, id)`` edges."""
        nodes = sorted(((self.node_ids[i], self.labels[i]) for i in self.present()), key=lambda p: natural_key(p[0]))
        edges = sorted(self.edge_ids(), key=lambda p: (natural_key(p[0]), natural_key(p[1])))
        return tuple(nodes), tuple(edges)

    def same_graph(self, other: "SimpleDigraph") -> bool:
        """Equality up to index order, compared through node ids."""
        return self.canonical() == other.canonical()

    def with_parts(self, edges=None, nodes=None, structure: Optional[bool] = None) -> "SimpleDigraph":
        return SimpleDigraph(
            self.edges if edges is None else edges,
            self.nodes if nodes is None else nodes,
            self.labels,
            self.node_ids,
            self.structure if structure is None else structure,
        )

    def compact(self) -> "SimpleDigraph":
        """Drop absent indices."""
        keep = self.present()
        if len(keep) == self.n:
            return self
        return SimpleDigraph(
            self.edges[np.ix_(keep, keep)],
            self.nodes[keep],
            tuple(self.labels[i] for i in keep),
            tuple(self.node_ids[i] for i in keep),
            self.structure,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimpleDigraph):
            return NotImplemented
        return (
            self.node_ids == other.node_ids
            and self.labels == other.labels
            and self.structure == other.structure
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.edges, other.edges)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        nodes, edges = self.canonical()
        return f"SimpleDigraph(nodes={list(nodes)}, edges={list(edges)})"


def is_compatible(g: SimpleDigraph) -> bool:
    """No dangling edges: ``||(M or M^t) (.) not V||_1 == 0``."""
    m = g.edges
    return not norm1(bool_product(m | m.T, ~g.nodes))


def _check_injective(f: Correspondence, n_src: int, n_dst: int) -> None:
    if len(set(f.values())) != len(f):
        raise ValueError("correspondence is not injective")
    for i, j in f.items():
        if not (0 <= i < n_src and 0 <= j < n_dst):
            raise IndexError(f"correspondence pair ({i}, {j}) out of range")


def _fresh_id(base: str, taken: set) -> str:
    nid = base
    while nid in taken:
        nid += "'"
    return nid


def complete(a: SimpleDigraph, b: SimpleDigraph, f: Correspondence) -> tuple[SimpleDigraph, SimpleDigraph]:
    """Bring ``a`` and ``b`` to one index universe along ``f: a -> b``.

    ``a`` keeps its indices; nodes of ``b`` outside the image of ``f`` are
    appended in their original order (as 0-rows/columns of ``a``).  Node ids
    of appended nodes are primed if they clash with ids of ``a``.
    """
    _check_injective(f, a.n, b.n)
    for i, j in f.items():
        la, lb = a.labels[i], b.labels[j]
        if la and lb and la != lb:
            raise LabelClashError(f"label clash: {a.node_ids[i]}:{la} vs {b.node_ids[j]}:{lb}")
    inv = {j: i for i, j in f.items()}
    extra = [j for j in range(b.n) if j not in inv]
    n = a.n + len(extra)
    pos = dict(inv)
    for k, j in enumerate(extra):
        pos[j] = a.n + k

    labels = list(a.labels) + [b.labels[j] for j in extra]
    for i, j in f.items():
        if not labels[i]:
            labels[i] = b.labels[j]
    ids = list(a.node_ids)
    taken = set(ids)
    for j in extra:
        nid = _fresh_id(b.node_ids[j], taken)
        taken.add(nid)
        ids.append(nid)

    ae = np.zeros((n, n), dtype=bool)
    ae[: a.n, : a.n] = a.edges
    av = np.zeros(n, dtype=bool)
    av[: a.n] = a.nodes

    order = [pos[j] for j in range(b.n)]
    be = np.zeros((n, n), dtype=bool)
    be[np.ix_(order, order)] = b.edges
    bv = np.zeros(n, dtype=bool)
    bv[order] = b.nodes

    labels_t, ids_t = tuple(labels), tuple(ids)
    return (
        SimpleDigraph(ae, av, labels_t, ids_t, a.structure),
        SimpleDigraph(be, bv, labels_t, ids_t, b.structure),
    )


def complement_wrt(g: SimpleDigraph, a: SimpleDigraph, f: Correspondence) -> SimpleDigraph:
    """Complement of ``g`` with respect to ``a`` through ``f: a -> g``.

    Completes ``g`` against ``a`` and negates the result.  The output is a
    structure, not necessarily a compatible graph.
    """
    _check_injective(f, a.n, g.n)
    g_c, _ = complete(g, a, {j: i for i, j in f.items()})
    return SimpleDigraph(~g_c.edges, ~g_c.nodes, g_c.labels, g_c.node_ids, structure=True)


def check_morphism(f: Correspondence, g1: SimpleDigraph, g2: SimpleDigraph) -> bool:
    """Is ``f`` an injective, label- and edge-preserving partial map g1 -> g2?"""
    if len(set(f.values())) != len(f):
        return False
    for i, j in f.items():
        if not (0 <= i < g1.n and 0 <= j < g2.n):
            return False
        if not (g1.nodes[i] and g2.nodes[j]):
            return False
        if g1.labels[i] != g2.labels[j]:
            return False
    dom = list(f)
    for i in dom:
        for k in dom:
            if g1.edges[i, k] and not g2.edges[f[i], f[k]]:
                return False
    return True


def correspondence_by_ids(a: SimpleDigraph, b: SimpleDigraph, pairs: Iterable[tuple[str, str]]) -> dict[int, int]:
    """Translate ``(a-id, b-id)`` pairs into an index correspondence."""
    return {a.index_of(x): b.index_of(y) for x, y in pairs}


def induced(g: SimpleDigraph, ids: Sequence[str]) -> SimpleDigraph:
    """Subgraph induced on the given node ids."""
    idx = [g.index_of(i) for i in ids]
    return SimpleDigraph(
        g.edges[np.ix_(idx, idx)], g.nodes[idx], tuple(g.labels[i] for i in idx), tuple(g.node_ids[i] for i in idx)
    )
