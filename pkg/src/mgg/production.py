"""Productions: static/dynamic/affine forms and the matrices derived from them.

A production lives on its own node universe (LHS nodes plus nodes it adds).
It stores the LHS ``L``, the erase pair ``e`` (edges, nodes), the restock
pair ``r``, the nihilation matrix ``K`` and the accumulated relabeling
``sigma``.  The matrices are stored as they act: relabeling conjugates them
and records the permutation in ``sigma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .boolalg import (
    BoolMatrix,
    ComplexBoolMatrix,
    Permutation,
    as_matrix,
    as_vector,
    freeze,
    kronecker,
    permute_action,
)
from .errors import DimensionError, IllFormedProductionError, LabelClashError
from .graph import Correspondence, SimpleDigraph, complete, is_compatible

__all__ = [
    "Production",
    "Swap",
    "count_elements",
    "decompose_relabeling",
    "embed",
    "enabled_after",
    "forbidden_after",
    "from_static",
    "inverse",
    "nihilation",
    "relabel",
    "to_swap",
    "apply_raw",
]


def _nihil(e: BoolMatrix, r: BoolMatrix, e_nodes) -> BoolMatrix:
    keep = ~e_nodes
    d_bar = ~kronecker(keep, keep)
    return r | (~e & d_bar)


@dataclass(frozen=True, eq=False)
class Production:
    name: str
    lhs: SimpleDigraph
    erase_edges: BoolMatrix
    erase_nodes: np.ndarray
    add_edges: BoolMatrix
    add_nodes: np.ndarray
    nihil: Optional[BoolMatrix] = None
    sigma: Optional[Permutation] = None

    def __post_init__(self):
        n = self.lhs.n
        e = as_matrix(self.erase_edges, n)
        r = as_matrix(self.add_edges, n)
        ev = as_vector(self.erase_nodes, n)
        rv = as_vector(self.add_nodes, n)
        L, LV = self.lhs.edges, self.lhs.nodes
        if (e & r).any() or (ev & rv).any():
            raise IllFormedProductionError(f"{self.name}: erase and restock overlap")
        if (e & ~L).any() or (ev & ~LV).any():
            raise IllFormedProductionError(f"{self.name}: erases something outside its LHS")
        if (r & L).any() or (rv & LV).any():
            raise IllFormedProductionError(f"{self.name}: restocks something already in its LHS")
        for i in np.flatnonzero(rv):
            if not self.lhs.labels[i]:
                raise IllFormedProductionError(f"{self.name}: added node {self.lhs.node_ids[i]} has no label")
        if self.nihil is None:
            k = _nihil(e, r, ev)
        else:
            k = as_matrix(self.nihil, n).copy()
            if (k & L).any():
                raise IllFormedProductionError(f"{self.name}: nihilation matrix meets the LHS")
        sigma = Permutation.identity(n) if self.sigma is None else self.sigma
        if sigma.n != n:
            raise DimensionError("relabeling size differs from the production universe")
        for attr, val in (("erase_edges", e), ("add_edges", r), ("erase_nodes", ev), ("add_nodes", rv), ("nihil", k)):
            object.__setattr__(self, attr, freeze(val.copy()))
        object.__setattr__(self, "sigma", sigma)

    # -- views -------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.lhs.n

    @property
    def labels(self) -> tuple:
        return self.lhs.labels

    @property
    def node_ids(self) -> tuple:
        return self.lhs.node_ids

    @property
    def L(self) -> BoolMatrix:
        return self.lhs.edges

    @property
    def e(self) -> BoolMatrix:
        return self.erase_edges

    @property
    def r(self) -> BoolMatrix:
        return self.add_edges

    @property
    def K(self) -> BoolMatrix:
        return self.nihil

    @property
    def R(self) -> BoolMatrix:
        return self.add_edges | (~self.erase_edges & self.lhs.edges)

    @property
    def rhs(self) -> SimpleDigraph:
        nodes = self.add_nodes | (~self.erase_nodes & self.lhs.nodes)
        return SimpleDigraph(self.R, nodes, self.labels, self.node_ids)

    @property
    def Q(self) -> BoolMatrix:
        return forbidden_after(self)

    @property
    def T(self) -> BoolMatrix:
        return enabled_after(self)

    def is_nodeless(self) -> bool:
        return not (self.erase_nodes.any() or self.add_nodes.any())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Production):
            return NotImplemented
        return (
            self.name == other.name
            and self.lhs == other.lhs
            and self.sigma == other.sigma
            and all(
                np.array_equal(getattr(self, a), getattr(other, a))
                for a in ("erase_edges", "erase_nodes", "add_edges", "add_nodes", "nihil")
            )
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Production({self.name!r}, n={self.n})"


@dataclass(frozen=True)
class Swap:
    """``omega = alpha + i(alpha + 1)``: real and imaginary parts are complements."""

    value: ComplexBoolMatrix = field()

    def __post_init__(self):
        if not (self.value.real ^ self.value.imag).all():
            raise ValueError("not a swap: real and imaginary parts must be complementary")

    @property
    def toggles(self) -> BoolMatrix:
        """Entries the swap flips (its imaginary part)."""
        return self.value.imag


def from_static(L: SimpleDigraph, R: SimpleDigraph, f: Correspondence, name: str = "p") -> Production:
    """Build ``(L, e, r)`` from a rule ``L -> R`` with ``e = L not R``, ``r = R not L``."""
    if not is_compatible(L) or not is_compatible(R):
        raise IllFormedProductionError(f"{name}: LHS and RHS must be compatible graphs")
    lc, rc = complete(L, R, f)
    return Production(
        name,
        lc,
        lc.edges & ~rc.edges,
        lc.nodes & ~rc.nodes,
        rc.edges & ~lc.edges,
        rc.nodes & ~lc.nodes,
    )


def nihilation(p: Production) -> BoolMatrix:
    """``K = r or (not e) and (not D)`` with ``D = not e^V (x) not e^V``."""
    return _nihil(p.e, p.r, p.erase_nodes)


def forbidden_after(p: Production) -> BoolMatrix:
    """``Q = e or (not r) K``: what must be absent once ``p`` has been applied."""
    return p.e | (~p.r & p.K)


def enabled_after(p: Production) -> BoolMatrix:
    """``T``: edges made available by node additions."""
    rbar = ~p.add_nodes
    ebar = ~p.erase_nodes
    return ~kronecker(rbar, rbar) & kronecker(ebar, ebar)


def apply_raw(p: Production, x):
    """``r or (not e) x`` on a matrix, or on edges and nodes of a graph."""
    if isinstance(x, SimpleDigraph):
        if x.n != p.n:
            raise DimensionError(f"graph has dimension {x.n}, production {p.n}")
        edges = p.r | (~p.e & x.edges)
        nodes = p.add_nodes | (~p.erase_nodes & x.nodes)
        labels = tuple(a or b for a, b in zip(x.labels, p.labels))
        return SimpleDigraph(edges, nodes, labels, x.node_ids)
    m = np.asarray(x, dtype=bool)
    if m.shape != p.e.shape:
        raise DimensionError(f"matrix shape {m.shape} does not match production {p.e.shape}")
    return p.r | (~p.e & m)


def to_swap(p: Production) -> Swap:
    """``omega = (e + r + 1) + i(e + r)``."""
    if (p.e & p.r).any():
        raise IllFormedProductionError(f"{p.name}: erase and restock overlap")
    flips = p.e ^ p.r
    return Swap(ComplexBoolMatrix(~flips, flips, p.labels))


def relabel(p: Production, sigma: Permutation) -> Production:
    """The affine production ``p^sigma``: every constituent matrix conjugated."""
    if sigma.n != p.n:
        raise DimensionError("permutation size differs from the production universe")
    if not sigma.preserves(p.labels):
        raise LabelClashError(f"{p.name}: relabeling does not preserve labels")
    lhs = p.lhs.with_parts(permute_action(sigma, p.L), permute_action(sigma, p.lhs.nodes))
    return Production(
        p.name,
        lhs,
        permute_action(sigma, p.e),
        permute_action(sigma, p.erase_nodes),
        permute_action(sigma, p.r),
        permute_action(sigma, p.add_nodes),
        permute_action(sigma, p.K),
        sigma @ p.sigma,
    )


def decompose_relabeling(sigma: Permutation, L) -> tuple[BoolMatrix, BoolMatrix]:
    """Erase/restock matrices that turn ``L`` into ``sigma . L``."""
    m = L.edges if isinstance(L, SimpleDigraph) else as_matrix(L)
    moved = permute_action(sigma, m)
    return m & ~moved, ~m & moved


def _inverse_name(name: str) -> str:
    return name[: -len("^-1")] if name.endswith("^-1") else name + "^-1"


def inverse(p: Production) -> Production:
    """Swap erase and restock; the LHS becomes ``R`` and ``K`` becomes ``Q``."""
    return Production(
        _inverse_name(p.name),
        p.rhs,
        p.r,
        p.add_nodes,
        p.e,
        p.erase_nodes,
        forbidden_after(p),
        p.sigma.inverse(),
    )


def identity_production(g: SimpleDigraph, name: str = "id") -> Production:
    z = np.zeros_like(g.edges)
    zv = np.zeros_like(g.nodes)
    return Production(name, g, z, zv, z, zv)


def embed(p: Production, mapping: Mapping[int, int], labels: Sequence, ids: Sequence[str]) -> Production:
    """Place ``p`` into a larger universe; ``mapping`` sends every index of ``p``."""
    n = len(labels)
    if sorted(mapping) != list(range(p.n)):
        raise ValueError(f"{p.name}: every production node needs a place in the universe")
    idx = [mapping[i] for i in range(p.n)]
    if len(set(idx)) != len(idx) or any(not 0 <= j < n for j in idx):
        raise ValueError(f"{p.name}: identification is not injective into the universe")
    for i, j in enumerate(idx):
        if p.labels[i] and labels[j] != p.labels[i]:
            raise LabelClashError(f"{p.name}: node {p.node_ids[i]} ({p.labels[i]}) placed on {ids[j]} ({labels[j]})")

    def mat(a):
        out = np.zeros((n, n), dtype=bool)
        out[np.ix_(idx, idx)] = a
        return out

    def vec(a):
        out = np.zeros(n, dtype=bool)
        out[idx] = a
        return out

    smap = list(range(n))
    for i, j in enumerate(idx):
        smap[j] = idx[p.sigma(i)]
    lhs = SimpleDigraph(mat(p.L), vec(p.lhs.nodes), tuple(labels), tuple(ids))
    return Production(
        p.name,
        lhs,
        mat(p.e),
        vec(p.erase_nodes),
        mat(p.r),
        vec(p.add_nodes),
        mat(p.K),
        Permutation(smap),
    )


def count_elements(kind: str, n: int) -> int:
    """Number of swaps (``2^(n^2)``) or well-defined productions (``3^(n^2)``) on n nodes."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if kind == "swaps":
        return 2 ** (n * n)
    if kind == "productions":
        return 3 ** (n * n)
    raise ValueError(f"unknown kind {kind!r}; expected 'swaps' or 'productions'")
