"""Sequence analysis: coherence, initial digraphs, compatibility, determinism
and the closed-form image of a sequence.

Steps are stored in application order: ``steps[0]`` is applied first.  Every
production already lives on the shared universe of the sequence, and the
permutation attached to a step is applied to all of its matrices
(``X^sigma = sigma . X``) before any formula sees it.  ``oracle_apply`` is
the plain stepwise executor every closed form is checked against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .boolalg import BoolMatrix, ComplexBoolMatrix, Permutation, kronecker, range_delta, range_nabla
from .errors import BudgetExceeded, ConditionViolated, DimensionError, IncoherentSequenceError
from .graph import SimpleDigraph, is_compatible
from .production import Production, relabel

__all__ = [
    "CompletedSequence",
    "DeterminismVerdict",
    "OracleResult",
    "classify_determinism",
    "coherence",
    "coherence_bool",
    "coherence_gf2",
    "compatibility_w",
    "image_closed_form",
    "initial_digraph",
    "initial_graph",
    "oracle_apply",
]

DEFAULT_BUDGET = 10**6


@dataclass(frozen=True, eq=False)
class CompletedSequence:
    steps: tuple
    labels: tuple
    node_ids: tuple

    def __post_init__(self):
        steps = []
        for item in self.steps:
            p, sigma = item if isinstance(item, tuple) else (item, None)
            if p.n != len(self.labels):
                raise DimensionError(f"{p.name}: not completed to the sequence universe")
            sigma = Permutation.identity(p.n) if sigma is None else sigma
            if not sigma.preserves(self.labels):
                raise ValueError(f"{p.name}: relabeling does not preserve labels")
            steps.append((p, sigma))
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "node_ids", tuple(self.node_ids))
        object.__setattr__(self, "_eff", tuple(relabel(p, s) for p, s in steps))

    @classmethod
    def of(cls, prods: Sequence[Production], sigmas: Optional[Sequence[Permutation]] = None) -> "CompletedSequence":
        """Sequence over the universe of the first production (all must share it)."""
        if not prods:
            return cls((), (), ())
        sigmas = list(sigmas) if sigmas is not None else [None] * len(prods)
        return cls(tuple(zip(prods, sigmas)), prods[0].labels, prods[0].node_ids)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def effective(self) -> tuple[Production, ...]:
        """The relabeled productions ``p_j^sigma_j``, in application order."""
        return self._eff

    def with_sigmas(self, sigmas: Sequence[Permutation]) -> "CompletedSequence":
        return CompletedSequence(tuple((p, s) for (p, _), s in zip(self.steps, sigmas)), self.labels, self.node_ids)

    def __len__(self) -> int:
        return len(self.steps)


def _zero(n: int) -> BoolMatrix:
    return np.zeros((n, n), dtype=bool)


def _terms(s: CompletedSequence, kind: str):
    eff = s.effective
    m, n = len(eff), s.n
    e = [p.e for p in eff]
    r = [p.r for p in eff]
    plus, minus = [], []
    for j, p in enumerate(eff):
        a = p.R & range_nabla(kind, j + 1, m - 1, lambda x, y: ~e[x] & r[y], n)
        b = p.L & range_delta(kind, 0, j - 1, lambda x, y: e[y] & ~r[x], n)
        plus.append((a, b))
        c = p.Q & range_nabla(kind, j + 1, m - 1, lambda x, y: ~r[x] & e[y], n)
        d = p.K & range_delta(kind, 0, j - 1, lambda x, y: ~e[x] & r[y], n)
        minus.append((c, d))
    return plus, minus


def coherence_bool(s: CompletedSequence) -> tuple[BoolMatrix, BoolMatrix]:
    """``(C+, C-)``: edges the sequence needs present, resp. absent, but cannot have."""
    plus, minus = _terms(s, "boolean_primed")
    cp, cm = _zero(s.n), _zero(s.n)
    for a, b in plus:
        cp |= a | b
    for c, d in minus:
        cm |= c | d
    return cp, cm


def coherence_gf2(s: CompletedSequence) -> ComplexBoolMatrix:
    """The same operator written with GF(2) products and sums: ``C+ + i C-``."""
    plus, minus = _terms(s, "gf2")
    ones = ~_zero(s.n)

    def orsum(pairs):
        prod = ones.copy()
        for a, b in pairs:
            prod = prod & (ones ^ a ^ b ^ (a & b))
        return ones ^ prod

    return ComplexBoolMatrix(orsum(plus), orsum(minus), s.labels)


def coherence(s: CompletedSequence) -> BoolMatrix:
    """``C~ = C+ or C-``; zero exactly when the sequence is coherent."""
    cp, cm = coherence_bool(s)
    return cp | cm


def _require_coherent(s: CompletedSequence) -> None:
    c = coherence(s)
    if c.any():
        bad = [(s.node_ids[i], s.node_ids[k]) for i, k in zip(*np.nonzero(c))]
        raise IncoherentSequenceError(f"sequence is not coherent; conflicting edges: {bad}")


def initial_digraph(s: CompletedSequence, check: bool = True) -> ComplexBoolMatrix:
    """``M(s) = M_C + i M_N``: edges the host must have, resp. must lack.

    With ``check=False`` the formula is evaluated on incoherent sequences too
    (the oracle cross-checks need the candidate host either way).
    """
    if check:
        _require_coherent(s)
    eff = s.effective
    n = s.n
    mc, mn = _zero(n), _zero(n)
    keep_c = ~_zero(n)
    keep_n = ~_zero(n)
    for p in eff:
        mc |= keep_c & p.L
        keep_n &= ~p.e & ~p.T
        mn |= keep_n & p.K
        keep_c &= ~p.r
    return ComplexBoolMatrix(mc, mn, s.labels)


def _initial_nodes(s: CompletedSequence, mc: BoolMatrix) -> np.ndarray:
    need = np.zeros(s.n, dtype=bool)
    keep = np.ones(s.n, dtype=bool)
    for p in s.effective:
        need |= keep & p.lhs.nodes
        keep &= ~p.add_nodes
    return need | mc.any(axis=0) | mc.any(axis=1)


def initial_graph(s: CompletedSequence, check: bool = True) -> SimpleDigraph:
    """The minimal initial digraph ``M_C`` as a graph over the universe."""
    mc = initial_digraph(s, check).real
    return SimpleDigraph(mc, _initial_nodes(s, mc), s.labels, s.node_ids)


def compatibility_w(s: CompletedSequence) -> BoolMatrix:
    """Edges left dangling after some step when starting from ``M_C``.

    The host is evolved one step at a time, ``G_x = r_x or (not e_x) G_(x-1)``
    on edges and nodes, and ``W`` collects every edge of some ``G_x`` whose
    endpoints are not both present.
    """
    mc = initial_digraph(s, check=False).real
    ge = mc.copy()
    gv = _initial_nodes(s, mc)
    w = _zero(s.n)
    for p in s.effective:
        ge = p.r | (~p.e & ge)
        gv = p.add_nodes | (~p.erase_nodes & gv)
        w |= ge & ~kronecker(gv, gv)
    return w


@dataclass
class OracleResult:
    ok: bool
    graph: Optional[SimpleDigraph]
    failed_step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def oracle_apply(s: CompletedSequence, g: SimpleDigraph) -> OracleResult:
    """Apply the sequence step by step at its fixed identification.

    Each step needs its LHS present, its nihilation edges and added nodes
    absent, and must leave a compatible graph.  Failure is reported as a
    value: the 0-based index of the failing step and why.
    """
    if g.n != s.n:
        raise DimensionError(f"host has dimension {g.n}, sequence universe {s.n}")
    ge, gv = g.edges.copy(), g.nodes.copy()
    labels = tuple(a or b for a, b in zip(g.labels, s.labels))
    for j, p in enumerate(s.effective):
        if (p.L & ~ge).any() or (p.lhs.nodes & ~gv).any():
            return OracleResult(False, None, j, "left-hand side not present")
        if (p.K & ge).any():
            return OracleResult(False, None, j, "nihilation edge present")
        if (p.add_nodes & gv).any():
            return OracleResult(False, None, j, "added node already present")
        ge = p.r | (~p.e & ge)
        gv = p.add_nodes | (~p.erase_nodes & gv)
        h = SimpleDigraph(ge, gv, labels, g.node_ids)
        if not is_compatible(h):
            return OracleResult(False, None, j, "dangling edge")
    return OracleResult(True, SimpleDigraph(ge, gv, labels, g.node_ids))


def _first_violation(s: CompletedSequence, g: SimpleDigraph) -> Optional[str]:
    if compatibility_w(s).any():
        return "W"
    if coherence(s).any():
        return "C"
    m = initial_digraph(s, check=False)
    if (m.imag & g.edges).any():
        return "M_N*G"
    nodes = _initial_nodes(s, m.real)
    added = np.zeros(s.n, dtype=bool)
    keep = np.ones(s.n, dtype=bool)
    for p in s.effective:
        added |= keep & p.add_nodes
        keep &= ~p.erase_nodes
    if (added & g.nodes).any():
        return "M_N*G"
    if (m.real & ~g.edges).any() or (nodes & ~g.nodes).any():
        return "M_C*(G+1)"
    return None


def image_closed_form(s: CompletedSequence, g: SimpleDigraph) -> SimpleDigraph:
    """``H = G + sum_j sigma_j . omega_j`` over GF(2).

    Each swap enters through the entries it flips (its imaginary part);
    the conditions ``W``, ``C``, ``M_N*G`` and ``M_C*(G+1)`` are checked in
    that order and the first failure raises ``ConditionViolated``.
    """
    if g.n != s.n:
        raise DimensionError(f"host has dimension {g.n}, sequence universe {s.n}")
    bad = _first_violation(s, g)
    if bad is not None:
        raise ConditionViolated(bad)
    he, hv = g.edges.copy(), g.nodes.copy()
    for p in s.effective:
        he ^= p.e ^ p.r
        hv ^= p.erase_nodes ^ p.add_nodes
    labels = tuple(a or b for a, b in zip(g.labels, s.labels))
    return SimpleDigraph(he, hv, labels, g.node_ids)


@dataclass
class DeterminismVerdict:
    verdict: str
    witnesses: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.witnesses)


def label_classes(labels: Sequence) -> list[list[int]]:
    """Index classes sharing a label, classes in label-name order."""
    groups: dict = {}
    for i, lbl in enumerate(labels):
        groups.setdefault(lbl, []).append(i)
    return [groups[k] for k in sorted(groups, key=str)]


def label_group(labels: Sequence) -> list[Permutation]:
    """All label-preserving permutations, lexicographic per class."""
    n = len(labels)
    classes = label_classes(labels)
    out = []
    for choice in itertools.product(*(itertools.permutations(c) for c in classes)):
        m = list(range(n))
        for cls, img in zip(classes, choice):
            for i, j in zip(cls, img):
                m[i] = j
        out.append(Permutation(m))
    return out


def _applicable(s: CompletedSequence, host: Optional[SimpleDigraph]) -> bool:
    if coherence(s).any():
        return False
    if host is None:
        return True
    return _first_violation(s, host) is None


def classify_determinism(
    s: CompletedSequence, host: Optional[SimpleDigraph] = None, budget: int = DEFAULT_BUDGET
) -> DeterminismVerdict:
    """Try every tuple of label-preserving relabelings, one per step.

    The permutations already stored in ``s`` are ignored.  A tuple is a
    witness when the relabeled sequence is coherent (and, given a host,
    when every application condition holds on it).
    """
    group_size = 1
    for c in label_classes(s.labels):
        group_size *= math.factorial(len(c))
    total = group_size ** len(s)
    if total > budget:
        raise BudgetExceeded(f"{total} relabeling tuples exceed the budget of {budget}")
    group = label_group(s.labels) if len(s) else []
    witnesses = []
    for tup in itertools.product(group, repeat=len(s)):
        if _applicable(s.with_sigmas(tup), host):
            witnesses.append(tup)
    if not witnesses:
        verdict = "not-applicable"
    elif len(witnesses) == 1:
        verdict = "deterministic"
    else:
        verdict = "non-deterministic"
    return DeterminismVerdict(verdict, witnesses)
