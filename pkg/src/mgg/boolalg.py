"""Boolean and GF(2) matrix algebra.

Matrices and vectors are plain numpy ``bool`` arrays.  Over GF(2) the
product of two bits is their ``and`` and the sum is their ``xor``; the
Boolean operations use ``and``/``or``.  Both flavours live here because the
sequence analyses are stated once in each and are cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionError, UndefinedProductError

BoolMatrix = np.ndarray
BoolVector = np.ndarray

__all__ = [
    "BoolMatrix",
    "BoolVector",
    "ComplexBoolMatrix",
    "Permutation",
    "as_matrix",
    "as_vector",
    "bool_product",
    "elementwise",
    "freeze",
    "identity",
    "kronecker",
    "norm1",
    "ones",
    "permute_action",
    "range_delta",
    "range_nabla",
    "scalar_product",
    "zeros",
]


def freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(x, n: Optional[int] = None) -> BoolMatrix:
    """Coerce ``x`` to a square bool matrix, checking every entry is 0/1."""
    a = np.asarray(x)
    if a.size == 0:
        size = 0 if n is None else n
        if size:
            raise DimensionError(f"empty input for a {size}x{size} matrix")
        return np.zeros((0, 0), dtype=bool)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.dtype != bool:
        if not np.isin(a, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        a = a.astype(bool)
    if n is not None and a.shape[0] != n:
        raise DimensionError(f"expected dimension {n}, got {a.shape[0]}")
    return a


def as_vector(x, n: Optional[int] = None) -> BoolVector:
    a = np.asarray(x)
    if a.size == 0:
        if n:
            raise DimensionError(f"empty input for a vector of length {n}")
        return np.zeros(0, dtype=bool)
    if a.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {a.shape}")
    if a.dtype != bool:
        if not np.isin(a, (0, 1)).all():
            raise ValueError("vector entries must be 0 or 1")
        a = a.astype(bool)
    if n is not None and a.shape[0] != n:
        raise DimensionError(f"expected length {n}, got {a.shape[0]}")
    return a


def zeros(n: int) -> BoolMatrix:
    return np.zeros((n, n), dtype=bool)


def ones(n: int) -> BoolMatrix:
    return np.ones((n, n), dtype=bool)


def identity(n: int) -> BoolMatrix:
    return np.eye(n, dtype=bool)


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


_BINARY = {
    "and": np.logical_and,
    "or": np.logical_or,
    "xor": np.logical_xor,
}


def elementwise(op: str, a, b=None) -> np.ndarray:
    """Entrywise ``and``/``or``/``xor``/``not``; ``xor`` is GF(2) addition."""
    a = np.asarray(a, dtype=bool)
    if op == "not":
        if b is not None:
            raise TypeError("'not' takes a single operand")
        return ~a
    try:
        fn = _BINARY[op]
    except KeyError:
        raise ValueError(f"unknown elementwise operation {op!r}") from None
    if b is None:
        raise TypeError(f"{op!r} needs two operands")
    b = np.asarray(b, dtype=bool)
    _same_shape(a, b)
    return fn(a, b)


def bool_product(a, b) -> BoolMatrix:
    """Boolean matrix product: ``or`` of ``and`` terms."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.ndim != 2 or b.ndim not in (1, 2) or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    if b.ndim == 2 and a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def kronecker(u, v) -> BoolMatrix:
    """Tensor product of two vectors: ``result[i, j] = u[i] and v[j]``."""
    u = np.asarray(u, dtype=bool)
    v = np.asarray(v, dtype=bool)
    if u.ndim != 1 or v.ndim != 1:
        raise DimensionError("kronecker expects two vectors")
    _same_shape(u, v)
    return np.logical_and.outer(u, v)


def norm1(v) -> bool:
    """The ``or`` of every component (0 for an empty vector)."""
    return bool(np.asarray(v, dtype=bool).any())


class Permutation:
    """A bijection on ``{0..n-1}``.

    The associated matrix has ``matrix[i, j] = 1`` exactly when
    ``sigma(i) = j``.  Its action on a matrix ``m`` is
    ``sigma . m = sigma (.) m (.) sigma^t``, which works out to
    ``m[sigma(i), sigma(k)]`` at position ``(i, k)``.
    """

    __slots__ = ("_map",)

    def __init__(self, mapping: Iterable[int]):
        m = tuple(int(x) for x in mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError(f"not a permutation: {m}")
        self._map = m

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]], base: int = 0) -> "Permutation":
        """Build from disjoint cycles, ``(a b c)`` meaning a->b->c->a."""
        m = list(range(n))
        seen: set[int] = set()
        for cyc in cycles:
            c = [x - base for x in cyc]
            if seen.intersection(c) or len(set(c)) != len(c):
                raise ValueError("cycles must be disjoint")
            seen.update(c)
            for i, x in enumerate(c):
                m[x] = c[(i + 1) % len(c)]
        return cls(m)

    @classmethod
    def from_matrix(cls, mat) -> "Permutation":
        mat = as_matrix(mat)
        if not (mat.sum(axis=0) == 1).all() or not (mat.sum(axis=1) == 1).all():
            raise ValueError("not a permutation matrix")
        return cls(int(np.argmax(row)) for row in mat)

    @property
    def n(self) -> int:
        return len(self._map)

    @property
    def map(self) -> tuple[int, ...]:
        return self._map

    @property
    def matrix(self) -> BoolMatrix:
        m = zeros(self.n)
        m[np.arange(self.n), list(self._map)] = True
        return m

    def __call__(self, i: int) -> int:
        return self._map[i]

    def __matmul__(self, other: "Permutation") -> "Permutation":
        # matrix product semantics: (s @ t).m == s.(t.m)
        if other.n != self.n:
            raise DimensionError("permutation sizes differ")
        return Permutation(other._map[self._map[i]] for i in range(self.n))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self._map):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self._map))

    def preserves(self, labels: Sequence) -> bool:
        """True if every index is sent to an index with the same label."""
        return all(labels[i] == labels[j] for i, j in enumerate(self._map))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._map == other._map

    def __hash__(self) -> int:
        return hash(self._map)

    def __repr__(self) -> str:
        return f"Permutation({list(self._map)})"


@dataclass(frozen=True, eq=False)
class ComplexBoolMatrix:
    """``real + i*imag`` over GF(2)[i].

    The real part holds what must be present, the imaginary part what must
    be absent.  Boolean complex matrices proper have disjoint parts; the
    analyses also produce overlapping values (e.g. the coherence operator of
    a sequence that is incoherent on both sides), so disjointness is checked
    where it is required rather than at construction.
    """

    real: BoolMatrix
    imag: BoolMatrix
    labels: Optional[tuple] = None

    def __post_init__(self):
        re = as_matrix(self.real)
        im = as_matrix(self.imag, re.shape[0])
        object.__setattr__(self, "real", freeze(re.copy()))
        object.__setattr__(self, "imag", freeze(im.copy()))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != re.shape[0]:
                raise DimensionError("labels must cover the diagonal")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def zeros(cls, n: int) -> "ComplexBoolMatrix":
        return cls(zeros(n), zeros(n))

    @property
    def n(self) -> int:
        return self.real.shape[0]

    def is_disjoint(self) -> bool:
        return not (self.real & self.imag).any()

    def is_zero(self) -> bool:
        return not (self.real.any() or self.imag.any())

    def __add__(self, other: "ComplexBoolMatrix") -> "ComplexBoolMatrix":
        if self.labels is not None and other.labels is not None and self.labels != other.labels:
            raise ValueError("addition requires equal labelings")
        return ComplexBoolMatrix(
            elementwise("xor", self.real, other.real),
            elementwise("xor", self.imag, other.imag),
            self.labels if self.labels is not None else other.labels,
        )

    def __mul__(self, other: "ComplexBoolMatrix") -> "ComplexBoolMatrix":
        # pointwise product: (L + iK)(R + iQ) = (LR + KQ) + i(LQ + KR)
        _same_shape(self.real, other.real)
        re = (self.real & other.real) ^ (self.imag & other.imag)
        im = (self.real & other.imag) ^ (self.imag & other.real)
        return ComplexBoolMatrix(re, im, self.labels)

    def scale(self, alpha: int) -> "ComplexBoolMatrix":
        if alpha not in (0, 1):
            raise ValueError("scalars live in GF(2)")
        if alpha:
            return self
        return ComplexBoolMatrix(zeros(self.n), zeros(self.n), self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexBoolMatrix):
            return NotImplemented
        return (
            self.real.shape == other.real.shape
            and np.array_equal(self.real, other.real)
            and np.array_equal(self.imag, other.imag)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ComplexBoolMatrix(real={self.real.astype(int).tolist()}, imag={self.imag.astype(int).tolist()})"


def permute_action(sigma: Permutation, m):
    """Relabel ``m`` by ``sigma``: ``sigma (.) m (.) sigma^t``.

    Works on matrices, node vectors and complex matrices (both parts, with
    the diagonal labels moved along).
    """
    idx = list(sigma.map)
    if isinstance(m, ComplexBoolMatrix):
        if m.n != sigma.n:
            raise DimensionError("permutation and matrix sizes differ")
        labels = None if m.labels is None else tuple(m.labels[j] for j in idx)
        return ComplexBoolMatrix(
            permute_action(sigma, m.real), permute_action(sigma, m.imag), labels
        )
    a = np.asarray(m, dtype=bool)
    if a.shape[0] != sigma.n:
        raise DimensionError("permutation and matrix sizes differ")
    if a.ndim == 1:
        return a[idx]
    return a[np.ix_(idx, idx)]


def scalar_product(a: ComplexBoolMatrix, b: ComplexBoolMatrix) -> ComplexBoolMatrix:
    """``<a, b> = (L1 + iK1)(1 + K2 + i(1 + L2))``.

    Defined only when ``(L1 + K1)(1 + L2 + K2) = 0``; under that condition
    the result again has disjoint parts.
    """
    _same_shape(a.real, b.real)
    l1, k1, l2, k2 = a.real, a.imag, b.real, b.imag
    if ((l1 ^ k1) & ~(l2 ^ k2)).any():
        raise UndefinedProductError("scalar product undefined: (L1+K1)(1+L2+K2) != 0")
    return a * ComplexBoolMatrix(~k2, ~l2)


RangeFn = Callable[[int, int], np.ndarray]

_KINDS = ("boolean_primed", "gf2")


def _range(kind: str, t0: int, t1: int, f: RangeFn, n: int, inner) -> BoolMatrix:
    if kind not in _KINDS:
        raise ValueError(f"unknown range kind {kind!r}")
    if t0 > t1:
        return zeros(n)
    if kind == "boolean_primed":
        out = zeros(n)
        for y in range(t0, t1 + 1):
            term = ones(n)
            for x in inner(y):
                term &= f(x, y)
            out |= term
        return out
    # gf2: 1 + prod_y (1 + prod_x f(x, y))
    outer = ones(n)
    for y in range(t0, t1 + 1):
        prod = ones(n)
        for x in inner(y):
            prod = prod * f(x, y)
        outer = outer * (ones(n) ^ prod)
    return ones(n) ^ outer


def range_nabla(kind: str, t0: int, t1: int, f: RangeFn, n: int) -> BoolMatrix:
    """``or_{y=t0..t1} and_{x=t0..y} f(x, y)`` (``gf2`` kind: the 1+prod form).

    An empty range (``t0 > t1``) gives the zero matrix.
    """
    return _range(kind, t0, t1, f, n, lambda y: range(t0, y + 1))


def range_delta(kind: str, t0: int, t1: int, f: RangeFn, n: int) -> BoolMatrix:
    """``or_{y=t0..t1} and_{x=y..t1} f(x, y)`` (``gf2`` kind: the 1+prod form)."""
    return _range(kind, t0, t1, f, n, lambda y: range(y, t1 + 1))
