"""Finite characters of tori: weight -> integer multiplicity maps.

Weights are tuples.  Three domains occur:

* lattice weights: tuples of ints;
* shifted lattice weights: tuples of ints plus one algebra-valued
  ``offset`` shared by the whole character (the weight is offset + w);
* algebra weights: tuples of :class:`AlgebraElement` (coordinates in t*).

Multiplicities may be negative (virtual characters); zero entries are never
stored.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import AlgebraContext, AlgebraElement
from .errors import DomainMismatch, ShapeMismatch


def _weight_key(w):
    return tuple(x.sort_key() if isinstance(x, AlgebraElement) else (x,) for x in w)


def _is_algebra_weight(w):
    return any(isinstance(x, AlgebraElement) for x in w)


@dataclass(frozen=True)
class TorusCharacter:
    rank: int
    terms: tuple  # sorted ((weight, multiplicity), ...)
    offset: tuple | None = None

    @classmethod
    def from_mapping(cls, mapping: Mapping, rank: int | None = None, offset=None) -> "TorusCharacter":
        acc = defaultdict(int)
        for w, m in mapping.items():
            w = tuple(w) if isinstance(w, (tuple, list)) else (w,)
            acc[w] += m
        items = [(w, m) for w, m in acc.items() if m != 0]
        if rank is None:
            if items:
                rank = len(items[0][0])
            elif offset is not None:
                rank = len(offset)
            else:
                raise ShapeMismatch("rank of an empty character must be given")
        for w, _ in items:
            if len(w) != rank:
                raise DomainMismatch(f"weight {w} does not have rank {rank}")
        kinds = {_is_algebra_weight(w) for w, _ in items}
        if len(kinds) > 1:
            raise DomainMismatch("mixed lattice and algebra weights")
        if offset is not None:
            offset = tuple(offset)
            if len(offset) != rank:
                raise DomainMismatch("offset rank does not match weights")
            if True in kinds:
                raise DomainMismatch("shifted characters carry lattice weights")
        items.sort(key=lambda t: _weight_key(t[0]))
        return cls(rank, tuple(items), offset)

    @classmethod
    def unit(cls, rank: int) -> "TorusCharacter":
        return cls.from_mapping({(0,) * rank: 1}, rank)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __getitem__(self, w) -> int:
        w = tuple(w) if isinstance(w, (tuple, list)) else (w,)
        return self.as_dict().get(w, 0)

    def __len__(self):
        return len(self.terms)

    def weights(self):
        return [w for w, _ in self.terms]

    def actual_weights(self):
        """Weights with the offset applied."""
        if self.offset is None:
            return self.weights()
        return [tuple(o + x for o, x in zip(self.offset, w)) for w, _ in self.terms]

    def dimension(self) -> int:
        return sum(m for _, m in self.terms)

    def __add__(self, other: "TorusCharacter") -> "TorusCharacter":
        _check_same_domain(self, other)
        acc = defaultdict(int, self.as_dict())
        for w, m in other.terms:
            acc[w] += m
        return TorusCharacter.from_mapping(acc, self.rank, self.offset)

    def scaled(self, k: int) -> "TorusCharacter":
        return TorusCharacter.from_mapping({w: k * m for w, m in self.terms}, self.rank, self.offset)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def to_json(self, fmt=None) -> list:
        fmt = fmt or _default_fmt
        return [[[fmt(x) for x in w], m] for w, m in self.terms]


def _default_fmt(x):
    if isinstance(x, AlgebraElement):
        if x.is_rational():
            return str(x.coeffs[0])
        return [str(c) for c in x.coeffs]
    return x if isinstance(x, int) else str(x)


def _check_same_domain(a: TorusCharacter, b: TorusCharacter):
    if a.rank != b.rank:
        raise DomainMismatch(f"rank {a.rank} vs {b.rank}")
    if (a.offset is None) != (b.offset is None):
        raise DomainMismatch("shifted and unshifted characters mixed")
    if a.offset is not None and tuple(a.offset) != tuple(b.offset):
        raise DomainMismatch("characters carry different offsets")


def _add_weights(u, v):
    return tuple(x + y for x, y in zip(u, v))


def char_product(a: TorusCharacter, b: TorusCharacter) -> TorusCharacter:
    """Convolution of multiplicity maps; offsets add."""
    if a.rank != b.rank:
        raise DomainMismatch(f"rank {a.rank} vs {b.rank}")
    ka = {_is_algebra_weight(w) for w in a.weights()}
    kb = {_is_algebra_weight(w) for w in b.weights()}
    if ka and kb and ka != kb:
        raise DomainMismatch("cannot multiply lattice and algebra characters")
    if a.offset is None and b.offset is None:
        offset = None
    elif a.offset is None:
        offset = b.offset
    elif b.offset is None:
        offset = a.offset
    else:
        offset = _add_weights(a.offset, b.offset)
    acc = defaultdict(int)
    for wa, ma in a.terms:
        for wb, mb in b.terms:
            acc[_add_weights(wa, wb)] += ma * mb
    return TorusCharacter.from_mapping(acc, a.rank, offset)


@dataclass(frozen=True)
class SubalgebraData:
    """Spanning vectors of a subalgebra of R^d (possibly algebra-valued)."""

    basis: tuple
    ctx: AlgebraContext | None = None

    def __post_init__(self):
        basis = tuple(tuple(v) for v in self.basis)
        object.__setattr__(self, "basis", basis)
        if len({len(v) for v in basis}) > 1:
            raise ShapeMismatch("subalgebra vectors have different lengths")
        for v in basis:
            if all(x == 0 for x in v):
                raise ShapeMismatch("subalgebra vectors must be nonzero")
            for x in v:
                if isinstance(x, AlgebraElement) and self.ctx is not None and x.ctx != self.ctx:
                    raise DomainMismatch("subalgebra vectors span several contexts")

    @property
    def dim(self):
        return len(self.basis)


def _pairing(w, v):
    acc = 0
    for x, y in zip(w, v):
        acc = x * y + acc
    return acc


def invariant_part(c: TorusCharacter, h: SubalgebraData) -> TorusCharacter:
    """Keep exactly the weights annihilated by every basis vector of ``h``."""
    if h.dim == 0:
        return c
    if any(len(v) != c.rank for v in h.basis):
        raise DomainMismatch("subalgebra and character live in different ranks")
    kept = {}
    for (w, m), actual in zip(c.terms, c.actual_weights()):
        if all(_pairing(actual, v) == 0 for v in h.basis):
            kept[w] = m
    return TorusCharacter.from_mapping(kept, c.rank, c.offset)


def restrict_along(c: TorusCharacter, a: Sequence[Sequence[int]]) -> TorusCharacter:
    """Push weights forward along the integer matrix ``a`` (rows = new coordinates)."""
    a = [tuple(row) for row in a]
    if any(len(row) != c.rank for row in a):
        raise ShapeMismatch(f"matrix needs {c.rank} columns")
    acc = defaultdict(int)
    for w, m in c.terms:
        acc[tuple(_pairing(w, row) for row in a)] += m
    offset = None
    if c.offset is not None:
        offset = tuple(_pairing(c.offset, row) for row in a)
    return TorusCharacter.from_mapping(acc, len(a), offset)


def finite_group_invariants(c: TorusCharacter, orders: Sequence[int], pairing: Sequence[Sequence[int]]) -> TorusCharacter:
    """Invariants under prod Z_k acting through ``pairing`` (row i = i-th generator)."""
    orders = list(orders)
    pairing = [tuple(row) for row in pairing]
    if len(orders) != len(pairing):
        raise ShapeMismatch("one pairing row per cyclic factor")
    if any(len(row) != c.rank for row in pairing):
        raise ShapeMismatch(f"pairing rows need {c.rank} entries")
    if any(k < 1 for k in orders):
        raise ShapeMismatch("cyclic orders must be positive")
    kept = {}
    for (w, m), actual in zip(c.terms, c.actual_weights()):
        vals = [_pairing(actual, row) for row in pairing]
        ints = []
        for v in vals:
            if isinstance(v, AlgebraElement):
                if not v.is_integer():
                    raise DomainMismatch(f"weight {actual} is not integral against the pairing")
                v = int(v.coeffs[0])
            elif isinstance(v, Fraction):
                if v.denominator != 1:
                    raise DomainMismatch(f"weight {actual} is not integral against the pairing")
                v = int(v)
            ints.append(v)
        if all(v % k == 0 for v, k in zip(ints, orders)):
            kept[w] = m
    return TorusCharacter.from_mapping(kept, c.rank, c.offset)


__all__ = [
    "TorusCharacter",
    "SubalgebraData",
    "char_product",
    "invariant_part",
    "restrict_along",
    "finite_group_invariants",
]
