"""Exact arithmetic in a declared number ring, and linear algebra over it.

A context is a finite-dimensional commutative algebra over Q with basis
``g_0 = 1, g_1, ..., g_m`` and a closed multiplication table.  Each
generator also carries a rational enclosure of its real value; enclosures
are only ever used to decide *signs* of nonzero elements.  Zero tests are
exact coefficient tests, which is sound as long as the declared generators
are Q-linearly independent (the caller's responsibility).

Enclosures are refined by bisection against the squarefree part of the
characteristic polynomial of multiplication by the generator, whose roots
include the generator's real value.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ContextMismatch,
    EnclosureInconsistent,
    NotInvertible,
    ShapeMismatch,
    TableNotSymmetric,
    Undecidable,
    UnitRowMissing,
)

DEFAULT_BUDGET = 64


# --------------------------------------------------------------------------
# univariate polynomials over Q, lowest degree first


def _ptrim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p, x):
    acc = Fraction(0)
    for coeff in reversed(p):
        acc = acc * x + coeff
    return acc


def _pderiv(p):
    return _ptrim([i * p[i] for i in range(1, len(p))])


def _pdivmod(a, b):
    a = _ptrim(a)
    b = _ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lead = b[-1]
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        f = r[-1] / lead
        q[shift] = f
        for i, bc in enumerate(b):
            r[shift + i] -= f * bc
        r = _ptrim(r)
    return _ptrim(q), r


def _pgcd(a, b):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [c / a[-1] for c in a]


def _charpoly(mat):
    """Characteristic polynomial det(xI - A) by Faddeev-LeVerrier."""
    n = len(mat)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    prev = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        cur = [
            [sum((mat[i][l] * prev[l][j] for l in range(n)), Fraction(0)) for j in range(n)]
            for i in range(n)
        ]
        for i in range(n):
            cur[i][i] += coeffs[n - k + 1]
        am = [
            sum((mat[i][l] * cur[l][i] for l in range(n)), Fraction(0))
            for i in range(n)
        ]
        coeffs[n - k] = -sum(am, Fraction(0)) / k
        prev = cur
    return coeffs


def _squarefree(p):
    g = _pgcd(p, _pderiv(p))
    q, r = _pdivmod(p, g)
    assert not r
    return q


def _sign(x):
    return (x > 0) - (x < 0)


def _sturm_chain(p):
    chain = [_ptrim(p), _pderiv(p)]
    while chain[-1]:
        rem = _pdivmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append([-c for c in rem])
    return [c for c in chain if c]


def _sign_changes(chain, x):
    signs = [s for s in (_sign(_peval(c, x)) for c in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_roots(p, lo, hi):
    """Distinct real roots of squarefree ``p`` in the open interval (lo, hi)."""
    chain = _sturm_chain(p)
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


# --------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class AlgebraContext:
    """A declared number ring: names, structure constants, enclosures."""

    names: tuple
    table: tuple
    enclosures: tuple
    budget: int = field(default=DEFAULT_BUDGET, compare=False)
    _polys: list = field(default_factory=list, compare=False, repr=False)
    _levels: list = field(default_factory=list, compare=False, repr=False)

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def is_rational(self) -> bool:
        return self.dim == 1

    def element(self, coeffs) -> "AlgebraElement":
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != self.dim:
            raise ShapeMismatch(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return AlgebraElement(self, coeffs)

    def rational(self, q) -> "AlgebraElement":
        return AlgebraElement(self, (Fraction(q),) + (Fraction(0),) * (self.dim - 1))

    def gen(self, name_or_index) -> "AlgebraElement":
        idx = name_or_index if isinstance(name_or_index, int) else self.names.index(name_or_index)
        return AlgebraElement(self, tuple(Fraction(int(i == idx)) for i in range(self.dim)))

    def zero(self) -> "AlgebraElement":
        return self.rational(0)

    def one(self) -> "AlgebraElement":
        return self.rational(1)

    def coerce(self, x) -> "AlgebraElement":
        if isinstance(x, AlgebraElement):
            if x.ctx is not self and x.ctx != self:
                raise ContextMismatch("elements belong to different contexts")
            return x
        if isinstance(x, (int, Fraction)):
            return self.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into an algebra element")

    def vector(self, xs) -> tuple:
        return tuple(self.coerce(x) for x in xs)

    def with_budget(self, budget: int) -> "AlgebraContext":
        return AlgebraContext(self.names, self.table, self.enclosures, budget)

    # -- enclosure refinement ------------------------------------------------

    def _refinement_polys(self):
        if not self._polys:
            polys = [None]
            for a in range(1, self.dim):
                mat = [list(self.table[a][b]) for b in range(self.dim)]
                # rows of ``mat`` are images of basis vectors; transpose is the
                # operator matrix but shares its characteristic polynomial
                polys.append(_squarefree(_charpoly(mat)))
            self._polys.extend(polys)
        return self._polys

    def enclosure(self, level: int):
        """Generator enclosures after ``level`` bisection steps."""
        if not self._levels:
            self._levels.append(self.enclosures)
        polys = self._refinement_polys()
        while len(self._levels) <= level:
            prev = self._levels[-1]
            nxt = [prev[0]]
            for a in range(1, self.dim):
                nxt.append(_bisect(polys[a], *prev[a]))
            self._levels.append(tuple(nxt))
        return self._levels[level]

    def refined(self, steps: int = 1) -> "AlgebraContext":
        """A context whose declared enclosures are ``steps`` halvings tighter."""
        return AlgebraContext(self.names, self.table, self.enclosure(steps), self.budget)


def _bisect(poly, lo, hi):
    if lo == hi:
        return (lo, hi)
    mid = (lo + hi) / 2
    pm = _peval(poly, mid)
    if pm == 0:
        return (mid, mid)
    if _sign(_peval(poly, lo)) != _sign(pm):
        return (lo, mid)
    return (mid, hi)


def _imul(x, y):
    prods = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return (min(prods), max(prods))


def _combo_interval(coeffs, encl):
    lo = hi = Fraction(0)
    for c, (elo, ehi) in zip(coeffs, encl):
        if c >= 0:
            lo += c * elo
            hi += c * ehi
        else:
            lo += c * ehi
            hi += c * elo
    return lo, hi


def make_algebra(generators: Sequence[str], table, enclosures, refine_budget: int = DEFAULT_BUDGET) -> AlgebraContext:
    """Validate and build a context.

    ``table[a][b]`` is the coefficient vector of ``g_a * g_b``;
    ``enclosures[a]`` is a pair ``(lo, hi)`` of rationals.
    """
    names = tuple(generators)
    dim = len(names)
    if dim == 0:
        raise UnitRowMissing("at least the unit generator is required")
    tab = []
    for a in range(dim):
        row = []
        for b in range(dim):
            vec = tuple(Fraction(c) for c in table[a][b])
            if len(vec) != dim:
                raise ShapeMismatch(f"table entry ({names[a]}, {names[b]}) has wrong length")
            row.append(vec)
        tab.append(tuple(row))
    tab = tuple(tab)

    for b in range(dim):
        unit = tuple(Fraction(int(i == b)) for i in range(dim))
        if tab[0][b] != unit or tab[b][0] != unit:
            raise UnitRowMissing(f"g0 does not act as the unit on {names[b]}")
    for a in range(dim):
        for b in range(a + 1, dim):
            if tab[a][b] != tab[b][a]:
                raise TableNotSymmetric(f"{names[a]}*{names[b]} != {names[b]}*{names[a]}")

    encl = []
    for a in range(dim):
        lo, hi = (Fraction(x) for x in enclosures[a])
        if lo > hi:
            raise EnclosureInconsistent(f"empty enclosure for {names[a]}")
        encl.append((lo, hi))
    if not encl[0][0] <= 1 <= encl[0][1]:
        raise EnclosureInconsistent(f"enclosure of the unit {names[0]} excludes 1")
    encl[0] = (Fraction(1), Fraction(1))
    encl = tuple(encl)

    for a in range(dim):
        for b in range(a, dim):
            lhs = _imul(encl[a], encl[b])
            rhs = _combo_interval(tab[a][b], encl)
            if lhs[1] < rhs[0] or rhs[1] < lhs[0]:
                raise EnclosureInconsistent(
                    f"interval of {names[a]}*{names[b]} misses its table value"
                )

    ctx = AlgebraContext(names, tab, encl, refine_budget)
    polys = ctx._refinement_polys()
    for a in range(1, dim):
        lo, hi = encl[a]
        p = polys[a]
        if lo == hi:
            if _peval(p, lo) != 0:
                raise EnclosureInconsistent(f"point enclosure of {names[a]} is not a root")
            continue
        if _peval(p, lo) == 0 or _peval(p, hi) == 0 or _count_roots(p, lo, hi) != 1:
            raise EnclosureInconsistent(
                f"enclosure of {names[a]} does not isolate a single value compatible with the table"
            )
    return ctx


def rational_context(refine_budget: int = DEFAULT_BUDGET) -> AlgebraContext:
    return make_algebra(["1"], [[[1]]], [(1, 1)], refine_budget)


QQ = rational_context()


# --------------------------------------------------------------------------
# elements


class AlgebraElement:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: AlgebraContext, coeffs: tuple):
        self.ctx = ctx
        self.coeffs = coeffs

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = self.ctx.coerce(other)
        return AlgebraElement(self.ctx, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self.ctx.coerce(other)
        return AlgebraElement(self.ctx, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return self.ctx.coerce(other) - self

    def __neg__(self):
        return AlgebraElement(self.ctx, tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.ctx, tuple(x * other for x in self.coeffs))
        other = self.ctx.coerce(other)
        ctx = self.ctx
        if ctx.dim == 1:
            return AlgebraElement(ctx, (self.coeffs[0] * other.coeffs[0],))
        out = [Fraction(0)] * ctx.dim
        for a, x in enumerate(self.coeffs):
            if not x:
                continue
            row = ctx.table[a]
            for b, y in enumerate(other.coeffs):
                if not y:
                    continue
                xy = x * y
                for c, t in enumerate(row[b]):
                    if t:
                        out[c] += xy * t
        return AlgebraElement(ctx, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise NotInvertible("division by zero")
            return AlgebraElement(self.ctx, tuple(x / other for x in self.coeffs))
        return self * invert(self.ctx.coerce(other))

    def __rtruediv__(self, other):
        return self.ctx.coerce(other) * invert(self)

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_integer(self) -> bool:
        return self.is_rational() and self.coeffs[0].denominator == 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.coeffs == other.coeffs and (self.ctx is other.ctx or self.ctx == other.ctx)

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def __lt__(self, other):
        return compare(self, self.ctx.coerce(other)) is Order.LESS

    def __le__(self, other):
        return compare(self, self.ctx.coerce(other)) is not Order.GREATER

    def __gt__(self, other):
        return compare(self, self.ctx.coerce(other)) is Order.GREATER

    def __ge__(self, other):
        return compare(self, self.ctx.coerce(other)) is not Order.LESS

    # evaluation ------------------------------------------------------------
    def interval(self, level: int = 0):
        return _combo_interval(self.coeffs, self.ctx.enclosure(level))

    def sign(self) -> int:
        return compare(self, self.ctx.zero()).value

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.coeffs[0])
        lo, hi = self.interval(0)
        n = math.floor(lo)
        while n + 1 <= hi and compare(self, self.ctx.rational(n + 1)) is not Order.LESS:
            n += 1
        return n

    def ceil(self) -> int:
        return -((-self).floor())

    def sort_key(self):
        return self.coeffs

    def __repr__(self):
        return f"AlgebraElement({format_element(self)})"

    def __str__(self):
        return format_element(self)


def format_element(x: AlgebraElement) -> str:
    parts = []
    for c, name in zip(x.coeffs, x.ctx.names):
        if not c:
            continue
        if name == x.ctx.names[0]:
            parts.append(str(c))
        elif c == 1:
            parts.append(name)
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{c}*{name}")
    if not parts:
        return "0"
    return "+".join(parts).replace("+-", "-")


def arith(a: AlgebraElement, b: AlgebraElement, kind: str) -> AlgebraElement:
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise ContextMismatch("elements belong to different contexts")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def _mult_matrix(a: AlgebraElement):
    """Column j holds the coefficients of a * g_j."""
    ctx = a.ctx
    cols = [(a * ctx.gen(j)).coeffs for j in range(ctx.dim)]
    return [[cols[j][i] for j in range(ctx.dim)] for i in range(ctx.dim)]


def invert(a: AlgebraElement) -> AlgebraElement:
    """Inverse by solving the rational system ``L_a x = e_0``."""
    ctx = a.ctx
    if a.is_zero():
        raise NotInvertible("cannot invert 0")
    if ctx.dim == 1:
        return AlgebraElement(ctx, (1 / a.coeffs[0],))
    mat = _mult_matrix(a)
    rhs = [Fraction(int(i == 0)) for i in range(ctx.dim)]
    sol = _solve_rational(mat, rhs)
    if sol is None:
        raise NotInvertible(f"{format_element(a)} is a zero divisor in the declared algebra")
    return AlgebraElement(ctx, tuple(sol))


def _solve_rational(mat, rhs):
    """Unique solution of a square rational system, or None if singular."""
    n = len(mat)
    aug = [list(row) + [r] for row, r in zip(mat, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


class Order(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def compare(a: AlgebraElement, b: AlgebraElement) -> Order:
    """Exact equality, then sign by interval refinement within the budget."""
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise ContextMismatch("elements belong to different contexts")
    diff = a - b
    if diff.is_zero():
        return Order.EQUAL
    if diff.is_rational():
        return Order.GREATER if diff.coeffs[0] > 0 else Order.LESS
    for level in range(a.ctx.budget + 1):
        lo, hi = diff.interval(level)
        if lo > 0:
            return Order.GREATER
        if hi < 0:
            return Order.LESS
    raise Undecidable(
        f"sign of {format_element(diff)} undecided after {a.ctx.budget} refinements; "
        "supply tighter enclosures"
    )


# --------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class AlgebraMatrix:
    ctx: AlgebraContext
    rows: tuple
    ncols: int

    @classmethod
    def from_rows(cls, ctx: AlgebraContext, rows: Iterable[Iterable], ncols: int | None = None) -> "AlgebraMatrix":
        rows = tuple(ctx.vector(r) for r in rows)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ShapeMismatch("ragged matrix")
        if ncols is None:
            if not rows:
                raise ShapeMismatch("column count of an empty matrix must be given")
            ncols = widths.pop()
        elif widths and widths != {ncols}:
            raise ShapeMismatch(f"rows do not have {ncols} columns")
        return cls(ctx, rows, ncols)

    @property
    def shape(self):
        return (len(self.rows), self.ncols)

    def transpose(self) -> "AlgebraMatrix":
        nr, nc = self.shape
        return AlgebraMatrix(self.ctx, tuple(tuple(self.rows[i][j] for i in range(nr)) for j in range(nc)), nr)

    def apply(self, vec) -> tuple:
        vec = self.ctx.vector(vec)
        if len(vec) != self.ncols:
            raise ShapeMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        return tuple(dot(row, vec, self.ctx) for row in self.rows)

    def rank(self) -> int:
        return len(rref(self)[1])


def dot(u, v, ctx: AlgebraContext):
    if ctx.dim == 1:
        # rational fast path: one Fraction sum, no intermediate elements
        acc = Fraction(0)
        for x, y in zip(u, v):
            x = x.coeffs[0] if isinstance(x, AlgebraElement) else x
            y = y.coeffs[0] if isinstance(y, AlgebraElement) else y
            if x and y:
                acc += x * y
        return AlgebraElement(ctx, (Fraction(acc),))
    acc = ctx.zero()
    for x, y in zip(u, v):
        acc = acc + x * y
    return acc


def _eliminate(rows, ncols):
    """Gauss-Jordan on the first ``ncols`` columns of ``rows`` (in place)."""
    nr = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = invert(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nr):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: AlgebraMatrix):
    """Reduced row echelon form: (nonzero rows, pivot columns)."""
    rows = [list(r) for r in m.rows]
    pivots = _eliminate(rows, m.ncols)
    return [tuple(row) for row in rows[: len(pivots)]], tuple(pivots)


def kernel_basis(m: AlgebraMatrix) -> list:
    """Canonical kernel basis: one vector per free column, 1 there, 0 at the other free columns."""
    ctx = m.ctx
    nc = m.ncols
    red, pivots = rref(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        vec = [ctx.zero()] * nc
        vec[f] = ctx.one()
        for row, p in zip(red, pivots):
            vec[p] = -row[f]
        basis.append(tuple(vec))
    return basis


class ImageSolver:
    """Reusable solver for ``M xi = x``; eliminates M once."""

    def __init__(self, m: AlgebraMatrix):
        self.matrix = m
        self.ctx = m.ctx
        nr, nc = m.shape
        self.nrows, self.ncols = nr, nc
        # eliminate [M | I]; the right block records the row operations
        rows = [
            list(row) + [self.ctx.rational(int(i == j)) for j in range(nr)]
            for i, row in enumerate(m.rows)
        ]
        self.pivots = tuple(_eliminate(rows, nc))
        self.ops = [tuple(row[nc:]) for row in rows]

    def solve(self, x):
        x = self.ctx.vector(x)
        if len(x) != self.nrows:
            raise ShapeMismatch(f"right-hand side has length {len(x)}, expected {self.nrows}")
        y = [dot(op, x, self.ctx) for op in self.ops]
        rank = len(self.pivots)
        if any(not v.is_zero() for v in y[rank:]):
            return None
        sol = [self.ctx.zero()] * self.ncols
        for i, p in enumerate(self.pivots):
            sol[p] = y[i]
        return tuple(sol)


def image_preimage(m: AlgebraMatrix, x) -> tuple | None:
    """Some xi with ``m xi = x`` (free variables set to 0), or None."""
    return ImageSolver(m).solve(x)
