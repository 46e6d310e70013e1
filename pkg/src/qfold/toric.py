"""Prato presentations of toric quasifolds and their quantization.

Polytopes use the convention ``<xi, v_i> <= c_i``.  With ``pi(e_i) = v_i``
the quantization is spanned by the weights ``c - b`` (``b`` in Z^d, b >= 0)
lying in ``im(pi^*)``; each such weight is ``pi^*(xi)`` for a unique
``xi`` in the polytope.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from itertools import combinations, product
from math import lcm

from .algebra import (
    AlgebraContext,
    AlgebraMatrix,
    ImageSolver,
    Order,
    compare,
    dot,
    kernel_basis,
    rref,
)
from .charring import SubalgebraData, TorusCharacter
from .errors import (
    Empty,
    EmptySlice,
    NotSimple,
    NotTransverse,
    OutsidePolytope,
    PiNotSurjective,
    ShapeMismatch,
    Unbounded,
)


@dataclass(frozen=True)
class SimplePolytope:
    """``{xi : <xi, v_i> <= c_i}`` in an ``n``-dimensional t*."""

    ctx: AlgebraContext
    n: int
    normals: tuple
    constants: tuple

    @classmethod
    def from_data(cls, ctx: AlgebraContext, n: int, normals, constants) -> "SimplePolytope":
        normals = tuple(ctx.vector(v) for v in normals)
        constants = ctx.vector(constants)
        if len(normals) != len(constants):
            raise ShapeMismatch("one constant per facet normal")
        if any(len(v) != n for v in normals):
            raise ShapeMismatch(f"facet normals must have length {n}")
        return cls(ctx, n, normals, constants)

    @property
    def d(self) -> int:
        return len(self.normals)

    def slack(self, xi):
        """``c_i - <xi, v_i>`` for every facet."""
        xi = self.ctx.vector(xi)
        return tuple(c - dot(v, xi, self.ctx) for v, c in zip(self.normals, self.constants))

    def contains(self, xi) -> bool:
        return all(s.sign() >= 0 for s in self.slack(xi))


def _lex_compare(u, v):
    for x, y in zip(u, v):
        o = compare(x, y)
        if o is not Order.EQUAL:
            return o.value
    return 0


_lex_key = functools.cmp_to_key(_lex_compare)


def _check_bounded(p: SimplePolytope) -> None:
    ctx, n = p.ctx, p.n
    if n == 0:
        return
    for sub in combinations(range(p.d), n - 1):
        m = AlgebraMatrix.from_rows(ctx, [p.normals[i] for i in sub], ncols=n)
        ker = kernel_basis(m)
        if len(ker) != 1:
            continue
        ray = ker[0]
        for sgn in (1, -1):
            r = tuple(sgn * x for x in ray)
            if all(dot(v, r, ctx).sign() <= 0 for v in p.normals):
                raise Unbounded(f"recession direction {tuple(str(x) for x in r)}")


def _affine_dim(ctx, points, n):
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [tuple(x - y for x, y in zip(pt, base)) for pt in points[1:]]
    return AlgebraMatrix.from_rows(ctx, diffs, ncols=n).rank()


def _vertex_table(p: SimplePolytope, strict: bool):
    """[(vertex, active facet indices)] sorted lexicographically by real value.

    With ``strict``, a full-dimensional polytope must be simple.  Polytopes
    of lower dimension (e.g. a dilation by 0) are accepted as they are.
    """
    ctx, n = p.ctx, p.n
    found = {}
    for sub in combinations(range(p.d), n):
        m = AlgebraMatrix.from_rows(ctx, [p.normals[i] for i in sub], ncols=n)
        solver = ImageSolver(m)
        if len(solver.pivots) != n:
            continue
        xi = solver.solve([p.constants[i] for i in sub])
        if xi is None or xi in found:
            continue
        slack = p.slack(xi)
        if any(s.sign() < 0 for s in slack):
            continue
        found[xi] = tuple(i for i, s in enumerate(slack) if s.is_zero())
    if strict and found and _affine_dim(ctx, list(found), n) == n:
        for xi, active in found.items():
            if len(active) != n:
                raise NotSimple(
                    f"vertex {tuple(str(x) for x in xi)} lies on {len(active)} facets, expected {n}"
                )
    return sorted(found.items(), key=lambda t: _lex_key(t[0]))


def vertices(p: SimplePolytope, strict: bool = True) -> list:
    return [v for v, _ in _vertex_table(p, strict)]


@dataclass(frozen=True)
class QuantEntry:
    b: tuple
    xi: tuple  # coordinates in this quasifold's t*
    root_xi: tuple  # the same weight in the top-level t* of the reduction chain


@dataclass(frozen=True)
class QuantizationResult:
    entries: tuple
    rank: int
    constants: tuple

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def character(self, root: bool = False) -> TorusCharacter:
        """Weights in t* (algebra coordinates)."""
        key = "root_xi" if root else "xi"
        ws = [getattr(e, key) for e in self.entries]
        rank = len(ws[0]) if ws else self.rank
        return TorusCharacter.from_mapping({w: 1 for w in ws}, rank)

    def ambient_character(self) -> TorusCharacter:
        """Weights c - b in R^d, stored as offset c plus lattice part -b."""
        d = len(self.constants)
        return TorusCharacter.from_mapping(
            {tuple(-x for x in e.b): 1 for e in self.entries}, d, offset=self.constants
        )

    def b_multiset(self):
        return sorted(e.b for e in self.entries)


@dataclass(frozen=True)
class PratoQuasifold:
    polytope: SimplePolytope
    pi: AlgebraMatrix  # n x d, columns are the facet normals
    kernel: tuple  # canonical basis of h = ker(pi)
    vertex_table: tuple
    certified_simple: bool
    # t* of this presentation sits in the top-level t* as base + embed . eta
    base: tuple
    embed: AlgebraMatrix
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def ctx(self):
        return self.polytope.ctx

    @property
    def n(self):
        return self.polytope.n

    @property
    def d(self):
        return self.polytope.d

    @property
    def constants(self):
        return self.polytope.constants

    @property
    def vertices(self):
        return [v for v, _ in self.vertex_table]

    def pi_star(self, xi) -> tuple:
        """pi^*(xi) = (<xi, v_i>)_i."""
        xi = self.ctx.vector(xi)
        return tuple(dot(v, xi, self.ctx) for v in self.polytope.normals)

    def to_root(self, xi) -> tuple:
        xi = self.ctx.vector(xi)
        return tuple(b + x for b, x in zip(self.base, self.embed.apply(xi)))

    def preimage_solver(self) -> ImageSolver:
        if "pistar" not in self._cache:
            self._cache["pistar"] = ImageSolver(self.pi.transpose())
        return self._cache["pistar"]


def _identity(ctx, n):
    return AlgebraMatrix.from_rows(ctx, [[int(i == j) for j in range(n)] for i in range(n)], ncols=n)


def _build(p: SimplePolytope, strict: bool, base=None, embed=None) -> PratoQuasifold:
    ctx = p.ctx
    pi = AlgebraMatrix.from_rows(
        ctx, [[v[k] for v in p.normals] for k in range(p.n)], ncols=p.d
    )
    if pi.rank() != p.n:
        raise PiNotSurjective(f"facet normals span a space of dimension < {p.n}")
    kernel = tuple(kernel_basis(pi))
    for h in kernel:
        assert all(x.is_zero() for x in pi.apply(h))
    _check_bounded(p)
    table = _vertex_table(p, strict)
    if not table:
        raise Empty("the polytope has no points")
    if base is None:
        base = ctx.vector([0] * p.n)
        embed = _identity(ctx, p.n)
    return PratoQuasifold(p, pi, kernel, tuple(table), strict, tuple(base), embed)


def build_quasifold(p: SimplePolytope) -> PratoQuasifold:
    """Certify boundedness, simplicity, nonemptiness; compute ker(pi) and vertices."""
    return _build(p, strict=True)


def _box_bounds(q: PratoQuasifold):
    """Upper bounds ceil(c_i - min over vertices <xi, v_i>) for b_i."""
    bounds = []
    for i, (v, c) in enumerate(zip(q.polytope.normals, q.constants)):
        vals = [dot(v, xi, q.ctx) for xi in q.vertices]
        low = functools.reduce(lambda a, b: a if compare(a, b) is not Order.GREATER else b, vals)
        bounds.append(max((c - low).ceil(), 0))
    return bounds


def _integer_rows(elems):
    """Common denominator and integer numerators (per generator) of a list of elements."""
    den = 1
    for e in elems:
        for x in e.coeffs:
            den = lcm(den, x.denominator)
    return den, [[int(x * den) for x in e.coeffs] for e in elems]


def quantize(q: PratoQuasifold) -> QuantizationResult:
    """All b >= 0 in the vertex box with c - b in im(pi^*), sorted by b.

    ``c - b`` lies in ``im(pi^*)`` iff it pairs to zero with the canonical
    kernel basis.  Each kernel vector is 1 on its own free column and 0 on
    the others, so the free coordinates of ``b`` are affine functions of the
    pivot coordinates; only the pivot coordinates are enumerated.
    """
    if "quantize" in q._cache:
        return q._cache["quantize"]
    ctx = q.ctx
    bounds = _box_bounds(q)
    _, pivots = rref(q.pi)
    free = [i for i in range(q.d) if i not in pivots]

    constraints = []
    for f, h in zip(free, q.kernel):
        assert h[f] == 1
        base = dot(q.constants, h, ctx)
        den, rows = _integer_rows([base] + [h[p] for p in pivots])
        constraints.append((f, den, rows[0], rows[1:]))

    solver = q.preimage_solver()
    entries = []
    for bp in product(*(range(bounds[p] + 1) for p in pivots)):
        b = [0] * q.d
        for p, x in zip(pivots, bp):
            b[p] = x
        ok = True
        for f, den, base, coef in constraints:
            vals = list(base)
            for x, row in zip(bp, coef):
                if x:
                    for a in range(len(vals)):
                        vals[a] -= x * row[a]
            if any(vals[1:]) or vals[0] % den:
                ok = False
                break
            bf = vals[0] // den
            if not 0 <= bf <= bounds[f]:
                ok = False
                break
            b[f] = bf
        if not ok:
            continue
        target = tuple(c - x for c, x in zip(q.constants, b))
        xi = solver.solve(target)
        assert xi is not None
        entries.append(QuantEntry(tuple(b), xi, q.to_root(xi)))
    entries.sort(key=lambda e: e.b)
    result = QuantizationResult(tuple(entries), q.n, q.constants)
    q._cache["quantize"] = result
    return result


def bohr_sommerfeld(q: PratoQuasifold, xi) -> int:
    """1 iff pi^*(xi) lies in c + Z^d."""
    xi = q.ctx.vector(xi)
    if len(xi) != q.n:
        raise ShapeMismatch(f"point must have {q.n} coordinates")
    if not q.polytope.contains(xi):
        raise OutsidePolytope(f"{tuple(str(x) for x in xi)} is not in the polytope")
    return int(all(s.is_integer() for s in q.polytope.slack(xi)))


def shift(q: PratoQuasifold, xi) -> PratoQuasifold:
    """Translate by -xi: constants become c - pi^*(xi)."""
    xi = q.ctx.vector(xi)
    p = q.polytope
    shifted = SimplePolytope(p.ctx, p.n, p.normals, p.slack(xi))
    return _build(shifted, q.certified_simple, base=q.to_root(xi), embed=q.embed)


def _matmul(a: AlgebraMatrix, b: AlgebraMatrix) -> AlgebraMatrix:
    cols = b.transpose().rows
    rows = [[dot(r, c, a.ctx) for c in cols] for r in a.rows]
    return AlgebraMatrix.from_rows(a.ctx, rows, ncols=b.ncols)


def reduce_in_stages(q: PratoQuasifold, h: SubalgebraData, level, complement=None) -> PratoQuasifold:
    """Reduce the residual torus action by ``h`` at ``level``.

    The quotient t/h is realised by a matrix ``Q`` whose rows span the
    covectors vanishing on ``h`` (the canonical kernel basis unless
    ``complement`` is given).  The result is again a Prato presentation over
    the same R^d, with normals ``Q v_i`` and constants ``c - pi^*(level)``;
    its kernel is ker(pi) plus a lift of ``h``.
    """
    ctx, n = q.ctx, q.n
    level = ctx.vector(level)
    if len(level) != n:
        raise ShapeMismatch(f"level must have {n} coordinates")
    hvecs = [ctx.vector(v) for v in h.basis]
    if any(len(v) != n for v in hvecs):
        raise ShapeMismatch(f"subalgebra vectors must have {n} coordinates")
    k = len(hvecs)
    hm = AlgebraMatrix.from_rows(ctx, hvecs, ncols=n)
    if hm.rank() != k:
        raise NotTransverse("the level conditions defined by the subalgebra are not independent")

    if complement is None:
        qrows = kernel_basis(hm)
    else:
        qrows = [ctx.vector(r) for r in complement]
        if len(qrows) != n - k:
            raise ShapeMismatch(f"complement needs {n - k} rows")
        for r in qrows:
            if any(not dot(v, r, ctx).is_zero() for v in hvecs):
                raise NotTransverse("complement rows must vanish on the subalgebra")
        if qrows and AlgebraMatrix.from_rows(ctx, qrows, ncols=n).rank() != n - k:
            raise NotTransverse("complement rows are dependent")
    qmat = AlgebraMatrix.from_rows(ctx, qrows, ncols=n)

    p = q.polytope
    normals = tuple(qmat.apply(v) for v in p.normals)
    reduced = SimplePolytope(ctx, n - k, normals, p.slack(level))
    try:
        out = _build(
            reduced,
            strict=False,
            base=q.to_root(level),
            embed=_matmul(q.embed, qmat.transpose()),
        )
    except Empty as exc:
        raise EmptySlice("the level set misses the polytope") from exc

    # the new kernel is ker(pi) together with lifts of h along pi
    lift_solver = ImageSolver(q.pi)
    for x in hvecs:
        y = lift_solver.solve(x)
        assert y is not None and all(e.is_zero() for e in out.pi.apply(y))
    for hv in q.kernel:
        assert all(e.is_zero() for e in out.pi.apply(hv))
    assert len(out.kernel) == len(q.kernel) + k
    return out
