"""Cross-checks between independent computations, as pass/fail reports.

Every comparison is an exact integer equality.  Reports are plain data;
``CheckReport.to_json`` gives the byte-stable form used by the CLI.
"""
from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .algebra import QQ, AlgebraMatrix, ImageSolver, dot, format_element, kernel_basis, rref
from .charring import (
    SubalgebraData,
    TorusCharacter,
    char_product,
    finite_group_invariants,
    invariant_part,
    restrict_along,
)
from .errors import QfoldError, ShapeMismatch, UnsupportedType
from .localization import (
    localized_character,
    localized_multiplicity,
    random_generic_beta,
    vertex_data,
)
from .rootdata import IrrepLabel, RootDatum, decompose_into_irreps
from .toric import (
    PratoQuasifold,
    SimplePolytope,
    _box_bounds,
    bohr_sommerfeld,
    build_quasifold,
    quantize,
    reduce_in_stages,
    shift,
)

MAX_COUNTEREXAMPLES = 10


def fmt(x):
    """JSON form of a scalar: integers as ints, everything else as a string."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if x.is_integer():
        return int(x.coeffs[0])
    return format_element(x)


def fmt_vec(v):
    return [fmt(x) for x in v]


def digest(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def polytope_doc(p: SimplePolytope) -> dict:
    """Enclosure-free description: refining enclosures leaves it unchanged."""
    return {
        "generators": list(p.ctx.names),
        "table": [[[str(c) for c in e] for e in row] for row in p.ctx.table],
        "n": p.n,
        "normals": [[[str(c) for c in x.coeffs] for x in v] for v in p.normals],
        "constants": [[str(c) for c in x.coeffs] for x in p.constants],
    }


@dataclass
class CheckReport:
    name: str
    digest: str
    rows: list  # [{"weight": ..., "expected": int, "actual": int}]
    counterexamples: list
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if not self.counterexamples else "fail"

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "digest": self.digest,
            "verdict": self.verdict,
            "seed": self.seed,
            "details": self.details,
            "rows": self.rows,
            "counterexamples": self.counterexamples,
        }


def _report(name, inputs, rows, seed=None, details=None, extra_failures=()):
    bad = [r for r in rows if r["expected"] != r["actual"]]
    bad.extend(extra_failures)
    return CheckReport(name, digest(inputs), rows, bad[:MAX_COUNTEREXAMPLES], seed, details or {})


def _counts(weights):
    return Counter(tuple(fmt_vec(w)) for w in weights)


def _compare_counters(expected: Counter, actual: Counter):
    keys = sorted(set(expected) | set(actual), key=lambda k: json.dumps(k))
    return [{"weight": list(k), "expected": expected[k], "actual": actual[k]} for k in keys]


# ---------------------------------------------------------------------------
# quantization = Bohr-Sommerfeld count


def bs_candidates(q: PratoQuasifold):
    """All xi in the polytope with integral slack on a fixed set of n independent facets.

    The slack on those facets ranges over the vertex box inflated by one, so
    every Bohr-Sommerfeld point is included together with nearby points that
    are not.
    """
    ctx = q.ctx
    bounds = _box_bounds(q)
    _, pivots = rref(q.pi)
    solver = ImageSolver(AlgebraMatrix.from_rows(ctx, [q.polytope.normals[i] for i in pivots], ncols=q.n))
    out = []
    for s in product(*(range(-1, bounds[i] + 2) for i in pivots)):
        xi = solver.solve([q.constants[i] - x for i, x in zip(pivots, s)])
        if xi is not None and q.polytope.contains(xi):
            out.append(xi)
    return out


def qr0_check(q: PratoQuasifold) -> CheckReport:
    """Quantization multiplicity equals the Bohr-Sommerfeld indicator, weight by weight."""
    result = quantize(q)
    mult = Counter(e.xi for e in result.entries)
    grid = bs_candidates(q)
    seen = set(grid)
    points = grid + [xi for xi in mult if xi not in seen]
    rows = []
    for xi in points:
        rows.append({"weight": fmt_vec(xi), "expected": bohr_sommerfeld(q, xi), "actual": mult[xi]})
    rows.sort(key=lambda r: json.dumps(r["weight"]))
    details = {"dimension": result.dimension, "candidates": len(grid)}
    return _report("qr0", {"polytope": polytope_doc(q.polytope)}, rows, details=details)


def shift_check(q: PratoQuasifold, xi) -> CheckReport:
    xi = q.ctx.vector(xi)
    before = bohr_sommerfeld(q, xi)
    moved = shift(q, xi)
    zero = q.ctx.vector([0] * q.n)
    after = bohr_sommerfeld(moved, zero)
    at_zero = sum(1 for e in quantize(moved).entries if e.xi == zero)
    rows = [
        {"weight": ["bohr_sommerfeld"], "expected": before, "actual": after},
        {"weight": ["multiplicity_at_0"], "expected": before, "actual": at_zero},
    ]
    inputs = {"polytope": polytope_doc(q.polytope), "point": fmt_vec(xi)}
    return _report("shift", inputs, rows)


def _h_vectors(q, h: SubalgebraData):
    return [q.ctx.vector(v) for v in h.basis]


def _slice(q, h, level):
    """Root weights of quantize(q) on the slice <xi - level, h> = 0."""
    ctx = q.ctx
    hv = _h_vectors(q, h)
    level = ctx.vector(level)
    entries = quantize(q).entries
    shifted = TorusCharacter.from_mapping(
        Counter(tuple(x - y for x, y in zip(e.xi, level)) for e in entries), q.n
    )
    kept = invariant_part(shifted, SubalgebraData(tuple(hv), ctx))
    weights = []
    for w, m in kept.terms:
        xi = tuple(x + y for x, y in zip(w, level))
        weights.extend([q.to_root(xi)] * m)
    return weights


def stages_check(q: PratoQuasifold, h: SubalgebraData, level, complement=None) -> CheckReport:
    """quantize(reduce(q, h, level)) equals the slice of quantize(q), in the original t*."""
    reduced = reduce_in_stages(q, h, level, complement)
    lhs = [e.root_xi for e in quantize(reduced).entries]
    rhs = _slice(q, h, level)
    rows = _compare_counters(_counts(rhs), _counts(lhs))
    inputs = {
        "polytope": polytope_doc(q.polytope),
        "subalgebra": [fmt_vec(q.ctx.vector(v)) for v in h.basis],
        "level": fmt_vec(q.ctx.vector(level)),
    }
    return _report("stages", inputs, rows, details={"dimension": len(lhs)})


def associativity_check(q: PratoQuasifold, h1: SubalgebraData, level1, h2: SubalgebraData, level2) -> CheckReport:
    """Two successive reductions against one reduction by the combined subalgebra.

    ``h2`` and ``level2`` are given in the coordinates of the first reduced
    presentation.  They are pulled back through the canonical quotient map
    ``Q`` (rows spanning the annihilator of ``h1``): ``h2`` lifts to any
    preimage under ``Q`` and the combined level is ``level1 + Q^T level2``.
    """
    ctx = q.ctx
    h1v = _h_vectors(q, h1)
    level1 = ctx.vector(level1)
    level2 = ctx.vector(level2)
    first = reduce_in_stages(q, h1, level1)
    two_step = reduce_in_stages(first, h2, level2)

    qrows = kernel_basis(AlgebraMatrix.from_rows(ctx, h1v, ncols=q.n)) if h1v else [
        tuple(ctx.rational(int(i == j)) for j in range(q.n)) for i in range(q.n)
    ]
    qmat = AlgebraMatrix.from_rows(ctx, qrows, ncols=q.n)
    lift = ImageSolver(qmat)
    lifted = []
    for v in h2.basis:
        x = lift.solve(ctx.vector(v))
        if x is None:
            raise ShapeMismatch("second-stage subalgebra does not lie in the quotient")
        lifted.append(x)
    combined_level = tuple(a + b for a, b in zip(level1, qmat.transpose().apply(level2)))
    one_step = reduce_in_stages(q, SubalgebraData(tuple(h1v) + tuple(lifted), ctx), combined_level)

    lhs = [e.root_xi for e in quantize(two_step).entries]
    rhs = [e.root_xi for e in quantize(one_step).entries]
    rows = _compare_counters(_counts(rhs), _counts(lhs))
    inputs = {
        "polytope": polytope_doc(q.polytope),
        "stage1": [fmt_vec(v) for v in h1v],
        "level1": fmt_vec(level1),
        "stage2": [fmt_vec(ctx.vector(v)) for v in h2.basis],
        "level2": fmt_vec(level2),
    }
    return _report("associativity", inputs, rows, details={"dimension": len(lhs)})


# ---------------------------------------------------------------------------
# localization


def localization_check(p: SimplePolytope, trials: int, seed: int) -> CheckReport:
    """Signed vertex-cone counts against the inequality test, for two generic betas."""
    vd = vertex_data(p)
    rng = random.Random(seed)
    betas = [random_generic_beta(vd, rng), random_generic_beta(vd, rng)]
    lo = [x - 1 for x in vd.lower]
    hi = [x + 1 for x in vd.upper]
    rows = []
    extra = []
    for _ in range(trials):
        lam = tuple(rng.randint(a, b) for a, b in zip(lo, hi))
        truth = int(p.contains(lam))
        m = [localized_multiplicity(vd, beta, lam) for beta in betas]
        rows.append({"weight": list(lam), "expected": truth, "actual": m[0]})
        if m[1] != m[0]:
            extra.append({"weight": list(lam), "expected": m[0], "actual": m[1], "beta": list(betas[1])})
    details = {"betas": [list(b) for b in betas], "trials": trials}
    return _report("localization", {"polytope": polytope_doc(p)}, rows, seed, details, extra)


# ---------------------------------------------------------------------------
# finite quotients


def _gamma_invariant(q, root_xi, b, orders, pairing) -> bool:
    """A pairing row of width n acts on t* weights, one of width d on ambient weights c - b."""
    if len(pairing[0]) == len(root_xi):
        w = root_xi
    elif len(pairing[0]) == q.d:
        w = tuple(c - x for c, x in zip(q.constants, b))
    else:
        raise ShapeMismatch(f"pairing rows need {len(root_xi)} (t*) or {q.d} (ambient) entries")
    char = TorusCharacter.from_mapping({tuple(w): 1}, len(w))
    return bool(finite_group_invariants(char, orders, pairing).terms)


def suspension_check(q: PratoQuasifold, orders, pairing, h: SubalgebraData, level) -> CheckReport:
    """Gamma-invariants then reduction equals reduction then Gamma-invariants."""
    orders = list(orders)
    pairing = [tuple(r) for r in pairing]
    ctx = q.ctx
    level = ctx.vector(level)
    hv = _h_vectors(q, h)

    lhs = []
    for e in quantize(q).entries:
        root = q.to_root(e.xi)
        if not pairing or _gamma_invariant(q, root, e.b, orders, pairing):
            if all(dot([x - y for x, y in zip(e.xi, level)], v, ctx).is_zero() for v in hv):
                lhs.append(root)

    reduced = reduce_in_stages(q, h, level)
    rhs = [
        e.root_xi
        for e in quantize(reduced).entries
        if not pairing or _gamma_invariant(q, e.root_xi, e.b, orders, pairing)
    ]

    rows = _compare_counters(_counts(lhs), _counts(rhs))
    inputs = {
        "polytope": polytope_doc(q.polytope),
        "orders": orders,
        "pairing": [list(r) for r in pairing],
        "subalgebra": [fmt_vec(v) for v in hv],
        "level": fmt_vec(level),
    }
    return _report("suspension", inputs, rows, details={"dimension": len(rhs)})


# ---------------------------------------------------------------------------
# coadjoint orbits of SU(2)


def coadjoint_character(k: int) -> TorusCharacter:
    """T-character of the level-k quantization of CP^1, built by localization.

    The interval [0, k] gives weights 0..k; doubling and shifting by -k puts
    them at k, k-2, ..., -k in the weight lattice of SU(2).
    """
    p = SimplePolytope.from_data(QQ, 1, [[-1], [1]], [0, k])
    vd = vertex_data(p)
    char = localized_character(vd, (1,), [(-1, k + 1)])
    doubled = restrict_along(char, [[2]])
    return char_product(doubled, TorusCharacter.from_mapping({(-k,): 1}, 1))


def coadjoint_demo(d: RootDatum, k: int) -> CheckReport:
    if d.rank != 1 or d.center_rank != 0 or d.cartan != ((2,),):
        raise UnsupportedType("the coadjoint demo needs the A1 root datum")
    if k < 0:
        raise ShapeMismatch("k must be nonnegative")
    char = coadjoint_character(k)
    got = decompose_into_irreps(d, char)
    want = {IrrepLabel((k,)): 1}
    labels = sorted(set(got) | set(want))
    rows = [
        {"weight": list(lab.weight), "expected": want.get(lab, 0), "actual": got.get(lab, 0)}
        for lab in labels
    ]
    details = {"character": char.to_json()}
    return _report("coadjoint", {"datum": d.label, "k": k}, rows, details=details)


# ---------------------------------------------------------------------------
# random fixtures


def random_simple_polytope(rng: random.Random, max_n: int = 3, max_d: int = 7, bound: int = 5, max_box: int = 2000):
    """Rejection-sample a bounded, simple, full-dimensional rational polytope.

    Normals have integer entries in [-bound, bound]; constants lie in
    (0, bound], mostly integers with about one in five a half-integer, so
    the origin is interior.  Samples are
    rejected unless every inequality defines a facet and the pivot grid used
    by :func:`bs_candidates` has at most ``max_box`` points.
    """
    while True:
        n = rng.randint(1, max_n)
        d = rng.randint(n + 1, max_d)
        normals = []
        for _ in range(d):
            v = [rng.randint(-bound, bound) for _ in range(n)]
            if any(v):
                normals.append(v)
        if len(normals) != d:
            continue
        consts = [
            Fraction(rng.randint(1, bound)) if rng.random() < 0.8 else Fraction(2 * rng.randint(0, bound - 1) + 1, 2)
            for _ in range(d)
        ]
        p = SimplePolytope.from_data(QQ, n, normals, consts)
        try:
            q = build_quasifold(p)
        except QfoldError:
            continue
        active = set()
        for _, facets in q.vertex_table:
            active.update(facets)
        if len(active) != d or len(q.vertices) < n + 1:
            continue
        bounds = _box_bounds(q)
        _, pivots = rref(q.pi)
        size = 1
        for i in pivots:
            size *= bounds[i] + 3
        if size > max_box:
            continue
        return q


__all__ = [
    "CheckReport",
    "digest",
    "polytope_doc",
    "bs_candidates",
    "qr0_check",
    "shift_check",
    "stages_check",
    "associativity_check",
    "localization_check",
    "suspension_check",
    "coadjoint_character",
    "coadjoint_demo",
    "random_simple_polytope",
]
