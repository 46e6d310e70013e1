"""Fixed-point localization for rational Delzant polytopes.

Each vertex contributes a shifted lattice cone spanned by its edge
weights.  Edges pairing negatively with the polarizing vector ``beta`` are
flipped: the geometric series ``1/(1 - e^a)`` is rewritten as
``-e^{-a}/(1 - e^{-a})``, so the cone points along ``-a``, starts one step
away from the vertex and carries a sign.  The signed sum of cone indicators
is the lattice-point indicator of the polytope.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm

from .charring import TorusCharacter
from .errors import (
    IrrationalInput,
    NonGenericBeta,
    NonIntegralVertex,
    NotDelzant,
    ShapeMismatch,
    SupportSpill,
)
from .toric import SimplePolytope


def _rational_matrix(rows):
    out = []
    for row in rows:
        r = []
        for x in row:
            if not x.is_rational():
                raise IrrationalInput(
                    "polytope data is irrational; localization covers rational Delzant input only"
                )
            r.append(x.rational_value())
        out.append(r)
    return out


def _inverse(mat):
    """Inverse of a square Fraction matrix, or None if singular."""
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            return None
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _primitive(vec):
    den = lcm(*(x.denominator for x in vec))
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints)


@dataclass(frozen=True)
class FixedVertex:
    weight: tuple  # lambda_p in Z^n
    edges: tuple  # primitive edge generators, a Z-basis of Z^n
    coords: tuple  # integer inverse of the edge matrix: row j gives the alpha_j coordinate
    facets: tuple  # active facets defining this vertex


@dataclass(frozen=True)
class VertexFixedData:
    n: int
    vertices: tuple
    lower: tuple  # integer bounding box of the polytope
    upper: tuple


def vertex_data(p: SimplePolytope) -> VertexFixedData:
    """Integral vertices and primitive edge generators of a rational Delzant polytope.

    Every nonsingular set of ``n`` facets whose intersection point lies in the
    polytope contributes one cone.  For a simple full-dimensional polytope
    these are exactly its vertices; for a polytope degenerated to lower
    dimension (e.g. a dilation by 0) each vertex of the nearby simple
    polytope is kept, so the signed cone sum stays valid.
    """
    n = p.n
    normals = _rational_matrix(p.normals)
    consts = _rational_matrix([p.constants])[0]

    bases = []
    points = set()
    for sub in combinations(range(p.d), n):
        inv = _inverse([normals[i] for i in sub])
        if inv is None:
            continue
        xi = tuple(sum(inv[r][j] * consts[sub[j]] for j in range(n)) for r in range(n))
        slack = [c - sum(a * x for a, x in zip(v, xi)) for v, c in zip(normals, consts)]
        if any(s < 0 for s in slack):
            continue
        active = tuple(i for i, s in enumerate(slack) if s == 0)
        bases.append((sub, inv, xi, active))
        points.add(xi)

    full = _full_dimensional(points, n)
    out = []
    for sub, inv, xi, active in bases:
        if full and len(active) != n:
            raise NotDelzant(f"vertex {tuple(str(x) for x in xi)} is not simple")
        if any(x.denominator != 1 for x in xi):
            raise NonIntegralVertex(f"vertex {tuple(str(x) for x in xi)} is not integral")
        # moving along -column j of inv keeps the other facets tight and loosens facet j
        edges = tuple(_primitive([-inv[r][j] for r in range(n)]) for j in range(n))
        emat = [[Fraction(e[r]) for e in edges] for r in range(n)]
        einv = _inverse(emat)
        if einv is None or any(x.denominator != 1 for row in einv for x in row):
            raise NotDelzant(f"edges at vertex {tuple(str(x) for x in xi)} are not a lattice basis")
        out.append(
            FixedVertex(
                tuple(int(x) for x in xi),
                edges,
                tuple(tuple(int(x) for x in row) for row in einv),
                sub,
            )
        )
    if not out:
        raise NotDelzant("the polytope has no vertices")
    out.sort(key=lambda v: (v.weight, v.facets))
    lower = tuple(min(v.weight[i] for v in out) for i in range(n))
    upper = tuple(max(v.weight[i] for v in out) for i in range(n))
    return VertexFixedData(n, tuple(out), lower, upper)


def _full_dimensional(points, n):
    points = list(points)
    if len(points) <= n:
        return False
    base = points[0]
    rows = [[x - y for x, y in zip(pt, base)] for pt in points[1:]]
    rank = 0
    cols = list(range(n))
    for c in cols:
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank == n


def _pair(u, v):
    return sum(a * b for a, b in zip(u, v))


def check_generic(vd: VertexFixedData, beta) -> tuple:
    beta = tuple(beta)
    if len(beta) != vd.n:
        raise ShapeMismatch(f"beta needs {vd.n} entries")
    for v in vd.vertices:
        for a in v.edges:
            if _pair(a, beta) == 0:
                raise NonGenericBeta(f"beta {beta} is orthogonal to edge {a} at {v.weight}")
    return beta


def _flips(vd, beta):
    return [tuple(_pair(a, beta) < 0 for a in v.edges) for v in vd.vertices]


def _multiplicity(vd, flips, lam):
    total = 0
    for v, fl in zip(vd.vertices, flips):
        diff = [x - y for x, y in zip(lam, v.weight)]
        inside = True
        for row, flipped in zip(v.coords, fl):
            x = _pair(row, diff)
            if (x > -1) if flipped else (x < 0):
                inside = False
                break
        if inside:
            total += -1 if sum(fl) % 2 else 1
    return total


def localized_multiplicity(vd: VertexFixedData, beta, lam) -> int:
    """Signed count of vertex cones containing ``lam``."""
    beta = check_generic(vd, beta)
    lam = tuple(lam)
    if len(lam) != vd.n:
        raise ShapeMismatch(f"weight needs {vd.n} entries")
    return _multiplicity(vd, _flips(vd, beta), lam)


def localized_character(vd: VertexFixedData, beta, box) -> TorusCharacter:
    """Localized multiplicities over an integer box ``[(lo, hi), ...]``.

    Raises :class:`SupportSpill` if a nonzero value shows up outside the
    polytope's bounding box.
    """
    beta = check_generic(vd, beta)
    box = [tuple(b) for b in box]
    if len(box) != vd.n:
        raise ShapeMismatch(f"box needs {vd.n} ranges")
    flips = _flips(vd, beta)
    out = {}
    for lam in product(*(range(lo, hi + 1) for lo, hi in box)):
        m = _multiplicity(vd, flips, lam)
        if not m:
            continue
        if any(x < lo or x > hi for x, lo, hi in zip(lam, vd.lower, vd.upper)):
            raise SupportSpill(f"multiplicity {m} at {lam} outside the polytope")
        out[lam] = m
    return TorusCharacter.from_mapping(out, vd.n)


def random_generic_beta(vd: VertexFixedData, rng: random.Random, bound: int = 20) -> tuple:
    """Draw integer vectors until one pairs nonzero with every edge."""
    while True:
        beta = tuple(rng.randint(-bound, bound) for _ in range(vd.n))
        try:
            return check_generic(vd, beta)
        except NonGenericBeta:
            continue


__all__ = [
    "FixedVertex",
    "VertexFixedData",
    "vertex_data",
    "check_generic",
    "localized_multiplicity",
    "localized_character",
    "random_generic_beta",
]
