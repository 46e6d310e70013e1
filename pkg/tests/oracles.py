"""Independent reference computations used by the tests.

Nothing here imports the package except ``quantize_by_box``, which is the
literal box enumeration and exists to be compared with the faster
parametrized enumeration.  Run this file to regenerate ``data/frozen.json``.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

FROZEN = Path(__file__).parent / "data" / "frozen.json"


def sqrt2_sign(p, q) -> int:
    """Sign of p + q*sqrt(2) for rationals p, q, by comparing squares."""
    p, q = Fraction(p), Fraction(q)
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if (p > 0) == (q > 0):
        return 1 if p > 0 else -1
    # opposite signs: compare p^2 with 2 q^2
    big_p = p * p > 2 * q * q
    if p > 0:
        return 1 if big_p else -1
    return -1 if big_p else 1


def lattice_points(normals, constants, radius):
    """Integer points with <x, v_i> <= c_i inside the cube [-radius, radius]^n."""
    n = len(normals[0])
    out = []
    for x in product(range(-radius, radius + 1), repeat=n):
        if all(sum(Fraction(a) * b for a, b in zip(v, x)) <= Fraction(c) for v, c in zip(normals, constants)):
            out.append(x)
    return out


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def _minors(normals):
    n = len(normals[0])
    return [_det([normals[i] for i in sub]) for sub in combinations(range(len(normals)), n)]


def unimodular(normals) -> bool:
    """Integer normals that generate Z^n as a lattice (gcd of maximal minors is 1)."""
    if any(Fraction(x).denominator != 1 for v in normals for x in v):
        return False
    g = 0
    for d in _minors(normals):
        g = math.gcd(g, int(d))
    return g == 1


def bohr_sommerfeld_grid(normals, constants, box, limit):
    """Points xi of the polytope with c - A xi integral, by scanning a fine grid.

    Every such xi solves n independent integral equations, so it lies in
    (1/D) Z^n with D the lcm of the nonzero maximal minors (times the
    denominators of the data).  ``box`` is an integer range per coordinate
    containing the polytope.  Returns None if the grid exceeds ``limit``.
    """
    den = 1
    for d in _minors(normals):
        if d:
            den = math.lcm(den, abs(d.numerator), d.denominator)
    for x in list(constants) + [y for v in normals for y in v]:
        den = math.lcm(den, Fraction(x).denominator)
    if math.prod((hi - lo) * den + 1 for lo, hi in box) > limit:
        return None
    out = []
    for k in product(*(range(lo * den, hi * den + 1) for lo, hi in box)):
        xi = tuple(Fraction(a, den) for a in k)
        slack = [Fraction(c) - sum(Fraction(a) * b for a, b in zip(v, xi)) for v, c in zip(normals, constants)]
        if all(s >= 0 and s.denominator == 1 for s in slack):
            out.append(xi)
    return sorted(out)


def cp2_count(k):
    return len(lattice_points([(-1, 0), (0, -1), (1, 1)], (0, 0, k), k + 2))


def sym_weights(basis, k):
    """Weights of Sym^k of the representation with weights ``basis``."""
    acc = Counter()
    r = len(basis[0])
    for combo in product(range(k + 1), repeat=len(basis)):
        if sum(combo) != k:
            continue
        w = tuple(sum(c * b[i] for c, b in zip(combo, basis)) for i in range(r))
        acc[w] += 1
    return acc


def _tensor(a, b):
    acc = Counter()
    for wa, ma in a.items():
        for wb, mb in b.items():
            acc[tuple(x + y for x, y in zip(wa, wb))] += ma * mb
    return acc


C3 = [(1, 0), (-1, 1), (0, -1)]
C3_DUAL = [(-1, 0), (1, -1), (0, 1)]


def a2_character(a, b):
    """V(a, b) of SU(3) as Sym^a(C^3) x Sym^b(C^3*) minus the trace part."""
    top = _tensor(sym_weights(C3, a), sym_weights(C3_DUAL, b))
    if a and b:
        top.subtract(_tensor(sym_weights(C3, a - 1), sym_weights(C3_DUAL, b - 1)))
    return {w: m for w, m in top.items() if m}


def a2_weyl_dim(a, b):
    return (a + 1) * (b + 1) * (a + b + 2) // 2


def a1_character(k):
    return {(k - 2 * j,): 1 for j in range(k + 1)}


def quantize_by_box(q):
    """Literal enumeration: every b in the vertex box, membership by preimage."""
    from qfold.algebra import image_preimage
    from qfold.toric import _box_bounds

    bounds = _box_bounds(q)
    pistar = q.pi.transpose()
    out = []
    for b in product(*(range(x + 1) for x in bounds)):
        xi = image_preimage(pistar, [c - x for c, x in zip(q.constants, b)])
        if xi is not None:
            out.append((b, xi))
    return out


def compute_frozen():
    return {
        "cp2_dims": [cp2_count(k) for k in range(13)],
        "interval_dims": [len(lattice_points([(-1,), (1,)], (0, k), k + 2)) for k in range(13)],
        "square_points": [list(x) for x in lattice_points([(-1, 0), (0, -1), (1, 0), (0, 1)], (0, 0, 1, 1), 3)],
        "a2_dims": {f"{a},{b}": sum(a2_character(a, b).values()) for a in range(5) for b in range(5) if a + b <= 4},
        "a2_adjoint": sorted([list(w), m] for w, m in a2_character(1, 1).items()),
        "sqrt2_signs": [sqrt2_sign(p, q) for p, q in [(-1, 1), (3, -2), (-3, 2), (Fraction(7, 5), -1), (Fraction(3, 2), -1)]],
        "binomial_check": [math.comb(k + 2, 2) for k in range(13)],
    }


if __name__ == "__main__":
    FROZEN.write_text(json.dumps(compute_frozen(), indent=1) + "\n")
