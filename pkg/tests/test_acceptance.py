"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed even without ``-s``.
"""
import copy
import json
import random
import time
from collections import Counter
from fractions import Fraction

import pytest
from conftest import DOCS, cp2_polytope, interval_polytope, quasi_interval_polytope, square_polytope
from oracles import lattice_points, quantize_by_box

from qfold import cli
from qfold.charring import SubalgebraData, TorusCharacter
from qfold.rootdata import (
    IrrepLabel,
    build_root_datum,
    decompose_into_irreps,
    g_invariant_multiplicity,
    irrep_weight_multiplicities,
    weyl_dimension,
)
from qfold.toric import build_quasifold, quantize
from qfold.verify import (
    associativity_check,
    coadjoint_demo,
    localization_check,
    qr0_check,
    random_simple_polytope,
    stages_check,
)

# time limits (seconds)
C1_LIMIT = 1.0
C3_LIMIT = 30.0
C4_LIMIT = 5.0
C5_LIMIT = 5.0

C3_RANDOM = 50
C3_SEED = 2026
C4_TRIALS = 200


def announce(capsys, number, ok, text):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {text}")


def test_criterion_1_cp2_counts(capsys):
    start = time.perf_counter()
    dims = [quantize(build_quasifold(cp2_polytope(k))).dimension for k in range(13)]
    elapsed = time.perf_counter() - start
    expected = [(k + 1) * (k + 2) // 2 for k in range(13)]
    oracle = [len(lattice_points([(-1, 0), (0, -1), (1, 1)], (0, 0, k), k + 1)) for k in range(13)]
    ok = dims == expected == oracle and elapsed < C1_LIMIT
    announce(capsys, 1, ok, f"CP2 k=0..12 dimensions {dims} vs (k+1)(k+2)/2 and lattice oracle; {elapsed:.3f}s < {C1_LIMIT}s")
    assert dims == expected == oracle
    assert elapsed < C1_LIMIT


def test_criterion_2_quasi_interval(capsys):
    q = build_quasifold(quasi_interval_polytope())
    res = quantize(q)
    weights = {e.xi for e in res.entries}
    oracle = quantize_by_box(q)
    # every number that entered the computation is an exact rational
    exact = all(
        isinstance(c, Fraction)
        for e in res.entries
        for x in e.xi + q.constants
        for c in x.coeffs
    ) and all(isinstance(c, Fraction) for pair in q.ctx.enclosures for c in pair)
    ok = res.dimension == 1 and weights == {(1,)} and [(e.b, e.xi) for e in res.entries] == oracle and exact
    announce(capsys, 2, ok, f"quasi-interval dimension {res.dimension}, weights {sorted(str(x[0]) for x in weights)}, exhaustive b-search agrees, exact arithmetic only")
    assert res.dimension == 1
    assert weights == {(1,)}
    assert [(e.b, e.xi) for e in res.entries] == oracle
    assert exact


def test_criterion_3_qr0_suite(capsys):
    start = time.perf_counter()
    named = {
        "CP2 k=3": (build_quasifold(cp2_polytope(3)), 10),
        "quasi-interval": (build_quasifold(quasi_interval_polytope()), 1),
        "interval k=0": (build_quasifold(interval_polytope(0)), 1),
    }
    failures = []
    for name, (q, dim) in named.items():
        rep = qr0_check(q)
        if not rep.passed or rep.details["dimension"] != dim:
            failures.append(name)
    rng = random.Random(C3_SEED)
    shapes = Counter()
    for i in range(C3_RANDOM):
        q = random_simple_polytope(rng)
        assert q.n <= 3 and q.d <= 7
        shapes[(q.n, q.d)] += 1
        rep = qr0_check(q)
        if not rep.passed:
            failures.append(f"random #{i}: {rep.counterexamples}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < C3_LIMIT
    announce(capsys, 3, ok, f"qr0_check on 3 fixtures + {C3_RANDOM} random polytopes (seed {C3_SEED}, shapes {dict(sorted(shapes.items()))}); {len(failures)} failures; {elapsed:.1f}s < {C3_LIMIT}s")
    assert not failures
    assert elapsed < C3_LIMIT


def test_criterion_4_localization(capsys):
    start = time.perf_counter()
    results = {}
    for name, p in (("interval k=7", interval_polytope(7)), ("CP2 k=4", cp2_polytope(4)), ("[0,1]^2", square_polytope())):
        rep = localization_check(p, C4_TRIALS, seed=17)
        assert len(rep.details["betas"]) == 2 and len(rep.rows) == C4_TRIALS
        results[name] = rep
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in results.values()) and elapsed < C4_LIMIT
    summary = ", ".join(f"{k}: {r.verdict} (betas {r.details['betas']})" for k, r in results.items())
    announce(capsys, 4, ok, f"localization vs lattice indicator, {C4_TRIALS} weights x 2 betas each; {summary}; {elapsed:.2f}s < {C4_LIMIT}s")
    for rep in results.values():
        assert rep.passed, rep.counterexamples
    assert elapsed < C4_LIMIT


def test_criterion_5_weyl_machinery(capsys):
    start = time.perf_counter()
    a1, a2 = build_root_datum("A", 1), build_root_datum("A", 2)
    labels = [(a1, (k,)) for k in range(9)] + [(a2, (a, b)) for a in range(5) for b in range(5) if a + b <= 4]
    problems = []
    chars = {}
    for d, lam in labels:
        char = irrep_weight_multiplicities(d, IrrepLabel(lam))
        chars[(d.label, lam)] = char
        if char.dimension() != weyl_dimension(d, lam):
            problems.append(f"dim {d.label}{lam}")
        if g_invariant_multiplicity(d, char) != int(not any(lam)):
            problems.append(f"invariants {d.label}{lam}")
    rng = random.Random(5)
    for _ in range(20):
        d = rng.choice([a1, a2])
        pool = [lam for dd, lam in labels if dd is d]
        combo = {IrrepLabel(lam): rng.randint(1, 3) for lam in rng.sample(pool, 3)}
        acc = Counter()
        for lab, n in combo.items():
            for w, m in chars[(d.label, lab.highest)].terms:
                acc[w] += n * m
        if decompose_into_irreps(d, TorusCharacter.from_mapping(acc, d.weight_rank)) != dict(sorted(combo.items())):
            problems.append(f"round trip {combo}")
    for k in range(6):
        if not coadjoint_demo(a1, k).passed:
            problems.append(f"coadjoint k={k}")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < C5_LIMIT
    announce(capsys, 5, ok, f"Freudenthal = Weyl dimension, invariants = [lambda=0], 20 decomposition round trips, coadjoint k<=5; problems {problems}; {elapsed:.2f}s < {C5_LIMIT}s")
    assert not problems
    assert elapsed < C5_LIMIT


def test_criterion_6_stages_computed(capsys):
    """The part of the criterion that holds: pairing 0, and associativity."""
    q = build_quasifold(cp2_polytope(2))
    h = SubalgebraData([(1, -1)])
    rep0 = stages_check(q, h, [0, 0])
    rep1 = stages_check(q, h, [1, 0])
    w0 = [r["weight"] for r in rep0.rows]
    w1 = [r["weight"] for r in rep1.rows]
    big = build_quasifold(cp2_polytope(6))
    assoc = [
        associativity_check(big, SubalgebraData([(1, -1)]), [1, 0], SubalgebraData([(1,)]), [1]),
        associativity_check(big, SubalgebraData([]), [0, 0], SubalgebraData([(1, 1)]), [2, 0]),
        associativity_check(q, SubalgebraData([(1, -1)]), [0, 0], SubalgebraData([(1,)]), [0]),
    ]
    ok = rep0.passed and rep1.passed and w0 == [[0, 0], [1, 1]] and w1 == [[1, 0]] and all(a.passed for a in assoc)
    announce(capsys, "6 (computed)", ok, f"stages_check pairing 0 -> {w0} (dimension {len(w0)}), pairing 1 -> {w1} (dimension {len(w1)}); associativity on 3 fixtures")
    assert rep0.passed and rep1.passed
    assert w0 == [[0, 0], [1, 1]]
    assert w1 == [[1, 0]]
    assert all(a.passed for a in assoc)


@pytest.mark.xfail(strict=True, reason="the stated pairing-1 weight (2,1) lies outside the k=2 simplex; see the decisions ledger")
def test_criterion_6_as_stated(capsys):
    q = build_quasifold(cp2_polytope(2))
    rep = stages_check(q, SubalgebraData([(1, -1)]), [1, 0])
    weights = [r["weight"] for r in rep.rows]
    ok = rep.details["dimension"] == 2 and weights == [[1, 0], [2, 1]]
    announce(capsys, 6, ok, f"stated: dimensions 2 and 2 with pairing-1 weights (1,0),(2,1); computed pairing-1 weights {weights} (x+y<=2 excludes (2,1))")
    assert ok


def _halve(doc, times):
    out = copy.deepcopy(doc)
    for name, (lo, hi) in out["algebra"]["enclosures"].items():
        lo, hi = Fraction(lo), Fraction(hi)
        for _ in range(times):
            mid = (lo + hi) / 2
            lo, hi = (lo, mid) if mid * mid > 2 else (mid, hi)
        out["algebra"]["enclosures"][name] = [str(lo), str(hi)]
    return out


SQRT2 = {"generators": ["1", "s2"], "table": [["s2", "s2", ["2", "0"]]], "enclosures": {"s2": ["7/5", "3/2"]}}

C7_RUNS = [
    ("quantize", "cp2_k2.json"),
    ("quantize", "quasi_interval.json"),
    ("bohr-sommerfeld", "quasi_interval.json"),
    ("bohr-sommerfeld", "interval_k2.json"),
    ("reduce-stages", "cp2_k2_stages.json"),
    ("reduce-stages", "cp2_k2_stages_level1.json"),
    ("localize", "interval_k2.json"),
    ("check-qr0", "cp2_k4.json"),
    ("check-qr0", "quasi_interval.json"),
    ("check-shift", "interval_k2.json"),
    ("check-shift", "quasi_interval.json"),
    ("check-stages", "cp2_k2_stages.json"),
    ("check-stages", "cp2_k2_stages_level1.json"),
    ("check-localization", "square.json"),
    ("check-suspension", "interval_k4_suspension.json"),
]


def test_criterion_7_enclosure_robustness(tmp_path, capsys):
    mismatches = []
    runs = 0
    for command, name in C7_RUNS:
        doc = json.loads((DOCS / name).read_text())
        # rational fixtures are also run inside the sqrt(2) number ring
        doc.setdefault("algebra", copy.deepcopy(SQRT2))
        base = tmp_path / f"base_{name}"
        base.write_text(json.dumps(doc))
        for times in (1, 2, 5):
            halved = tmp_path / f"halved{times}_{name}"
            halved.write_text(json.dumps(_halve(doc, times)))
            for fmt in ("json", "table"):
                a = tmp_path / "a.out"
                b = tmp_path / "b.out"
                code_a = cli.main([command, str(base), "--format", fmt, "--output", str(a)])
                code_b = cli.main([command, str(halved), "--format", fmt, "--output", str(b)])
                runs += 1
                if code_a != 0 or code_a != code_b or a.read_bytes() != b.read_bytes():
                    mismatches.append((command, name, times, fmt))
    ok = not mismatches
    announce(capsys, 7, ok, f"{runs} document pairs with enclosures halved 1, 2 and 5 times; byte mismatches {mismatches}")
    assert not mismatches
