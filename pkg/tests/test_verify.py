import json
import random
from fractions import Fraction

import pytest
from conftest import cp2_polytope, interval_polytope, square_polytope

from qfold.charring import SubalgebraData
from qfold.errors import UnsupportedType
from qfold.rootdata import IrrepLabel, build_root_datum
from qfold.toric import build_quasifold
from qfold.verify import (
    coadjoint_character,
    coadjoint_demo,
    localization_check,
    qr0_check,
    random_simple_polytope,
    shift_check,
    stages_check,
    suspension_check,
)


def test_qr0_fixtures(cp2, interval, quasi_interval):
    rep = qr0_check(cp2(3))
    assert rep.passed and rep.details["dimension"] == 10
    rep = qr0_check(quasi_interval)
    assert rep.passed and rep.details["dimension"] == 1
    rep = qr0_check(interval(0))
    assert rep.passed and rep.details["dimension"] == 1
    assert [r["weight"] for r in rep.rows if r["expected"]] == [[0]]


def test_qr0_includes_non_bohr_sommerfeld_points(quasi_interval):
    rows = qr0_check(quasi_interval).rows
    assert {"weight": [0], "expected": 0, "actual": 0} in rows


@pytest.mark.parametrize("xi,value", [(1, 1), (Fraction(1, 2), 0), (0, 1)])
def test_shift_check(interval, xi, value):
    rep = shift_check(interval(2), [xi])
    assert rep.passed
    assert rep.rows[0]["expected"] == value


def test_stages_check(cp2):
    q = cp2(2)
    h = SubalgebraData([(1, -1)])
    rep = stages_check(q, h, [0, 0])
    assert rep.passed and rep.details["dimension"] == 2
    assert [r["weight"] for r in rep.rows] == [[0, 0], [1, 1]]
    rep = stages_check(q, h, [1, 0])
    assert rep.passed and [r["weight"] for r in rep.rows] == [[1, 0]]
    assert stages_check(q, SubalgebraData([]), [0, 0]).passed


def test_localization_check_fixtures():
    for p, trials in ((cp2_polytope(4), 200), (interval_polytope(7), 100), (square_polytope(), 100)):
        rep = localization_check(p, trials, seed=3)
        assert rep.passed, rep.counterexamples
        assert len(rep.rows) == trials and rep.seed == 3


def test_localization_check_is_deterministic():
    a = localization_check(cp2_polytope(4), 50, seed=11).to_json()
    b = localization_check(cp2_polytope(4), 50, seed=11).to_json()
    assert json.dumps(a) == json.dumps(b)


@pytest.mark.parametrize("level,dim", [(2, 1), (1, 0)])
def test_suspension_check(interval, level, dim):
    rep = suspension_check(interval(4), [2], [[1]], SubalgebraData([(1,)]), [level])
    assert rep.passed and rep.details["dimension"] == dim


def test_suspension_with_trivial_group_is_stages(cp2):
    q = cp2(2)
    h = SubalgebraData([(1, -1)])
    rep = suspension_check(q, [], [], h, [0, 0])
    assert rep.passed
    assert [r["weight"] for r in rep.rows] == [r["weight"] for r in stages_check(q, h, [0, 0]).rows]


def test_suspension_on_ambient_weights(cp2):
    rep = suspension_check(cp2(3), [3], [[1, 1, 1]], SubalgebraData([(1, -1)]), [0, 0])
    assert rep.passed


@pytest.mark.parametrize("k", range(6))
def test_coadjoint_demo(k):
    rep = coadjoint_demo(build_root_datum("A", 1), k)
    assert rep.passed
    assert rep.rows == [{"weight": [k], "expected": 1, "actual": 1}]
    assert coadjoint_character(k).as_dict() == {(k - 2 * j,): 1 for j in range(k + 1)}


def test_coadjoint_demo_needs_a1():
    with pytest.raises(UnsupportedType):
        coadjoint_demo(build_root_datum("A", 2), 1)


def test_failing_report_lists_counterexamples():
    from qfold.verify import _report

    rows = [{"weight": [i], "expected": 0, "actual": 1} for i in range(15)]
    rep = _report("demo", {}, rows)
    assert rep.verdict == "fail" and len(rep.counterexamples) == 10


def test_random_polytopes_are_reproducible():
    a = random_simple_polytope(random.Random(5))
    b = random_simple_polytope(random.Random(5))
    assert a.polytope == b.polytope
    assert a.certified_simple
    assert IrrepLabel((0,)) < IrrepLabel((1,))
