import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qfold.algebra import QQ, make_algebra  # noqa: E402
from qfold.toric import SimplePolytope, build_quasifold  # noqa: E402

DOCS = Path(__file__).resolve().parent.parent / "docs" / "inputs"


def sqrt2_context(lo="7/5", hi="3/2", budget=64):
    return make_algebra(["1", "s2"], [[[1, 0], [0, 1]], [[0, 1], [2, 0]]], [(1, 1), (lo, hi)], budget)


def golden_context():
    # phi^2 = phi + 1
    return make_algebra(["1", "phi"], [[[1, 0], [0, 1]], [[0, 1], [1, 1]]], [(1, 1), ("8/5", "13/8")])


def cp2_polytope(k, ctx=QQ):
    return SimplePolytope.from_data(ctx, 2, [[-1, 0], [0, -1], [1, 1]], [0, 0, k])


def interval_polytope(k, ctx=QQ):
    return SimplePolytope.from_data(ctx, 1, [[-1], [1]], [0, k])


def square_polytope():
    return SimplePolytope.from_data(QQ, 2, [[-1, 0], [0, -1], [1, 0], [0, 1]], [0, 0, 1, 1])


def quasi_interval_polytope(ctx=None):
    ctx = ctx or sqrt2_context()
    r = ctx.gen("s2")
    return SimplePolytope.from_data(ctx, 1, [[-1], [r]], [0, r])


@pytest.fixture(scope="session")
def frozen():
    return json.loads((Path(__file__).parent / "data" / "frozen.json").read_text())


@pytest.fixture
def s2():
    return sqrt2_context()


@pytest.fixture
def cp2():
    return lambda k: build_quasifold(cp2_polytope(k))


@pytest.fixture
def interval():
    return lambda k: build_quasifold(interval_polytope(k))


@pytest.fixture
def quasi_interval():
    return build_quasifold(quasi_interval_polytope())
