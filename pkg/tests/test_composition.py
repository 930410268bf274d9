import random
from fractions import Fraction

import pytest

from treeshift.composition import TruncationTooSmallError, alpha_uniqueness, build_alpha, unitary_check
from treeshift.construct import main_example
from treeshift.shift import FiniteVector, WeightedShift
from treeshift.tree import INF, Br, Neg, TreeModel


@pytest.fixture(scope="module")
def rootless():
    S, _ = main_example(kappa=INF, truncation=4)
    return S


def test_alpha_recursion(rootless):
    space = build_alpha(rootless, Neg(0), 3)
    assert space.reduced[Neg(0)] == 1
    # alpha(-1) = alpha(0) / lambda_0^2 = gamma_{-1} / gamma_0
    assert space.reduced[Neg(1)] == 16
    for v in (Br(1, 2), Br(3, 3)):
        p = Br(v.i, v.j - 1)
        assert space.reduced[v] == rootless.reduced_sq(v) * space.reduced[p]


def test_rooted_tree_refused():
    S, _ = main_example(kappa=2)
    with pytest.raises(ValueError):
        build_alpha(S, Neg(0), 3)


def test_anchor_outside_truncation(rootless):
    with pytest.raises(ValueError):
        build_alpha(rootless, Br(1, 9), 3)


def test_unitary_check_random(rootless):
    space = build_alpha(rootless, Neg(0), 4)
    rng = random.Random(7)
    pool = [v for v in space.vertices if not space.is_frontier(v)]
    for _ in range(10):
        f = FiniteVector({v: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for v in rng.sample(pool, 5)})
        assert unitary_check(rootless, space, f).ok


def test_empty_vector_is_trivial(rootless):
    space = build_alpha(rootless, Neg(0), 2)
    assert unitary_check(rootless, space, FiniteVector({})).ok


def test_frontier_support_refused(rootless):
    space = build_alpha(rootless, Neg(0), 2)
    with pytest.raises(TruncationTooSmallError):
        unitary_check(rootless, space, FiniteVector({Br(1, 2): Fraction(1)}))


def test_uniqueness_up_to_constant(rootless):
    first = build_alpha(rootless, Neg(0), 3)
    second = build_alpha(rootless, Neg(1), 3)
    report = alpha_uniqueness(first, second)
    assert report.constant
    assert report.ratio == Fraction(1, 16)


def test_wrong_masses_detected():
    S = WeightedShift(TreeModel(2, INF), lambda v: Fraction(4) if isinstance(v, Br) else Fraction(1))
    space = build_alpha(S, Neg(0), 2)
    broken = type(space)(
        space.anchor, {**space.reduced, Br(1, 1): Fraction(3)}, space.power, space.scale, 2, space.branches, space.neg_depth
    )
    report = unitary_check(S, broken, FiniteVector({Neg(0): Fraction(1)}))
    assert not report.ok
    assert Br(1, 1) in report.failures
