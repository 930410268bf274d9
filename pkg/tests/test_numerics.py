from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeshift.numerics import (
    BoundedSum,
    PrecisionError,
    RatioConditionError,
    Regime,
    det_exact,
    exact_sqrt,
    sum_superexp,
)

FLOAT = Regime("float", 128)


def test_scalar_parsing_exact():
    r = Regime()
    assert r.scalar("3/4") == Fraction(3, 4)
    assert r.scalar("1.9") == Fraction(19, 10)
    assert r.scalar(2) == Fraction(2)
    with pytest.raises(ValueError):
        r.scalar("abc")


def test_scalar_parsing_float():
    x = FLOAT.scalar("1/3")
    assert abs(x * 3 - 1) < FLOAT.scalar("1e-35")


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None
    with pytest.raises(ValueError):
        Regime().sqrt(Fraction(3))


def test_geometric_series_enclosure():
    s = sum_superexp(lambda k: Fraction(1, 2**k), 0, 10)
    assert s.partial == 2 - Fraction(1, 2**10)
    assert s.tail_bound == Fraction(1, 2**10)
    assert s.contains(2)


def test_series_adaptive_tolerance():
    s = sum_superexp(lambda k: Fraction(1, 2**k), 0, rel_tol=Fraction(1, 2**40))
    assert s.contains(2)
    assert s.width <= Fraction(2, 2**40)


def test_ratio_condition_violation():
    with pytest.raises(RatioConditionError):
        sum_superexp(lambda k: Fraction(1, k + 1), 0, 10)


def test_certified_comparisons():
    x = BoundedSum.between(Fraction(1), Fraction(2))
    assert x.certainly_gt(Fraction(1, 2))
    assert not x.certainly_gt(Fraction(3, 2))
    assert x.compare(Fraction(3, 2)) is None
    assert BoundedSum.exact(Fraction(3)).compare(2) == 1


@given(
    st.fractions(min_value=-10, max_value=10, max_denominator=50),
    st.fractions(min_value=-10, max_value=10, max_denominator=50),
    st.fractions(min_value=0, max_value=1, max_denominator=50),
)
def test_arithmetic_contains_true_values(a, b, w):
    x = BoundedSum(a, w, two_sided=True)
    y = BoundedSum(b, w, two_sided=True)
    for ta in (a - w, a, a + w):
        for tb in (b - w, b, b + w):
            assert (x + y).contains(ta + tb)
            assert (x - y).contains(ta - tb)
            assert (x * y).contains(ta * tb)


def test_float_results_are_widened():
    third = BoundedSum.exact(FLOAT.one()) / BoundedSum.exact(FLOAT.scalar(3))
    assert third.width > 0
    assert (third * BoundedSum.exact(FLOAT.scalar(3))).contains(FLOAT.one())


def test_det_exact_small():
    assert det_exact([[1, 2], [2, 16]]).value == 12
    assert det_exact([[0, 1], [1, 2]]).value == -1
    assert det_exact([[1, 2], [2, 4]]).sign == 0


@settings(max_examples=30)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_det_matches_cofactor_expansion(m):
    a, b, c = m
    expected = (
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
    )
    assert det_exact([[Fraction(x) for x in row] for row in m]).value == expected


def test_det_float_sign_and_bound():
    m = [[FLOAT.scalar(x) for x in row] for row in [[4, 2], [2, 3]]]
    d = det_exact(m, FLOAT)
    assert d.sign == 1
    assert abs(d.value - 8) <= d.error_bound + FLOAT.scalar("1e-30")


def test_det_float_inconclusive_when_singular():
    m = [[FLOAT.scalar(x) for x in row] for row in [[1, 2], [2, 4]]]
    d = det_exact(m, FLOAT)
    assert d.sign is None
    assert d.inconclusive


def test_precision_error_is_arithmetic_error():
    assert issubclass(PrecisionError, ArithmeticError)
