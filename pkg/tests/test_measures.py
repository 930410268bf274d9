from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeshift.measures import (
    DiscreteMeasure,
    GaussianAtoms,
    GeometricAtoms,
    InfiniteMomentError,
    NotBackwardExtendableError,
    QLatticeAtoms,
    QStieltjesFamily,
    backward_transform_mu,
    backward_transform_nu,
    build_lambda_a,
    eval_omega_theta,
    measure_from_json,
    measure_to_json,
    moment,
)
from treeshift.numerics import BoundedSum, Regime

FLOAT = Regime("float", 256)


def test_from_atoms_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure.from_atoms([(0, 1)])
    with pytest.raises(ValueError):
        DiscreteMeasure.from_atoms([(1, 1), (1, 2)])
    with pytest.raises(ValueError):
        DiscreteMeasure.from_atoms([(1, -1)])


def test_moments_of_finite_measure():
    mu = DiscreteMeasure.from_atoms([(1, 1), (2, "1/2")], mass_at_zero="1/4")
    assert moment(mu, 0).value == Fraction(7, 4)
    assert moment(mu, 2).value == 3
    with pytest.raises(InfiniteMomentError):
        moment(mu, -1)


def test_backward_transform_refuses_small_moment():
    mu = DiscreteMeasure.from_atoms([(1, 1)])
    with pytest.raises(NotBackwardExtendableError):
        backward_transform_nu(mu, Fraction(1, 2))


def test_backward_transform_equality_case_has_no_origin_mass():
    mu = DiscreteMeasure.from_atoms([(2, 1), (4, 2)])
    nu = backward_transform_nu(mu, 1)
    assert not nu.has_mass_at_zero()
    assert backward_transform_mu(nu).same_atoms(mu)


@settings(max_examples=20, deadline=None)
@given(
    st.lists(
        st.tuples(st.fractions(Fraction(1, 5), 5, max_denominator=9), st.fractions(Fraction(1, 9), 3, max_denominator=9)),
        min_size=1,
        max_size=5,
        unique_by=lambda p: p[0],
    ),
    st.fractions(0, 3, max_denominator=7),
)
def test_backward_roundtrip_property(pairs, excess):
    mu = DiscreteMeasure.from_atoms(pairs)
    gamma = moment(mu, -1).value + excess
    nu = backward_transform_nu(mu, gamma)
    assert backward_transform_mu(nu).same_atoms(mu)
    assert moment(nu, 0).value == gamma
    for n in range(5):
        assert moment(nu, n + 1).value == moment(mu, n).value


def test_qlattice_indexing():
    for k in range(-5, 6):
        assert QLatticeAtoms.k_of(QLatticeAtoms.index_of(k)) == k
    assert [QLatticeAtoms.k_of(i) for i in range(5)] == [0, 1, -1, 2, -2]


def test_exact_regime_needs_rational_square():
    with pytest.raises(ValueError):
        QStieltjesFamily("1/3")
    assert QStieltjesFamily("1/3", regime=FLOAT).zeta(1) > 1
    with pytest.raises(ValueError):
        QStieltjesFamily("3/2")


def test_zeta_values():
    fam = QStieltjesFamily("1/4")
    assert [fam.zeta(n) for n in range(-2, 3)] == [16, 2, 1, 2, 16]


def test_lambda_a_moments_enclose_zeta():
    fam = QStieltjesFamily("1/4")
    lam = build_lambda_a(fam, 6)
    for n in range(-4, 7):
        m = moment(lam, n)
        assert m.contains(fam.zeta(n))
        assert m.width < Fraction(1, 10**40) * fam.zeta(n)


def test_lambda_a_float_regime():
    fam = QStieltjesFamily("1/4", regime=FLOAT)
    lam = build_lambda_a(fam, 6)
    assert moment(lam, 2).contains(FLOAT.scalar(16))


def test_normalizer_with_shifted_parameter():
    fam = QStieltjesFamily("1/4", "1/2")
    lam = build_lambda_a(fam, 5)
    assert moment(lam, 0).contains(1)


def test_subnormal_families_converge():
    geo = GeometricAtoms(FLOAT)
    total = BoundedSum.exact(FLOAT.zero())
    for i in range(5):
        x, w = geo.atom(i)
        total = total + BoundedSum.exact(w)
    total = total + geo.tail(5, 0)
    assert total.contains(FLOAT.scalar("1/2"))
    with pytest.raises(ValueError):
        GaussianAtoms(Regime())


def test_omega_theta_density_positive():
    fam = QStieltjesFamily("1/4")
    assert eval_omega_theta(fam, "1/2", 1) > 0
    with pytest.raises(ValueError):
        eval_omega_theta(fam, 2, 1)


def test_json_roundtrip():
    mu = DiscreteMeasure.from_atoms([("1/3", "2/7"), (5, "1/2")], mass_at_zero="1/9")
    doc = measure_to_json(mu)
    back = measure_from_json(doc)
    assert back.same_atoms(mu)
