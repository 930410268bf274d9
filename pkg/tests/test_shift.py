from fractions import Fraction

import pytest

from treeshift.measures import DiscreteMeasure
from treeshift.shift import (
    ConsistencyError,
    FiniteVector,
    TailUnavailableError,
    WeightedShift,
    apply,
    apply_power,
    consistency_condition,
    hyponormality_test,
    mu_u_from_children,
    norm_sq_power,
    norm_sq_power_basis,
    norm_sq_power_basis_enumerated,
    paranormality_check,
)
from treeshift.tree import INF, Br, Neg, TreeModel


def test_apply_moves_mass_to_children(random_shift):
    S = random_shift(2, 1, 3)
    f = FiniteVector({Neg(0): Fraction(1)})
    g = apply(S, f)
    assert set(g.support()) == {Br(1, 1), Br(2, 1)}
    assert g.entries[Br(1, 1)] == S.weight(Br(1, 1))


def test_root_has_no_weight(random_shift):
    S = random_shift(2, 1, 3)
    with pytest.raises(ValueError):
        S.weight_sq(Neg(1))


@pytest.mark.parametrize("seed", range(5))
def test_basis_norm_formula_matches_enumeration(random_shift, seed):
    S = random_shift(3, 2, seed)
    for u in (Neg(2), Neg(1), Neg(0), Br(2, 3)):
        for n in range(5):
            assert norm_sq_power_basis(S, u, n).value == norm_sq_power_basis_enumerated(S, u, n).value


def test_apply_power_agrees_with_repeated_apply(random_shift):
    S = random_shift(3, 2, 11)
    f = FiniteVector({Neg(2): Fraction(1, 3), Neg(0): Fraction(-2), Br(1, 2): Fraction(5, 7)})
    g = f
    for _ in range(3):
        g = apply(S, g)
    assert apply_power(S, f, 3).entries == {v: c for v, c in g.entries.items() if c != 0}


def test_infinite_tree_needs_tail_certificate():
    S = WeightedShift(TreeModel(INF, 0), lambda v: Fraction(1))
    with pytest.raises(TailUnavailableError):
        norm_sq_power_basis(S, Neg(0), 1)
    with pytest.raises(TailUnavailableError):
        apply(S, FiniteVector({Neg(0): Fraction(1)}))


def test_hyponormality_on_constant_weights():
    S = WeightedShift(TreeModel(2, 1), lambda v: Fraction(1, 2) if isinstance(v, Br) and v.j == 1 else Fraction(1))
    rep = hyponormality_test(S, [Neg(1), Neg(0), Br(1, 1)])
    assert [r.verdict for r in rep.rows] == ["Satisfied", "Satisfied", "Satisfied"]
    assert rep.row(Neg(0)).value.value == 1


def test_hyponormality_detects_violation():
    # lambda_{i,1}^2 = 1, lambda_{i,2}^2 = 1/2: sum at 0 is 2 * 1 / (1/2) = 4
    def w(v):
        if isinstance(v, Br) and v.j == 2:
            return Fraction(1, 2)
        return Fraction(1)

    S = WeightedShift(TreeModel(2, 0), w)
    assert hyponormality_test(S, [Neg(0)]).violated == [Neg(0)]


def test_paranormality_both_outcomes():
    # on a branch ||S e||^4 <= ||S^2 e||^2 reads lambda_{j+1}^2 <= lambda_{j+2}^2
    growing = WeightedShift(TreeModel(2, 0), lambda v: Fraction(v.j if isinstance(v, Br) else 1))
    shrinking = WeightedShift(TreeModel(2, 0), lambda v: Fraction(1, v.j if isinstance(v, Br) else 1))
    e = FiniteVector({Br(1, 1): Fraction(1)})
    assert paranormality_check(growing, e).holds is True
    assert paranormality_check(shrinking, e).holds is False


def test_norm_sq_power_is_orthogonal_sum(random_shift):
    S = random_shift(2, 1, 5)
    f = FiniteVector({Neg(1): Fraction(2), Br(2, 1): Fraction(-1, 3)})
    expected = 4 * norm_sq_power_basis(S, Neg(1), 2).value + Fraction(1, 9) * norm_sq_power_basis(S, Br(2, 1), 2).value
    assert norm_sq_power(S, f, 2).value == expected


def test_consistency_and_mu_u():
    S = WeightedShift(TreeModel(2, 0), lambda v: Fraction(1, 4))
    children = {Br(1, 1): DiscreteMeasure.from_atoms([(1, 1)]), Br(2, 1): DiscreteMeasure.from_atoms([(2, 1)])}
    rep = consistency_condition(S, Neg(0), children)
    assert rep.value.value == Fraction(1, 4) + Fraction(1, 8)
    assert rep.verdict == "holds"
    mu = mu_u_from_children(S, Neg(0), children)
    assert mu.mass_at_zero == 1 - Fraction(3, 8)

    heavy = WeightedShift(TreeModel(2, 0), lambda v: Fraction(4))
    assert consistency_condition(heavy, Neg(0), children).verdict == "fails"
    with pytest.raises(ConsistencyError):
        mu_u_from_children(heavy, Neg(0), children)
