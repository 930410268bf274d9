import random
from fractions import Fraction

import pytest

from treeshift.shift import WeightedShift
from treeshift.tree import TreeModel


def rational_weight(seed: int, vertex) -> Fraction:
    """Deterministic positive rational attached to a vertex."""
    rng = random.Random(f"{seed}:{vertex}")
    return Fraction(rng.randint(1, 9), rng.randint(1, 9))


def make_random_shift(eta: int, kappa: int, seed: int) -> WeightedShift:
    """Shift on a finite-branching tree whose weights are rational, so squares are exact."""
    tree = TreeModel(eta, kappa)
    return WeightedShift(tree, lambda v: rational_weight(seed, v) ** 2)


@pytest.fixture
def random_shift():
    return make_random_shift
