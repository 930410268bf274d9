"""
The shift as a composition operator
===================================

On the rootless tree (kappa infinite) the shift is unitarily equivalent to
composition with the parent map on L^2 of point masses alpha(v).
"""

import random
from fractions import Fraction

from treeshift import FiniteVector, Neg, main_example, build_alpha, unitary_check, alpha_uniqueness
from treeshift.tree import INF

S, _ = main_example(kappa=INF, truncation=5)
space = build_alpha(S, Neg(0), depth=4)
for v in space.vertices[:8]:
    print(f"{str(v):>6}", space.reduced[v], "* s^", space.power[v])

rng = random.Random(1)
pool = [v for v in space.vertices if not space.is_frontier(v)]
for _ in range(5):
    f = FiniteVector({v: Fraction(rng.randint(-5, 5) or 1, rng.randint(1, 5)) for v in rng.sample(pool, 6)})
    print(unitary_check(S, space, f).ok)

# A different normalisation point changes alpha by one global factor
other = build_alpha(S, Neg(1), depth=4)
print(alpha_uniqueness(space, other))
