"""
A subnormal shift in floating point with certified tails
========================================================

rho mixes a geometric family (1/j, 2^-j) and a Gaussian family (j, e^{-j^2}),
scaled so that int 1/x d rho = 1.  Everything is computed at 256 bits.
"""

from treeshift import Neg, Br, subnormal_example, hyponormality_test
from treeshift.moments import carleman_bound_check

S, record = subnormal_example(truncation=20, kappa=2, eta=2, precision=256)
print("c =", record.normalizer.mid)

# consistency holds with equality, up to the enclosure width
value = record.consistency(S).value
print("consistency sum:", value.mid, "+/-", value.width)

# explicit growth bounds on the moments
report = carleman_bound_check(record.gamma.sequence(0, 17), range(4, 9), record.normalizer)
for row in report.rows:
    print(row.index, float(row.value.mid), "<=", float(row.bound.mid), row.holds)

# hyponormal at every vertex we look at
rows = hyponormality_test(S, [Neg(2), Neg(1), Neg(0), Br(1, 1), Br(2, 3)]).rows
print([(str(r.vertex), r.verdict) for r in rows])

# Starving the tail enclosures of terms makes the verdicts inconclusive
S_small, small = subnormal_example(truncation=2, series_terms=2)
print("coarse consistency:", small.consistency(S_small).verdict)
