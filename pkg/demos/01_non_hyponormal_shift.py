"""
A shift whose moments are all Stieltjes but which is not hyponormal
===================================================================

Build the shift from the normalised q-lattice measure with q = 1/4, then look
at the three properties side by side.
"""

from fractions import Fraction

from treeshift import FiniteVector, Neg, Br, main_example, hyponormality_test, paranormality_check
from treeshift.moments import MomentSequence, stieltjes_check
from treeshift.shift import consistency_condition, norm_sq_power_basis

S, record = main_example(q="1/4", t=1, kappa=2)

# The moment data: gamma_0 = 1, gamma_n = zeta_{n-1} for n >= 1, and two
# backward moments picked by a doubling search.
print("gamma_-2 .. gamma_4:", [str(record.gamma(n)) for n in range(-2, 5)])

# ||S^n e_u||^2 for a few vertices, all exact rationals
for u in (Neg(2), Neg(0), Br(1, 1), Br(2, 1)):
    row = [str(norm_sq_power_basis(S, u, n).value) for n in range(6)]
    print(f"{str(u):>6}", row)

# Every basis sequence passes the Hankel test (zeros mean finitely supported
# representing measures on the branches)
for u in (Neg(2), Neg(1), Neg(0), Br(5, 3)):
    seq = MomentSequence({n: norm_sq_power_basis(S, u, n) for n in range(13)})
    print(f"{str(u):>6}", stieltjes_check(seq, 6).verdict)

# Yet the hyponormality sum at the branching vertex equals zeta_{-1} / t = 2
report = hyponormality_test(S, [Neg(2), Neg(1), Neg(0), Br(1, 1)])
for row in report.rows:
    print(f"{str(row.vertex):>6}", row.value.value, row.verdict)

# The same number from explicit summation with a certified tail
enclosure = hyponormality_test(S.with_enclosures(), [Neg(0)]).rows[0].value
print("series enclosure width:", float(enclosure.width))

# Paranormality survives
f = FiniteVector({Neg(1): Fraction(1), Neg(0): Fraction(-3, 2), Br(2, 1): Fraction(2)})
print("paranormal on f:", paranormality_check(S, f).holds)

# and the consistency sum at 0 exceeds one
print("consistency at 0 > 1:", consistency_condition(S, Neg(0), record.child_measures(S.branches)).verdict)
