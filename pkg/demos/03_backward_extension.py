"""
Prepending a moment: the backward extension
===========================================

A Stieltjes sequence gamma_0, gamma_1, ... extends to gamma_{-1} exactly when
gamma_{-1} >= int 1/x d mu for some representing measure mu.
"""

from fractions import Fraction

from treeshift import DiscreteMeasure, QStieltjesFamily, backward_transform_mu, backward_transform_nu, moment
from treeshift.moments import MomentSequence, classify_backward, t0_lower_bound

mu = DiscreteMeasure.from_atoms([(1, "1/2"), (3, 1), ("1/2", "1/4")])
print("int 1/x d mu =", moment(mu, -1).value)

nu = backward_transform_nu(mu, Fraction(5, 2))
print("nu charges the origin with", nu.mass_at_zero)
print("moments shift by one:", [moment(nu, n + 1).value == moment(mu, n).value for n in range(5)])
print("roundtrip exact:", backward_transform_mu(nu).same_atoms(mu))

# For the indeterminate log-normal moments zeta_n the admissible gamma_{-1}
# form a half line [t0, inf); finite Hankel tests give lower bounds for t0.
fam = QStieltjesFamily("1/4")
zeta = MomentSequence({n: fam.zeta(n) for n in range(14)})
ladder = t0_lower_bound(zeta, 7)
for n, th in enumerate(ladder.thresholds, start=1):
    print(n, th, float(th))

for candidate in ("1/4", "1/2", "2"):
    print(candidate, classify_backward(zeta, Fraction(candidate), 6).verdict)
