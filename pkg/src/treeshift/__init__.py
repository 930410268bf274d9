"""Weighted shifts on a directed tree with one branching vertex.

Instances are built from moment data; Stieltjes positivity, paranormality,
hyponormality, the consistency condition and the composition-operator
realisation are checked exactly with rationals or with certified enclosures.
"""

from .composition import alpha_uniqueness, build_alpha, unitary_check
from .construct import main_example, subnormal_example
from .measures import DiscreteMeasure, QStieltjesFamily, backward_transform_mu, backward_transform_nu, moment
from .moments import MomentSequence, carleman_bound_check, classify_backward, stieltjes_check, t0_lower_bound
from .numerics import BoundedSum, Regime, det_exact, sum_superexp
from .shift import (
    FiniteVector,
    WeightedShift,
    apply,
    consistency_condition,
    hyponormality_test,
    norm_sq_power,
    paranormality_check,
)
from .tree import INF, Br, Neg, TreeModel, format_vertex, parse_vertex

__all__ = [
    "INF",
    "BoundedSum",
    "Br",
    "DiscreteMeasure",
    "FiniteVector",
    "MomentSequence",
    "Neg",
    "QStieltjesFamily",
    "Regime",
    "TreeModel",
    "WeightedShift",
    "alpha_uniqueness",
    "apply",
    "backward_transform_mu",
    "backward_transform_nu",
    "build_alpha",
    "carleman_bound_check",
    "classify_backward",
    "consistency_condition",
    "det_exact",
    "format_vertex",
    "hyponormality_test",
    "main_example",
    "moment",
    "norm_sq_power",
    "paranormality_check",
    "parse_vertex",
    "stieltjes_check",
    "subnormal_example",
    "sum_superexp",
    "t0_lower_bound",
    "unitary_check",
]
__version__ = "0.1.0"
