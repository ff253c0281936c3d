"""Differentially private release of low-degree polynomial summaries.

A database of binary records is turned into one noisy coefficient vector
from which k-way disjunctions, r-of-k threshold queries or decision-list
evaluations can all be answered with a uniform worst-case error bound.
"""

from .approx import (
    LpFeasibilityProblem,
    UnivariateApproximant,
    construct_dl_helper,
    construct_or_approximant,
    construct_threshold_approximant,
    fit_minimax,
)
from .explicit import construct_threshold_explicit
from .families import (
    DecisionList,
    QueryFamily,
    certified_norm_bound,
    enumerate_index_set,
    exact_query,
    lift_row,
    make_family,
)
from .poly import (
    CoefficientVector,
    MonomialIndexSpace,
    UnivariatePoly,
    chebyshev,
    compose_affine,
    enumerate_index_space,
    eval_coeff_vector,
    eval_monomial,
    eval_univariate,
)
from .sanitizer import (
    PrivacyBudget,
    Summary,
    accuracy_bound,
    aggregate,
    answer,
    min_database_size,
    noise_scale,
    sanitize,
    sensitivity_bound,
)

__version__ = "0.1.0"
