import numpy as np
import pytest
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from polyrelease.approx import (
    DlHelperKind,
    LpFeasibilityProblem,
    OrKind,
    ThresholdKind,
    UnivariateApproximant,
    construct_dl_helper,
    construct_or_approximant,
    construct_threshold_approximant,
    fit_minimax,
    reflect_or_approximant,
    verify_bands,
)
from polyrelease.errors import IllConditionedError, InfeasibleError
from polyrelease.poly import UnivariatePoly

# Minimal degrees frozen from the oracle below (Chebyshev basis, interior point).
OR_MIN_DEGREE = {(64, 0.1): 12, (9, 0.01): 7}


def oracle_min_error(k, degree, target, exact_at=None):
    """Best uniform error of a degree-``degree`` fit on 0..k, independent of the library."""
    xs = np.arange(k + 1, dtype=float)
    V = C.chebvander(2 * xs / k - 1, degree)
    n = degree + 1
    rows, rhs = [], []
    for x in range(k + 1):
        rows.append(np.r_[V[x], -1.0]); rhs.append(target(x))
        rows.append(np.r_[-V[x], -1.0]); rhs.append(-target(x))
    eq = None
    if exact_at is not None:
        eq = (np.r_[V[exact_at], 0.0][None, :], [target(exact_at)])
    res = linprog(np.r_[np.zeros(n), 1.0], A_ub=np.array(rows), b_ub=rhs,
                  A_eq=None if eq is None else eq[0], b_eq=None if eq is None else eq[1],
                  bounds=[(None, None)] * n + [(0, None)], method="highs-ipm")
    assert res.status == 0
    return res.fun


def oracle_min_degree(k, gamma):
    for t in range(1, k + 1):
        if oracle_min_error(k, t, lambda x: float(x > 0), exact_at=0) <= gamma:
            return t


@pytest.mark.parametrize("k,gamma", sorted(OR_MIN_DEGREE))
def test_oracle_agrees_with_frozen_degree(k, gamma):
    assert oracle_min_degree(k, gamma) == OR_MIN_DEGREE[(k, gamma)]


@pytest.mark.parametrize("k,gamma", sorted(OR_MIN_DEGREE))
def test_or_minimal_degree(k, gamma):
    a = construct_or_approximant(k, gamma)
    assert a.degree == OR_MIN_DEGREE[(k, gamma)]
    xs = np.arange(k + 1)
    err = np.max(np.abs(a.poly(xs) - (xs > 0)))
    assert err <= gamma
    assert a.poly(0.0) == 0.0
    assert abs(err - a.gamma) <= 1e-12


def test_fit_minimax_interpolation_examples():
    p, err = fit_minimax(LpFeasibilityProblem.for_kind(OrKind(1), 1))
    np.testing.assert_allclose(p.coeffs, [0, 1], atol=1e-12)
    assert err <= 1e-12
    p, err = fit_minimax(LpFeasibilityProblem.for_kind(OrKind(2), 2))
    np.testing.assert_allclose(p.coeffs, [0, 1.5, -0.5], atol=1e-12)
    assert err <= 1e-12
    # exact in theory; float64 Horner at x=16 is good to eps * sum |c_i| 16^i
    p, err = fit_minimax(LpFeasibilityProblem.for_kind(OrKind(16), 16))
    condition = float(np.sum(np.abs(p.coeffs) * 16.0 ** np.arange(17)))
    assert err <= np.finfo(float).eps * condition
    assert err <= 1e-7


def test_or_k1_is_identity():
    a = construct_or_approximant(1, 0.1)
    assert a.degree == 1 and a.gamma <= 1e-12


def test_threshold_examples():
    a = construct_threshold_approximant(1, 3, 0.05)
    xs = np.arange(4)
    assert np.max(np.abs(a.poly(xs) - (xs >= 1))) <= 0.05
    a = construct_threshold_approximant(4, 4, 0.1)
    xs = np.arange(5)
    assert np.max(np.abs(a.poly(xs) - (xs >= 4))) <= 0.1
    p, err = fit_minimax(LpFeasibilityProblem.for_kind(ThresholdKind(2, 2), 2))
    np.testing.assert_allclose(p.coeffs, [0, -0.5, 0.5], atol=1e-12)
    assert err <= 1e-12


def test_threshold_search_takes_the_lowest_feasible_degree():
    # a straight line already reaches error 1/4 on (0,0),(1,0),(2,1)
    a = construct_threshold_approximant(2, 2, 0.5)
    assert a.degree == 1
    assert a.gamma == pytest.approx(0.25, abs=1e-12)


def test_dl_helper_examples():
    a = construct_dl_helper(1, 0.1)
    np.testing.assert_allclose(a.poly.coeffs, [0, 1], atol=1e-12)
    a = construct_dl_helper(3, 0.05)
    assert abs(a.poly(3.0) - 1) <= 1e-12
    assert max(abs(a.poly(x)) for x in (0.0, 1.0, 2.0)) <= 0.05


@pytest.mark.parametrize("k", [2, 5, 9, 16])
def test_dl_helper_exact_at_k(k):
    a = construct_dl_helper(k, 0.01)
    assert abs(a.poly(float(k)) - 1) <= 1e-12
    assert np.max(np.abs(a.poly(np.arange(k)))) <= 0.01


@pytest.mark.parametrize("k", range(1, 17))
@pytest.mark.parametrize("gamma", [0.2, 0.05, 0.01])
def test_recorded_gamma_is_rechecked(k, gamma):
    for a in (construct_or_approximant(k, gamma), construct_dl_helper(k, gamma),
              construct_threshold_approximant(max(1, k // 2), k, gamma)):
        assert abs(a.verify() - a.gamma) <= 1e-9
        assert a.gamma <= gamma + 1e-9
        assert np.isfinite(a.coeff_norm)


@pytest.mark.parametrize("k", [3, 6, 10, 16])
def test_degree_monotone_in_gamma(k):
    for gamma in (0.2, 0.1, 0.05):
        assert construct_or_approximant(k, gamma / 2).degree >= construct_or_approximant(k, gamma).degree
        for r in (1, k // 2 or 1, k):
            lo = construct_threshold_approximant(r, k, gamma / 2).degree
            assert lo >= construct_threshold_approximant(r, k, gamma).degree


@pytest.mark.parametrize("k,t", [(8, 3), (12, 5), (16, 6)])
def test_lp_objective_matches_oracle(k, t):
    _, err = fit_minimax(LpFeasibilityProblem.for_kind(OrKind(k), t))
    assert err == pytest.approx(oracle_min_error(k, t, lambda x: float(x > 0), exact_at=0), abs=1e-8)


def test_infeasible_equalities():
    problem = LpFeasibilityProblem(degree=0, equalities=((0, 0.0), (1, 1.0)), bands=())
    with pytest.raises(InfeasibleError, match="infeasible"):
        fit_minimax(problem)


def test_constraint_points_distinct():
    with pytest.raises(ValueError):
        LpFeasibilityProblem(degree=1, equalities=((0, 0.0),), bands=((0, -1.0, 1.0),))


def test_ill_conditioned_large_monomial_degree():
    with pytest.raises(IllConditionedError, match="ill-conditioned.*Chebyshev"):
        construct_threshold_approximant(8, 32, 0.01)


def test_reflection_gives_helper_contract():
    g = construct_or_approximant(5, 0.05)
    h = reflect_or_approximant(g)
    assert abs(h(5.0) - 1) <= 1e-12
    assert np.max(np.abs(h(np.arange(5.0)))) <= 0.05 + 1e-9


def test_verify_bands_counts_every_point():
    kind = ThresholdKind(2, 3)
    assert verify_bands(UnivariatePoly([0.0, 0.0, 0.5]), kind) == pytest.approx(3.5)


def test_kinds_targets():
    assert OrKind(3).targets() == {0: 0.0, 1: 1.0, 2: 1.0, 3: 1.0}
    assert DlHelperKind(2).targets() == {0: 0.0, 1: 0.0, 2: 1.0}
    assert ThresholdKind(2, 3).targets() == {0: 0.0, 1: 0.0, 2: 1.0, 3: 1.0}


def test_approximant_reports_degree_and_norm():
    a = UnivariateApproximant(UnivariatePoly([0.0, 2.0, -3.0]), OrKind(2), 0.5)
    assert a.degree == 2 and a.coeff_norm == 3.0 and a.k == 2
