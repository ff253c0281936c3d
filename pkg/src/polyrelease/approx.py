"""Certified univariate approximants built by minimax linear programming.

Three kinds of target are supported, each defined on the integers 0..k:

* ``OrKind(k)``: 0 at 0 (exact), 1 on 1..k.  Backs k-way disjunctions.
* ``ThresholdKind(r, k)``: 0 on 0..r-1, 1 on r..k.  Backs r-of-k queries.
* ``DlHelperKind(k)``: 0 on 0..k-1, 1 at k (exact).  Backs decision lists.

Every constructor searches degrees upward from 1 and returns the first
degree whose *evaluated* worst-case error meets the target; the recorded
``gamma`` is that evaluated error, never the LP objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.optimize import linprog

from .errors import IllConditionedError, InfeasibleError
from .poly import UnivariatePoly, eval_univariate

FEASIBILITY_TOL = 1e-9
# past this degree the scaled monomial basis is abandoned for Chebyshev
MONOMIAL_DEGREE_LIMIT = 20


@dataclass(frozen=True)
class OrKind:
    k: int

    def targets(self):
        return {x: (0.0 if x == 0 else 1.0) for x in range(self.k + 1)}

    def exact_points(self):
        return (0,)


@dataclass(frozen=True)
class ThresholdKind:
    r: int
    k: int

    def targets(self):
        return {x: (1.0 if x >= self.r else 0.0) for x in range(self.k + 1)}

    def exact_points(self):
        return ()


@dataclass(frozen=True)
class DlHelperKind:
    k: int

    def targets(self):
        return {x: (1.0 if x == self.k else 0.0) for x in range(self.k + 1)}

    def exact_points(self):
        return (self.k,)


@dataclass(frozen=True)
class LpFeasibilityProblem:
    """Minimise the worst band violation of a degree-``degree`` polynomial.

    ``equalities`` are ``(point, value)`` pairs held exactly; ``bands`` are
    ``(point, lower, upper)`` triples whose violation is minimised.
    """

    degree: int
    equalities: Sequence[tuple] = ()
    bands: Sequence[tuple] = ()

    def __post_init__(self):
        pts = [p for p, _ in self.equalities] + [p for p, _, _ in self.bands]
        if len(set(pts)) != len(pts):
            raise ValueError("constraint points must be distinct")

    @classmethod
    def for_kind(cls, kind, degree: int) -> "LpFeasibilityProblem":
        exact = set(kind.exact_points())
        targets = kind.targets()
        eqs = [(x, v) for x, v in targets.items() if x in exact]
        bands = [(x, v, v) for x, v in targets.items() if x not in exact]
        return cls(degree, tuple(eqs), tuple(bands))


def band_violation(poly: UnivariatePoly, bands, equalities=()) -> float:
    """Largest violation over band constraints and equality residuals, by evaluation."""
    worst = 0.0
    if bands:
        pts = np.array([b[0] for b in bands], dtype=float)
        lo = np.array([b[1] for b in bands], dtype=float)
        hi = np.array([b[2] for b in bands], dtype=float)
        vals = eval_univariate(poly, pts)
        worst = float(np.max(np.maximum(0.0, np.maximum(vals - hi, lo - vals))))
    for x, v in equalities:
        worst = max(worst, abs(eval_univariate(poly, float(x)) - v))
    return worst


def _basis(points: np.ndarray, degree: int, basis: str, lo: float, hi: float) -> np.ndarray:
    if basis == "monomial":
        scale = max(abs(lo), abs(hi), 1.0)
        return np.vander(points / scale, degree + 1, increasing=True)
    mapped = (2.0 * points - (lo + hi)) / (hi - lo) if hi > lo else points - lo
    return np.polynomial.chebyshev.chebvander(mapped, degree)


def _to_monomial(coef: np.ndarray, basis: str, lo: float, hi: float) -> np.ndarray:
    if basis == "monomial":
        scale = max(abs(lo), abs(hi), 1.0)
        return coef / scale ** np.arange(coef.size)
    domain = [lo, hi] if hi > lo else [lo - 1.0, lo + 1.0]
    out = Chebyshev(coef, domain=domain).convert(kind=Polynomial).coef
    full = np.zeros(coef.size)
    full[: out.size] = out
    return full


def _solve(problem: LpFeasibilityProblem, basis: str):
    t = problem.degree
    eq_pts = np.array([p for p, _ in problem.equalities], dtype=float)
    band_pts = np.array([p for p, _, _ in problem.bands], dtype=float)
    every = np.concatenate([eq_pts, band_pts])
    lo, hi = float(every.min()), float(every.max())

    n_var = t + 2  # basis coefficients, then the slack s
    cost = np.zeros(n_var)
    cost[-1] = 1.0
    A_ub = b_ub = A_eq = b_eq = None
    if band_pts.size:
        B = _basis(band_pts, t, basis, lo, hi)
        lower = np.array([b for _, b, _ in problem.bands])
        upper = np.array([u for _, _, u in problem.bands])
        ones = np.ones((B.shape[0], 1))
        A_ub = np.vstack([np.hstack([B, -ones]), np.hstack([-B, -ones])])
        b_ub = np.concatenate([upper, -lower])
    if eq_pts.size:
        E = _basis(eq_pts, t, basis, lo, hi)
        A_eq = np.hstack([E, np.zeros((E.shape[0], 1))])
        b_eq = np.array([v for _, v in problem.equalities], dtype=float)
    bounds = [(None, None)] * (t + 1) + [(0, None)]
    res = linprog(
        cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
        method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        raise InfeasibleError(
            f"infeasible: no degree-{t} polynomial meets the equality constraints "
            f"{list(problem.equalities)}"
        )
    if res.status != 0:
        raise IllConditionedError(
            f"ill-conditioned: LP solver stopped with status {res.status} ({res.message}) "
            f"at degree {t} in the {basis} basis; refit in a Chebyshev basis"
        )
    coef = _to_monomial(res.x[: t + 1], basis, lo, hi)
    if len(problem.equalities) == 1:
        # restore the single equality exactly through the constant term
        x0, v0 = problem.equalities[0]
        tail = UnivariatePoly(np.concatenate([[0.0], coef[1:]]))
        coef[0] = v0 - eval_univariate(tail, float(x0))
    return coef, float(res.x[-1])


def fit_minimax(problem: LpFeasibilityProblem, basis: str = "auto"):
    """Solve the minimax LP; return ``(poly, achieved_error)``.

    ``basis`` is ``"monomial"``, ``"chebyshev"`` or ``"auto"``; auto uses a
    scaled monomial basis up to degree 20 and refits in a Chebyshev basis
    above that, or whenever the evaluated error disagrees with the LP
    optimum by more than the feasibility tolerance.
    """
    if problem.degree < 0:
        raise ValueError("degree must be non-negative")
    if not problem.equalities and not problem.bands:
        raise ValueError("at least one constraint is required")
    if basis == "auto":
        basis = "monomial" if problem.degree <= MONOMIAL_DEGREE_LIMIT else "chebyshev"
        try:
            coef, objective = _solve(problem, basis)
        except IllConditionedError:
            if basis == "chebyshev":
                raise
            basis = "chebyshev"
            coef, objective = _solve(problem, basis)
        poly = UnivariatePoly(coef)
        achieved = band_violation(poly, problem.bands, problem.equalities)
        if basis == "monomial" and achieved > objective + FEASIBILITY_TOL:
            cheb_coef, _ = _solve(problem, "chebyshev")
            cheb_poly = UnivariatePoly(cheb_coef)
            cheb_achieved = band_violation(cheb_poly, problem.bands, problem.equalities)
            if cheb_achieved < achieved:
                poly, achieved = cheb_poly, cheb_achieved
        return poly, achieved
    coef, _ = _solve(problem, basis)
    poly = UnivariatePoly(coef)
    return poly, band_violation(poly, problem.bands, problem.equalities)


@dataclass(frozen=True, eq=False)
class UnivariateApproximant:
    poly: UnivariatePoly
    kind: object
    gamma: float
    info: dict = field(default_factory=dict, repr=False)
    coeff_norm: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "coeff_norm", float(np.max(np.abs(self.poly.coeffs))))

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def k(self) -> int:
        return self.kind.k

    def __call__(self, x):
        return self.poly(x)

    def verify(self) -> float:
        """Re-evaluate the band contract at every integer point; return the worst error."""
        return verify_bands(self.poly, self.kind)


def verify_bands(poly: UnivariatePoly, kind) -> float:
    targets = kind.targets()
    xs = np.array(sorted(targets), dtype=float)
    want = np.array([targets[x] for x in sorted(targets)])
    return float(np.max(np.abs(eval_univariate(poly, xs) - want)))


def _search(kind, gamma: float) -> UnivariateApproximant:
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    for t in range(1, kind.k + 1):
        poly, achieved = fit_minimax(LpFeasibilityProblem.for_kind(kind, t))
        if achieved <= gamma:
            return UnivariateApproximant(poly, kind, max(achieved, verify_bands(poly, kind)))
    raise IllConditionedError(
        f"ill-conditioned: no degree <= {kind.k} met gamma={gamma} for {kind} even after "
        "refitting in a Chebyshev basis; degree-k interpolation is exact in theory, but its "
        "float64 monomial coefficients are not accurate enough at this scale"
    )


def construct_or_approximant(k: int, gamma: float) -> UnivariateApproximant:
    """Lowest-degree ``g`` with ``g(0) = 0`` and ``|g(x) - 1| <= gamma`` on 1..k."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return _search(OrKind(k), gamma)


def construct_threshold_approximant(r: int, k: int, gamma: float) -> UnivariateApproximant:
    """Lowest-degree ``g`` within ``gamma`` of ``1[x >= r]`` on 0..k."""
    if not 1 <= r <= k:
        raise ValueError(f"need 1 <= r <= k, got r={r}, k={k}")
    return _search(ThresholdKind(r, k), gamma)


def construct_dl_helper(k: int, gamma_prime: float) -> UnivariateApproximant:
    """Lowest-degree ``h`` with ``h(k) = 1`` and ``|h(x)| <= gamma_prime`` on 0..k-1."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return _search(DlHelperKind(k), gamma_prime)


def reflect_or_approximant(g: UnivariateApproximant) -> UnivariatePoly:
    """``z -> 1 - g(k - z)``, turning an OR approximant into a decision-list helper."""
    k = g.kind.k
    c = g.poly.coeffs
    # expand g(k - z) in powers of z
    out = np.zeros(c.size)
    for i, ci in enumerate(c):
        for j in range(i + 1):
            out[j] += ci * comb(i, j) * float(k) ** (i - j) * (-1.0) ** j
    out = -out
    out[0] += 1.0
    return UnivariatePoly(out)
