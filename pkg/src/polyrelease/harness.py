"""Brute-force oracles and audits for the release pipeline.

Everything here reads the raw database and is a development and testing
tool: nothing in this module is privacy-preserving.  Certificates are
computed by evaluation and never read back from metadata.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AuditScaleError, ContractError, FamilyMismatchError
from .families import (
    DEFAULT_INDEX_CAP,
    DecisionList,
    FamilyDescriptor,
    QueryFamily,
    enumerate_decision_lists,
    index_set_array,
    lift_row,
)
from .sanitizer import (
    PrivacyBudget,
    Summary,
    accuracy_bound,
    aggregate,
    laplace_noise,
    release,
)

NOT_PRIVATE = "NOT PRIVACY-PRESERVING: audit reads the raw database"
NOISELESS_SLACK = 1e-9


def _bitstring(y) -> str:
    return "".join(str(int(b)) for b in y)


def _sample_indices(shape, count: int, seed: int) -> np.ndarray:
    """Up to ``count`` distinct admissible indices drawn uniformly from ``Y``."""
    rng = np.random.default_rng(seed)
    m = shape.m
    top = m if shape.kind == "declist" else min(shape.k, m)
    weights = np.array([math.comb(m, s) for s in range(top + 1)], dtype=float)
    total = min(count, shape.index_set_size)
    seen = set()
    while len(seen) < total:
        s = rng.choice(top + 1, p=weights / weights.sum())
        y = np.zeros(m, dtype=np.int8)
        y[rng.choice(m, size=s, replace=False)] = 1
        seen.add(tuple(y.tolist()))
    return np.array(sorted(seen, key=lambda y: (sum(y), [-b for b in y])), dtype=np.int8)


def _distinct(shape, database):
    if shape.kind == "declist":
        if not all(isinstance(x, DecisionList) for x in database):
            raise FamilyMismatchError("declist family audited against a non-decision-list database")
        counts = Counter(database)
        rows = sorted(counts, key=DecisionList.sort_key)
        return rows, np.array([counts[x] for x in rows], dtype=np.float64)
    if len(database) and isinstance(database[0], DecisionList):
        raise FamilyMismatchError(f"{shape.kind} family audited against a decision-list database")
    X = np.asarray(database)
    if X.ndim != 2 or X.shape[1] != shape.m:
        raise FamilyMismatchError(
            f"family has m={shape.m} but database rows have shape {X.shape[1:]}"
        )
    rows, counts = np.unique(X.astype(np.int8), axis=0, return_counts=True)
    return rows, counts.astype(np.float64)


def _exact_vector(shape, database, Y: np.ndarray) -> np.ndarray:
    rows, counts = _distinct(shape, database)
    n = counts.sum()
    if shape.kind == "declist":
        table = np.array([[x(y) for y in Y] for x in rows], dtype=np.float64)
    else:
        hits = rows.astype(np.int64) @ Y.astype(np.int64).T
        table = (hits > 0 if shape.kind == "disj" else hits >= shape.r).astype(np.float64)
    return (counts @ table) / n


def exact_answers(family, database, cap: int = DEFAULT_INDEX_CAP) -> dict:
    """Exact average answer for every admissible query index."""
    Y = index_set_array(family, cap)
    values = _exact_vector(family, database, Y)
    return {tuple(int(b) for b in y): float(v) for y, v in zip(Y, values)}


@dataclass(frozen=True)
class AuditReport:
    family: dict
    n: int
    epsilon: float
    delta: float
    beta: float
    mode: str
    queries_audited: int
    max_abs_error: float
    error_at_argmax: str
    theorem_alpha: float
    passed: bool
    runtime_ms: float = field(compare=False)
    note: str = NOT_PRIVATE

    def to_text(self) -> str:
        doc = asdict(self)
        doc["pass"] = doc.pop("passed")
        for key in ("epsilon", "delta"):
            if math.isinf(doc[key]):
                doc[key] = "inf"
        return json.dumps(doc, indent=2) + "\n"


def audit(
    summary: Summary,
    database,
    family: QueryFamily | None = None,
    *,
    beta: float = 0.1,
    sample: int | None = None,
    seed: int = 0,
    cap: int = DEFAULT_INDEX_CAP,
    exact: np.ndarray | None = None,
) -> AuditReport:
    """Worst-case error of ``summary`` against the exact answers on ``database``.

    With noise on, the pass criterion is the guaranteed error ``alpha`` at
    confidence ``beta``; noiseless summaries must be within ``gamma``.
    ``exact`` may carry precomputed exact answers aligned with the audited
    index order.
    """
    start = time.perf_counter()
    shape = summary.family
    if family is not None and not family.same_queries(shape):
        raise FamilyMismatchError(
            f"summary was released for {shape.as_dict()}, audit family is {family.descriptor().as_dict()}"
        )
    if len(database) != summary.n:
        raise FamilyMismatchError(
            f"summary was released from n={summary.n} rows, database has {len(database)}"
        )
    if sample is None:
        Y = index_set_array(shape, cap)
        mode = "exhaustive"
    else:
        Y = _sample_indices(shape, sample, seed)
        mode = "sampled"
    truth = _exact_vector(shape, database, Y) if exact is None else exact
    released = summary.coeffs.eval_many(Y)
    errors = np.abs(released - truth)
    worst = int(np.argmax(errors))
    if summary.budget.noiseless:
        alpha = shape.gamma
        passed = bool(errors[worst] <= alpha + NOISELESS_SLACK)
    else:
        alpha = accuracy_bound(shape, summary.n, summary.budget, beta)
        passed = bool(errors[worst] <= alpha)
    return AuditReport(
        family=shape.as_dict(), n=summary.n, epsilon=summary.budget.epsilon,
        delta=summary.budget.delta, beta=beta, mode=mode, queries_audited=len(Y),
        max_abs_error=float(errors[worst]), error_at_argmax=_bitstring(Y[worst]),
        theorem_alpha=float(alpha), passed=passed,
        runtime_ms=(time.perf_counter() - start) * 1e3,
    )


class TrialOutcome(NamedTuple):
    alpha: float
    pass_rate: float
    max_errors: np.ndarray
    reports: list


def accuracy_trials(family: QueryFamily, database, budget: PrivacyBudget, beta: float,
                    runs: int, seed: int = 0) -> TrialOutcome:
    """Sanitize ``runs`` times with seeds ``seed, seed+1, ...`` and audit each release."""
    base = aggregate(family, database)
    Y = index_set_array(family)
    truth = _exact_vector(family, database, Y)
    reports = []
    for i in range(runs):
        summary = release(family, base, len(database), budget, seed + i)
        reports.append(audit(summary, database, family, beta=beta, exact=truth))
    errs = np.array([r.max_abs_error for r in reports])
    rate = float(np.mean([r.passed for r in reports]))
    return TrialOutcome(reports[0].theorem_alpha if reports else float("nan"), rate, errs, reports)


def _all_rows(family, cap: int):
    if family.kind == "declist":
        return list(enumerate_decision_lists(family.k, family.m))
    if 2**family.m > cap:
        raise AuditScaleError(f"2^{family.m} rows exceeds the row-enumeration cap {cap}")
    return [np.array(x, dtype=np.int8) for x in itertools.product((0, 1), repeat=family.m)]


def certify_norm(family: QueryFamily, cap: int = 2**20) -> float:
    """Largest lifted-coefficient magnitude over every possible row; must not exceed ``T``."""
    worst = max(lift_row(family, x).norm_inf() for x in _all_rows(family, cap))
    if worst > family.T:
        raise ContractError(f"lift norm {worst} exceeds certified T={family.T}")
    return worst


class ApproximationCertificate(NamedTuple):
    max_error: float
    max_zero_residual: float  # largest |p_x(y)| where the exact answer is 0 (disj only)
    rows: int
    queries: int


def certify_approximation(family: QueryFamily, cap: int = 2**20) -> ApproximationCertificate:
    """Exhaustive ``max |p_x(y) - q_y(x)|`` over every row and every admissible query."""
    Y = index_set_array(family)
    M = family.space.monomial_matrix(Y)
    worst = zero_res = 0.0
    rows = _all_rows(family, cap)
    for x in rows:
        approx = M @ lift_row(family, x).coeffs
        if family.kind == "declist":
            truth = np.array([x(y) for y in Y], dtype=np.float64)
        else:
            hits = Y.astype(np.int64) @ x.astype(np.int64)
            truth = (hits > 0 if family.kind == "disj" else hits >= family.r).astype(np.float64)
        worst = max(worst, float(np.max(np.abs(approx - truth))))
        if family.kind == "disj" and np.any(truth == 0):
            zero_res = max(zero_res, float(np.max(np.abs(approx[truth == 0]))))
    return ApproximationCertificate(worst, zero_res, len(rows), len(Y))


def certify_sensitivity(family: QueryFamily, n: int, cap: int = 10**5) -> float:
    """Largest ``||aggregate(D) - aggregate(D')||_inf`` over all neighbouring databases.

    Aggregation is order-invariant, so databases are enumerated as multisets
    of rows; each neighbour replaces one row by any other possible row.
    """
    universe = _all_rows(family, cap)
    count = math.comb(len(universe) + n - 1, n)
    if count > cap:
        raise AuditScaleError(f"{count} databases of {n} rows exceed the cap {cap}")
    aggregated = {
        combo: aggregate(family, [universe[i] for i in combo]).coeffs
        for combo in itertools.combinations_with_replacement(range(len(universe)), n)
    }
    worst = 0.0
    for combo, vec in aggregated.items():
        for pos in range(n):
            for z in range(len(universe)):
                if z == combo[pos]:
                    continue
                other = tuple(sorted(combo[:pos] + (z,) + combo[pos + 1:]))
                worst = max(worst, float(np.max(np.abs(vec - aggregated[other]))))
    return worst


def _ie_weights(size: int, r: int) -> dict:
    """Coefficients ``w[V]`` with ``1[|x & S| >= r] = sum_V w[V] * OR(x & V)``, V subsets of S."""
    weights = Counter()
    for usize in range(r, size + 1):
        for U in itertools.combinations(range(size), usize):
            outer = (-1) ** (usize - r) * math.comb(usize - 1, r - 1)
            # AND over U by inclusion-exclusion on ORs of its subsets
            for vsize in range(1, usize + 1):
                for V in itertools.combinations(U, vsize):
                    weights[V] += outer * (-1) ** (vsize + 1)
    return weights


def inclusion_exclusion_crosscheck(database, r: int, k: int, d: int) -> float:
    """Max discrepancy between exact r-of-k answers and their reconstruction from disjunctions."""
    if d > 6 or k > 3:
        raise AuditScaleError(f"inclusion-exclusion crosscheck is capped at d <= 6, k <= 3 (got d={d}, k={k})")
    disj = FamilyDescriptor("disj", k, d, 0.5, 0, 0.0)
    rofk = FamilyDescriptor("rofk", k, d, 0.5, 0, 0.0, r)
    or_answers = exact_answers(disj, database)
    thr_answers = exact_answers(rofk, database)
    cache = {}
    worst = 0.0
    for y, truth in thr_answers.items():
        support = [j for j, b in enumerate(y) if b]
        if len(support) not in cache:
            cache[len(support)] = _ie_weights(len(support), r)
        total = 0.0
        for V, w in cache[len(support)].items():
            if w:
                q = [0] * d
                for pos in V:
                    q[support[pos]] = 1
                total += w * or_answers[tuple(q)]
        worst = max(worst, abs(total - truth))
    return worst


def laplace_mad(scale: float, draws: int = 10**5, seed: int = 0) -> float:
    """Sample mean absolute value of Laplace draws; its expectation is ``scale``."""
    return float(np.mean(np.abs(laplace_noise(np.random.default_rng(seed), draws, scale))))
