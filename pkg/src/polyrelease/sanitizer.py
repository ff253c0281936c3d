"""Private release of a noisy coefficient vector, and answering queries from it.

The released :class:`Summary` is the average of the per-row lifted
polynomials with i.i.d. Laplace noise added to every coordinate of the
monomial space.  Noise is calibrated to the L-infinity sensitivity ``2T/n``
of the average, multiplied by the number of coordinates for pure
epsilon-DP or by ``3 sqrt(N ln(1/delta))`` for (epsilon, delta)-DP.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ApproximationFloorError, ContractError, DimensionError, ParseError
from .families import (
    DecisionList,
    FamilyDescriptor,
    QueryFamily,
    check_index,
    check_row,
    lift_row,
)
from .poly import CoefficientVector, enumerate_index_space

FORMAT_VERSION = 1


@dataclass(frozen=True)
class PrivacyBudget:
    """``epsilon = inf`` switches noise off (audit mode); ``delta = 0`` is pure DP."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.epsilon)

    @property
    def approximate(self) -> bool:
        return self.delta > 0


@dataclass(frozen=True)
class AccuracyBudget:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")


def _unique_rows(family, database):
    if not len(database):
        raise ValueError("cannot aggregate an empty database")
    if family.kind == "declist":
        counts = Counter(check_row(family, x) for x in database)
        rows = sorted(counts, key=DecisionList.sort_key)
        return rows, np.array([counts[x] for x in rows], dtype=np.float64)
    X = np.asarray(database)
    if X.ndim != 2 or X.shape[1] != family.m:
        raise DimensionError(f"database must have shape (n, {family.m}), got {X.shape}")
    if not np.all((X == 0) | (X == 1)):
        raise ValueError("database rows must be 0/1 vectors")
    rows, counts = np.unique(X.astype(np.int8), axis=0, return_counts=True)
    return list(rows), counts.astype(np.float64)


def aggregate(family: QueryFamily, database) -> CoefficientVector:
    """Average of the lifted rows, ``(1/n) sum_i p_{x_i}``.

    Identical rows are lifted once and weighted by their multiplicity; the
    reduction runs over distinct rows in sorted order, so the result does
    not depend on the order of the input rows.
    """
    rows, counts = _unique_rows(family, database)
    lifted = np.vstack([lift_row(family, x).coeffs for x in rows])
    n = counts.sum()
    return CoefficientVector(family.space, (counts @ lifted) / n)


def sensitivity_bound(family, n: int) -> float:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return 2.0 * family.T / n


def noise_scale(budget: PrivacyBudget, N: int, delta_sens: float, mode: str | None = None) -> float:
    """Per-coordinate Laplace scale for ``N`` coordinates of L-inf sensitivity ``delta_sens``.

    ``mode`` is ``"pure"`` or ``"approx"``; by default it follows ``budget.delta``.
    """
    if N < 1:
        raise ValueError(f"need at least one coordinate, got N={N}")
    mode = mode or ("approx" if budget.approximate else "pure")
    if mode == "approx" and budget.delta == 0:
        raise ContractError("the (epsilon, delta) noise formula needs delta > 0")
    if budget.noiseless:
        return 0.0
    if mode == "pure":
        return delta_sens * N / budget.epsilon
    if mode == "approx":
        return 3.0 * delta_sens * math.sqrt(N * math.log(1.0 / budget.delta)) / budget.epsilon
    raise ValueError(f"unknown noise mode {mode!r}")


def laplace_noise(rng: np.random.Generator, size: int, scale: float) -> np.ndarray:
    """Laplace(0, scale) draws by inverse CDF from 53-bit uniforms on the open interval (0, 1)."""
    u = (rng.integers(0, 2**53, size=size, dtype=np.int64).astype(np.float64) + 0.5) / 2.0**53
    low = u < 0.5
    out = np.empty(size)
    out[low] = scale * np.log(2.0 * u[low])
    out[~low] = -scale * np.log(2.0 * (1.0 - u[~low]))
    return out


@dataclass(frozen=True, eq=False)
class Summary:
    """The released artifact: a noisy coefficient vector plus public metadata."""

    family: FamilyDescriptor
    n: int
    budget: PrivacyBudget
    coeffs: CoefficientVector
    noise_scale: float
    seed: int | None = None

    def __post_init__(self):
        if self.coeffs.space.m != self.family.m or self.coeffs.space.t != self.family.t:
            raise DimensionError("summary coefficients do not match the family's monomial space")

    def expected_noise_scale(self) -> float:
        return noise_scale(self.budget, self.coeffs.space.size, sensitivity_bound(self.family, self.n))

    def answer(self, y, clamp: bool = False) -> float:
        return answer(self, y, clamp=clamp)


def release(family: QueryFamily, aggregated: CoefficientVector, n: int,
            budget: PrivacyBudget, seed: int | None = None) -> Summary:
    """Add calibrated noise to an already aggregated vector."""
    N = aggregated.space.size
    scale = noise_scale(budget, N, sensitivity_bound(family, n))
    coeffs = aggregated.coeffs
    if scale > 0:
        rng = np.random.default_rng(seed)
        coeffs = coeffs + laplace_noise(rng, N, scale)
    return Summary(family.descriptor(), int(n), budget,
                   CoefficientVector(aggregated.space, coeffs), scale, seed)


def sanitize(family: QueryFamily, database, budget: PrivacyBudget, seed: int | None = None) -> Summary:
    """Release a differentially private summary of ``database`` for ``family``.

    Noise is added to every one of the ``C(m+t, t)`` coordinates, drawn in
    graded-lex order from a single stream seeded by ``seed``.
    """
    return release(family, aggregate(family, database), len(database), budget, seed)


def answer(summary: Summary, y, clamp: bool = False) -> float:
    """Evaluate the released polynomial at query index ``y``."""
    bits = check_index(summary.family, y)
    value = summary.coeffs(bits)
    return min(1.0, max(0.0, value)) if clamp else value


def accuracy_bound(family, n: int, budget: PrivacyBudget, beta: float) -> float:
    """Worst-case error ``alpha`` holding with probability ``1 - beta`` (natural logs)."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    return family.gamma + _noise_error_numerator(family, budget, beta) / n


def _noise_error_numerator(family, budget: PrivacyBudget, beta: float) -> float:
    if budget.noiseless:
        return 0.0
    N = math.comb(family.m + family.t, family.t)
    log_term = math.log(N / beta)
    if budget.approximate:
        return 12.0 * family.T * N * math.sqrt(N * math.log(1.0 / budget.delta)) * log_term / budget.epsilon
    return 4.0 * family.T * N**2 * log_term / budget.epsilon


def min_database_size(family, budget: PrivacyBudget, alpha: float, beta: float) -> int:
    """Smallest ``n`` with ``accuracy_bound(family, n, budget, beta) <= alpha``."""
    if alpha <= family.gamma:
        raise ApproximationFloorError(
            f"approximation floor: alpha={alpha} must exceed the family's gamma={family.gamma}"
        )
    num = _noise_error_numerator(family, budget, beta)
    n = max(1, math.ceil(num / (alpha - family.gamma)))
    while accuracy_bound(family, n, budget, beta) > alpha:
        n += 1
    return n


# -- summary file format --

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not numeric fields")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if math.isnan(v):
        return "NaN"
    s = f"{v:.17g}"
    if not any(ch in s for ch in ".e"):
        s += ".0"
    return s


def dumps_summary(summary: Summary) -> str:
    fam = summary.family.as_dict()
    fam_items = []
    for key, val in fam.items():
        text = json.dumps(val) if isinstance(val, str) else _num(val)
        fam_items.append(f'"{key}": {text}')
    coeffs = ",\n    ".join(_num(c) for c in summary.coeffs.coeffs)
    seed = "null" if summary.seed is None else str(int(summary.seed))
    return (
        "{\n"
        f'  "format_version": {FORMAT_VERSION},\n'
        f'  "family": {{{", ".join(fam_items)}}},\n'
        f'  "n": {int(summary.n)},\n'
        f'  "epsilon": {_num(float(summary.budget.epsilon))},\n'
        f'  "delta": {_num(float(summary.budget.delta))},\n'
        f'  "noise_scale": {_num(float(summary.noise_scale))},\n'
        f'  "seed": {seed},\n'
        '  "coeff_order": "graded-lex",\n'
        f'  "coeffs": [\n    {coeffs}\n  ]\n'
        "}\n"
    )


def loads_summary(text: str) -> Summary:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"summary is not valid JSON: {exc.msg}", line=exc.lineno) from None
    if doc.get("format_version") != FORMAT_VERSION:
        raise ParseError(f"unsupported summary format_version {doc.get('format_version')!r}")
    if doc.get("coeff_order") != "graded-lex":
        raise ParseError(f"unsupported coeff_order {doc.get('coeff_order')!r}")
    try:
        f = doc["family"]
        family = FamilyDescriptor(
            kind=f["kind"], k=int(f["k"]), m=int(f["m"]), gamma=float(f["gamma"]),
            t=int(f["t"]), T=float(f["T"]), r=int(f["r"]) if "r" in f else None,
        )
        budget = PrivacyBudget(float(doc["epsilon"]), float(doc["delta"]))
        space = enumerate_index_space(family.m, family.t)
        coeffs = CoefficientVector(space, np.array(doc["coeffs"], dtype=np.float64))
        summary = Summary(family, int(doc["n"]), budget, coeffs,
                          float(doc["noise_scale"]), doc.get("seed"))
    except KeyError as exc:
        raise ParseError(f"summary is missing field {exc.args[0]!r}") from None
    expected = summary.expected_noise_scale()
    if not math.isclose(summary.noise_scale, expected, rel_tol=1e-12, abs_tol=0.0):
        raise ContractError(
            f"noise_scale {summary.noise_scale!r} does not match the budget formula ({expected!r})"
        )
    return summary


def save_summary(summary: Summary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_summary(summary))


def load_summary(path) -> Summary:
    with open(path, encoding="utf-8") as fh:
        return loads_summary(fh.read())
