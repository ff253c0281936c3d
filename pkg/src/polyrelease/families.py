"""Query families: disjunctions, r-of-k thresholds and decision lists.

A family fixes the index set ``Y`` of admissible queries, the exact answer
``q_y(x)`` for a record ``x``, and the lift ``x -> p_x``: a coefficient
vector whose polynomial is within ``gamma`` of ``y -> q_y(x)`` on all of
``Y``.  The lift's coefficients are bounded by a data-independent ``T``
which calibrates the release noise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .approx import (
    UnivariateApproximant,
    construct_dl_helper,
    construct_or_approximant,
    construct_threshold_approximant,
)
from .errors import AuditScaleError, DimensionError, IndexSetViolation
from .poly import CoefficientVector, MonomialIndexSpace, compose_affine, enumerate_index_space

KINDS = ("disj", "rofk", "declist")
DEFAULT_INDEX_CAP = 10**6


class Rule(NamedTuple):
    var: int  # 0-based variable index
    negated: bool
    output: int


@dataclass(frozen=True)
class DecisionList:
    """``if l_1 then b_1 else ... else default``.

    A literal fires when its variable is 1, or 0 if negated.
    """

    rules: tuple
    default: int

    def __post_init__(self):
        rules = tuple(Rule(int(v), bool(n), int(b)) for v, n, b in self.rules)
        object.__setattr__(self, "rules", rules)
        for rule in rules:
            if rule.var < 0:
                raise ValueError(f"negative variable index {rule.var}")
            if rule.output not in (0, 1):
                raise ValueError(f"rule output must be 0 or 1, got {rule.output}")
        if self.default not in (0, 1):
            raise ValueError(f"default output must be 0 or 1, got {self.default}")

    def __len__(self):
        return len(self.rules)

    def __call__(self, y) -> int:
        for rule in self.rules:
            if bool(y[rule.var]) != rule.negated:
                return rule.output
        return self.default

    def sort_key(self) -> tuple:
        return (len(self.rules), tuple(self.rules), self.default)

    def describe(self) -> str:
        parts = [f"{'!' if r.negated else ''}x{r.var + 1}:{r.output}" for r in self.rules]
        return ";".join(parts + [f"default:{self.default}"])


class _QueryShape:
    # shared by full families and the descriptors stored in released summaries

    @property
    def space(self) -> MonomialIndexSpace:
        return enumerate_index_space(self.m, self.t)

    @property
    def index_set_size(self) -> int:
        if self.kind == "declist":
            return 2**self.m
        return sum(math.comb(self.m, s) for s in range(min(self.k, self.m) + 1))

    def same_queries(self, other) -> bool:
        return (self.kind, self.k, self.r, self.m) == (other.kind, other.k, other.r, other.m)


@dataclass(frozen=True)
class FamilyDescriptor(_QueryShape):
    """The public parameters of a family, as recorded in a released summary."""

    kind: str
    k: int
    m: int
    gamma: float
    t: int
    T: float
    r: int | None = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "k": self.k}
        if self.kind == "rofk":
            out["r"] = self.r
        out.update(m=self.m, gamma=self.gamma, t=self.t, T=self.T)
        return out


@dataclass(frozen=True, eq=False)
class QueryFamily(_QueryShape):
    """One of the three query classes with its backing approximant and norm bound ``T``."""

    kind: str
    k: int
    m: int
    gamma: float
    approximant: UnivariateApproximant
    T: float
    r: int | None = None

    @property
    def t(self) -> int:
        return self.approximant.degree

    def descriptor(self) -> FamilyDescriptor:
        return FamilyDescriptor(self.kind, self.k, self.m, self.gamma, self.t, self.T, self.r)


def make_family(kind: str, *, k: int, gamma: float, m: int, r: int | None = None) -> QueryFamily:
    """Build a family and its certified norm bound.

    ``m`` is the record width ``d`` for ``disj``/``rofk`` and the number of
    decision-list variables for ``declist``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown family kind {kind!r}; expected one of {KINDS}")
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if k < 1 or m < 1:
        raise ValueError(f"need k >= 1 and m >= 1, got k={k}, m={m}")
    if kind == "rofk":
        if r is None or not 1 <= r <= k:
            raise ValueError(f"rofk needs 1 <= r <= k, got r={r}, k={k}")
    elif r is not None:
        raise ValueError(f"r is only meaningful for rofk, got r={r} with kind {kind!r}")

    if kind == "disj":
        approx = construct_or_approximant(k, gamma)
    elif kind == "rofk":
        approx = construct_threshold_approximant(r, k, gamma)
    else:
        approx = construct_dl_helper(k, gamma / k)
    T = norm_bound(kind, k, approx)
    return QueryFamily(kind, k, m, gamma, approx, T, r)


def norm_bound(kind: str, k: int, approx: UnivariateApproximant) -> float:
    c = np.abs(approx.poly.coeffs)
    i = np.arange(c.size)
    if kind == "declist":
        # each h(A) term has |constant| + sum|weights| <= 2k, so a monomial picks
        # up at most sum_i |c_i| (2k)^i from it; at most k + 1 terms are summed
        return float((k + 1) * np.sum(c * (2.0 * k) ** i))
    return float(np.max(c * float(k) ** i))


def certified_norm_bound(family: QueryFamily) -> float:
    return norm_bound(family.kind, family.k, family.approximant)


def _bits(x, m: int, what: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] != m:
        raise DimensionError(f"{what} must be a bit vector of length {m}, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{what} entries must be 0 or 1")
    return arr.astype(np.int8)


def check_index(family: QueryFamily, y) -> np.ndarray:
    bits = _bits(y, family.m, "query index")
    if family.kind != "declist" and int(bits.sum()) > family.k:
        raise IndexSetViolation(
            f"index-set violation: query selects {int(bits.sum())} attributes, k={family.k}"
        )
    return bits


def check_row(family: QueryFamily, x):
    if family.kind == "declist":
        if not isinstance(x, DecisionList):
            raise TypeError(f"declist family expects DecisionList records, got {type(x).__name__}")
        if len(x) > family.k:
            raise ValueError(f"decision list has {len(x)} rules, k={family.k}")
        if any(rule.var >= family.m for rule in x.rules):
            raise ValueError(f"decision list refers to a variable beyond m={family.m}")
        return x
    return _bits(x, family.m, "row")


def exact_query(family: QueryFamily, x, y) -> int:
    """The true 0/1 answer of query ``y`` on record ``x``."""
    y = check_index(family, y)
    x = check_row(family, x)
    if family.kind == "declist":
        return x(y)
    hits = int(np.dot(x.astype(np.int64), y))
    if family.kind == "disj":
        return int(hits > 0)
    return int(hits >= family.r)


def _literal(var: int, negated: bool, m: int, fires: bool):
    """Affine form of the literal indicator (``fires``) or its complement."""
    w = np.zeros(m)
    sign = 1.0 if fires != negated else -1.0
    w[var] = sign
    return w, (0.0 if sign > 0 else 1.0)


def decision_list_terms(dl: DecisionList, k: int, m: int):
    """Affine arguments ``(output, weights, constant)`` of each ``h_k`` term.

    The argument of term ``i`` equals ``k`` exactly when rule ``i`` is the
    first to fire (or, for the default, when none fires) and is below ``k``
    otherwise.
    """
    terms = []
    acc_w, acc_c = np.zeros(m), 0.0
    for i, rule in enumerate(dl.rules, start=1):
        w, c = _literal(rule.var, rule.negated, m, fires=True)
        terms.append((rule.output, acc_w + w, acc_c + c + (k - i)))
        nw, nc = _literal(rule.var, rule.negated, m, fires=False)
        acc_w, acc_c = acc_w + nw, acc_c + nc
    terms.append((dl.default, acc_w, acc_c + (k - len(dl))))
    return terms


def lift_row(family: QueryFamily, x) -> CoefficientVector:
    """Coefficient vector of the polynomial ``y -> p_x(y)`` approximating ``q_y(x)``."""
    x = check_row(family, x)
    space = family.space
    g = family.approximant.poly
    if family.kind != "declist":
        return compose_affine(g, x.astype(np.float64), 0.0, space)
    total = np.zeros(space.size)
    for output, w, c in decision_list_terms(x, family.k, family.m):
        if output:
            total += compose_affine(g, w, c, space).coeffs
    return CoefficientVector(space, total)


def enumerate_index_set(family: QueryFamily, cap: int = DEFAULT_INDEX_CAP) -> Iterator[tuple]:
    """Every admissible query index once, by popcount then lexicographic position."""
    size = family.index_set_size
    if size > cap:
        raise AuditScaleError(f"index set has {size} queries, audit cap is {cap}")
    top = family.m if family.kind == "declist" else min(family.k, family.m)
    return _indices(family.m, top)


def _indices(m: int, top: int):
    for s in range(top + 1):
        for chosen in itertools.combinations(range(m), s):
            y = [0] * m
            for j in chosen:
                y[j] = 1
            yield tuple(y)


def index_set_array(family: QueryFamily, cap: int = DEFAULT_INDEX_CAP) -> np.ndarray:
    ys = list(enumerate_index_set(family, cap))
    return np.array(ys, dtype=np.int8).reshape(len(ys), family.m)


def enumerate_decision_lists(k: int, m: int) -> Iterator[DecisionList]:
    """All decision lists with at most ``k`` rules over ``m`` variables."""
    literals = [(v, neg, b) for v in range(m) for neg in (False, True) for b in (0, 1)]
    for length in range(k + 1):
        for rules in itertools.product(literals, repeat=length):
            for default in (0, 1):
                yield DecisionList(rules, default)


def double_row(x) -> np.ndarray:
    """Map a record to ``(x, 1 - x)`` so negated attributes become monotone ones."""
    x = np.asarray(x, dtype=np.int8)
    return np.concatenate([x, 1 - x])


def double_query(positive, negative, d: int) -> np.ndarray:
    """Index over the doubled domain for ``OR(x_j, j in positive; not x_j, j in negative)``."""
    y = np.zeros(2 * d, dtype=np.int8)
    for j in positive:
        y[j] = 1
    for j in negative:
        y[d + j] = 1
    return y
