"""Monomial index spaces, coefficient vectors and univariate polynomials.

The coefficient space is the full (non-multilinear) space of all monomials
of total degree at most ``t`` in ``m`` variables, ordered graded-lex:
ascending total degree, then ascending lexicographic order on the exponent
tuple.  At Boolean points every monomial evaluates to 0 or 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DegreeOverflowError, DimensionError, IndexSpaceTooLarge

DEFAULT_SPACE_CAP = 2_000_000


def _compositions(total: int, parts: int):
    """Yield tuples of ``parts`` non-negative ints summing to ``total``, ascending lex."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MonomialIndexSpace:
    """All multi-indices ``(j_1, ..., j_m)`` with ``sum(j) <= t``, graded-lex ordered."""

    m: int
    t: int

    @property
    def size(self) -> int:
        return math.comb(self.m + self.t, self.t)

    def __len__(self) -> int:
        return self.size

    @cached_property
    def exponents(self) -> np.ndarray:
        """``(size, m)`` integer array; row ``i`` is the multi-index at position ``i``."""
        rows = [e for s in range(self.t + 1) for e in _compositions(s, self.m)]
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), self.m)
        arr.setflags(write=False)
        return arr

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = self.exponents.sum(axis=1)
        deg.setflags(write=False)
        return deg

    @cached_property
    def multinomials(self) -> np.ndarray:
        """``|e|! / prod(e_j!)`` per multi-index, computed in exact integers."""
        fact = [math.factorial(i) for i in range(self.t + 1)]
        vals = []
        for e in self.exponents.tolist():
            denom = 1
            for j in e:
                denom *= fact[j]
            vals.append(float(fact[sum(e)] // denom))
        out = np.array(vals, dtype=np.float64)
        out.setflags(write=False)
        return out

    @cached_property
    def _support(self) -> np.ndarray:
        return (self.exponents > 0).astype(np.int32)

    @cached_property
    def _positions(self) -> dict:
        return {e: i for i, e in enumerate(map(tuple, self.exponents.tolist()))}

    def multi_index_of(self, i: int) -> tuple:
        if not 0 <= i < self.size:
            raise IndexError(f"index {i} outside space of size {self.size}")
        return tuple(int(v) for v in self.exponents[i])

    def index_of(self, idx: Sequence[int]) -> int:
        key = tuple(int(v) for v in idx)
        if len(key) != self.m:
            raise DimensionError(f"multi-index has {len(key)} entries, space has m={self.m}")
        try:
            return self._positions[key]
        except KeyError:
            raise KeyError(f"{key} is not a multi-index of total degree <= {self.t}") from None

    def __iter__(self):
        return iter(map(tuple, self.exponents.tolist()))

    def monomial_matrix(self, ys) -> np.ndarray:
        """Evaluate every monomial at every Boolean point: shape ``(len(ys), size)``."""
        Y = _as_bits_matrix(ys, self.m)
        misses = (1 - Y).astype(np.int32) @ self._support.T
        return (misses == 0).astype(np.float64)


@lru_cache(maxsize=64)
def _cached_space(m: int, t: int) -> MonomialIndexSpace:
    return MonomialIndexSpace(m, t)


def enumerate_index_space(m: int, t: int, cap: int = DEFAULT_SPACE_CAP) -> MonomialIndexSpace:
    """Return the graded-lex index space of ``m``-variate monomials of degree <= ``t``."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    size = math.comb(m + t, t)
    if size > cap:
        raise IndexSpaceTooLarge(
            f"index space too large: C(m+t, t) = C({m + t}, {t}) = {size} exceeds cap {cap}"
        )
    return _cached_space(m, t)


def _as_bits(y, m: int | None = None) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise DimensionError(f"expected a bit vector, got shape {arr.shape}")
    if m is not None and arr.shape[0] != m:
        raise DimensionError(f"bit vector has length {arr.shape[0]}, expected {m}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    return arr.astype(np.int8)


def _as_bits_matrix(ys, m: int) -> np.ndarray:
    Y = np.asarray(ys)
    if Y.ndim == 1:
        Y = Y.reshape(1, -1)
    if Y.ndim != 2 or Y.shape[1] != m:
        raise DimensionError(f"expected points of length {m}, got shape {Y.shape}")
    if not np.all((Y == 0) | (Y == 1)):
        raise ValueError("bit vector entries must be 0 or 1")
    return Y.astype(np.int8)


def eval_monomial(idx: Sequence[int], y) -> float:
    """Value of ``prod(y_l ** j_l)`` at a Boolean point (``0 ** 0 == 1``)."""
    e = np.asarray(idx, dtype=np.int64)
    bits = _as_bits(y)
    if e.shape != bits.shape:
        raise DimensionError(f"multi-index length {e.size} != point length {bits.size}")
    return 0.0 if np.any((e > 0) & (bits == 0)) else 1.0


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Dense coefficients of a polynomial over a :class:`MonomialIndexSpace`."""

    space: MonomialIndexSpace
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.float64, copy=True)
        if arr.shape != (self.space.size,):
            raise DimensionError(
                f"coefficient array has shape {arr.shape}, space needs ({self.space.size},)"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, space: MonomialIndexSpace) -> "CoefficientVector":
        return cls(space, np.zeros(space.size))

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __call__(self, y) -> float:
        return eval_coeff_vector(self, y)

    def eval_many(self, ys) -> np.ndarray:
        return self.space.monomial_matrix(ys) @ self.coeffs


def eval_coeff_vector(p: CoefficientVector, y) -> float:
    """Evaluate ``p`` at a Boolean point, i.e. the inner product ``p . y_vec``."""
    bits = _as_bits(y, p.space.m)
    live = ~np.any((p.space.exponents > 0) & (bits == 0), axis=1)
    return float(p.coeffs[live].sum())


@dataclass(frozen=True, eq=False)
class UnivariatePoly:
    """``c_0 + c_1 x + ... + c_t x^t``; the leading entry may be zero."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.array(self.coeffs, dtype=np.float64, copy=True))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("univariate polynomial needs a non-empty 1-d coefficient array")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return eval_univariate(self, x)

    def __eq__(self, other):
        if not isinstance(other, UnivariatePoly):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def trimmed(self) -> "UnivariatePoly":
        nz = np.flatnonzero(self.coeffs)
        last = int(nz[-1]) if nz.size else 0
        return UnivariatePoly(self.coeffs[: last + 1])


def eval_univariate(g: UnivariatePoly, x):
    """Horner evaluation in float64; ``x`` may be a scalar or array."""
    x = np.asarray(x, dtype=np.float64)
    acc = np.zeros_like(x)
    for c in g.coeffs[::-1]:
        acc = acc * x + c
    return float(acc) if acc.ndim == 0 else acc


@lru_cache(maxsize=None)
def _chebyshev_int(z: int) -> tuple:
    if z == 0:
        return (1,)
    if z == 1:
        return (0, 1)
    prev, cur = (1,), (0, 1)
    for _ in range(2, z + 1):
        nxt = [0] * (len(cur) + 1)
        for i, c in enumerate(cur):
            nxt[i + 1] += 2 * c
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, tuple(nxt)
    return cur


def chebyshev_int_coeffs(z: int) -> tuple:
    """Exact integer coefficients of ``T_z``, lowest degree first."""
    if z < 0:
        raise ValueError(f"Chebyshev degree must be non-negative, got {z}")
    return _chebyshev_int(z)


def chebyshev(z: int) -> UnivariatePoly:
    """Chebyshev polynomial of the first kind ``T_z`` from the three-term recurrence."""
    return UnivariatePoly([float(c) for c in chebyshev_int_coeffs(z)])


def _shift(coeffs: np.ndarray, constant) -> np.ndarray:
    # coefficients a_s of z -> g(constant + z)
    deg = coeffs.size - 1
    out = np.zeros(deg + 1)
    exact = float(constant).is_integer()
    c_int = int(constant) if exact else None
    for s in range(deg + 1):
        total = 0.0
        for i in range(s, deg + 1):
            if coeffs[i] == 0.0:
                continue
            if exact:
                factor = float(math.comb(i, s) * c_int ** (i - s))
            else:
                factor = math.comb(i, s) * float(constant) ** (i - s)
            total += coeffs[i] * factor
        out[s] = total
    return out


def compose_affine(
    g: UnivariatePoly,
    weights: Iterable[float],
    constant: float,
    space: MonomialIndexSpace,
) -> CoefficientVector:
    """Expand ``y -> g(constant + sum_j weights_j * y_j)`` into ``space``.

    The expansion is done without collapsing ``y_j ** 2`` to ``y_j``, so the
    result lives in the full degree-``t`` monomial space.
    """
    w = np.asarray(list(weights), dtype=np.float64)
    if w.shape != (space.m,):
        raise DimensionError(f"got {w.size} weights for a space with m={space.m}")
    gt = g.trimmed()
    if gt.degree > space.t:
        raise DegreeOverflowError(
            f"polynomial degree {gt.degree} exceeds space degree t={space.t}"
        )
    shifted = _shift(gt.coeffs, constant)
    by_degree = np.zeros(space.t + 1)
    by_degree[: shifted.size] = shifted
    E = space.exponents
    if np.all((w == 0) | (w == 1)):
        mono = np.all((E == 0) | (w[None, :] == 1), axis=1).astype(np.float64)
    else:
        mono = np.prod(np.power(w[None, :], E), axis=1)
    coeffs = by_degree[space.degrees] * space.multinomials * mono
    return CoefficientVector(space, coeffs)
