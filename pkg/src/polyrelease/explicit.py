"""Explicit Chebyshev-composition construction of threshold approximants.

Builds ``p(t) = 1 - sum_{l < r} q3_l(t)`` where each ``q3_l`` approximates
the indicator of ``t == l`` on 0..k to within ``gamma / k``.  Every
intermediate polynomial is carried with exact rational coefficients, so the
band certificate is checked exactly.  The LP constructors in
:mod:`polyrelease.approx` remain the authoritative path; this one is a
cross-check.

Two constants in the construction are not pinned down by their source and
are treated as tunables, each verified against the band contract:

* ``log_base``: the base of the logarithm in ``delta = ceil(log(k/gamma) / log(base))``.
* ``decay``: the integer controlling the outer Chebyshev degree
  ``ceil(8 (decay + 1) (l + delta) / (sqrt(2) delta))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .approx import (
    LpFeasibilityProblem,
    ThresholdKind,
    UnivariateApproximant,
    fit_minimax,
    verify_bands,
)
from .errors import ExplicitPathError
from .poly import UnivariatePoly, chebyshev_int_coeffs

DEFAULT_BASES = ("k", math.e, 2.0)


def in_regime(r: int, k: int, gamma: float) -> bool:
    """Parameter range where the explicit construction applies (natural logs)."""
    if k < 2:
        return False
    lk = math.log(k)
    return r < k / lk**2 and math.log(1.0 / gamma) <= k / lk


# -- exact polynomial arithmetic on lists of Fractions, lowest degree first --

def _add(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _scale(p, c):
    return [c * v for v in p]


def _mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _horner(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _cheb_of(z: int, u):
    """``T_z(u(t))`` for a polynomial ``u``, by the three-term recurrence."""
    prev, cur = [Fraction(1)], list(u)
    if z == 0:
        return prev
    for _ in range(z - 1):
        prev, cur = cur, _add(_scale(_mul(u, cur), 2), _scale(prev, -1))
    return cur


def _cheb_value(z: int, u: Fraction) -> Fraction:
    prev, cur = Fraction(1), u
    if z == 0:
        return prev
    for _ in range(z - 1):
        prev, cur = cur, 2 * u * cur - prev
    return cur


@dataclass(frozen=True)
class ExactnessPiece:
    """Degrees and constants used to build one ``q3_l``."""

    ell: int
    delta: int
    inner_degree: int
    outer_degree: int

    @property
    def shift(self) -> int:
        return self.ell + self.delta


def _piece(ell: int, k: int, gamma: float, base: float, decay: int) -> ExactnessPiece:
    delta = max(1, math.ceil(math.log(k / gamma) / math.log(base)))
    span = k - ell - delta
    if span <= 0:
        raise ExplicitPathError(
            f"explicit-path construction undefined: k - l - delta = {span} <= 0 "
            f"(l={ell}, delta={delta})"
        )
    inner = math.ceil(math.sqrt(span / (ell + delta)))
    outer = math.ceil(8 * (decay + 1) * (ell + delta) / (math.sqrt(2) * delta))
    return ExactnessPiece(ell, delta, inner, outer)


def _q3_values(piece: ExactnessPiece, k: int) -> list:
    """Exact values of ``q3_l`` at t = 0..k, without expanding any polynomial."""
    ell, delta = piece.ell, piece.delta
    span = k - ell - delta
    gap = Fraction(delta * delta, 64 * (ell + delta) ** 2)
    centre = k - ell
    p1_c = _cheb_value(piece.inner_degree, Fraction(centre, span))

    def p4(s):
        p2 = ((_cheb_value(piece.inner_degree, Fraction(s, span)) - p1_c) / 8) ** 2
        return _cheb_value(piece.outer_degree, 1 + gap - p2)

    def q1(s):
        out = Fraction(1)
        for i in range(-(delta - 1), delta):
            if i != 0:
                out *= s - (centre - i)
        return out

    norm = p4(centre) * q1(centre)
    return [p4(k - t) * q1(k - t) / norm for t in range(k + 1)]


def _q3_poly(piece: ExactnessPiece, k: int) -> list:
    """Exact monomial coefficients of ``q3_l(t)``."""
    ell, delta = piece.ell, piece.delta
    span = k - ell - delta
    centre = k - ell
    gap = Fraction(delta * delta, 64 * (ell + delta) ** 2)
    # p1(t) = T_a(t / span)
    p1 = [Fraction(c, span**i) for i, c in enumerate(chebyshev_int_coeffs(piece.inner_degree))]
    p1_c = _horner(p1, Fraction(centre))
    diff = _scale(_add(p1, [-p1_c]), Fraction(1, 8))
    p2 = _mul(diff, diff)
    u = _add([1 + gap], _scale(p2, -1))
    p3 = _cheb_of(piece.outer_degree, u)
    q1 = [Fraction(1)]
    for i in range(-(delta - 1), delta):
        if i != 0:
            q1 = _mul(q1, [Fraction(-(centre - i)), Fraction(1)])
    q2 = _scale(_mul(p3, q1), 1 / (_horner(p3, Fraction(centre)) * _horner(q1, Fraction(centre))))
    # q3(t) = q2(k - t): substitute t -> k - t
    out = [Fraction(0)]
    power = [Fraction(1)]
    lin = [Fraction(k), Fraction(-1)]
    for c in q2:
        out = _add(out, _scale(power, c))
        power = _mul(power, lin)
    return out


def _find_pieces(r, k, gamma, bases, max_decay):
    target = Fraction(gamma) / k
    for base in bases:
        b = float(k) if base == "k" else float(base)
        for decay in range(max_decay + 1):
            try:
                pieces = [_piece(ell, k, gamma, b, decay) for ell in range(r)]
            except ExplicitPathError:
                break
            ok = True
            for piece in pieces:
                vals = _q3_values(piece, k)
                if any(abs(v - (1 if t == piece.ell else 0)) > target for t, v in enumerate(vals)):
                    ok = False
                    break
            if ok:
                return base, decay, pieces
    return None


def construct_threshold_explicit(
    r: int,
    k: int,
    gamma: float,
    *,
    bases=DEFAULT_BASES,
    max_decay: int = 40,
    enforce_regime: bool = True,
) -> UnivariateApproximant:
    """Threshold approximant from the explicit Chebyshev pipeline.

    Outside :func:`in_regime` (when ``enforce_regime``) the result is the
    exact degree-k interpolant instead.  Raises :class:`ExplicitPathError`
    when no tunable setting passes verification.  The returned ``gamma`` is
    the exact rational band error; ``info["float64_error"]`` records what
    float64 Horner evaluation of the rounded coefficients achieves, which
    degrades quickly with degree.
    """
    if not 1 <= r <= k:
        raise ValueError(f"need 1 <= r <= k, got r={r}, k={k}")
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    kind = ThresholdKind(r, k)
    if enforce_regime and not in_regime(r, k, gamma):
        poly, _ = fit_minimax(LpFeasibilityProblem.for_kind(kind, k))
        err = verify_bands(poly, kind)
        return UnivariateApproximant(
            poly, kind, err, info={"path": "interpolation", "float64_error": err}
        )

    found = _find_pieces(r, k, gamma, bases, max_decay)
    if found is None:
        raise ExplicitPathError(
            f"explicit-path verification failed for r={r}, k={k}, gamma={gamma}: "
            f"no log base in {list(bases)} with decay <= {max_decay} met gamma/k per piece"
        )
    base, decay, pieces = found
    exact = [Fraction(1)]
    for piece in pieces:
        exact = _add(exact, _scale(_q3_poly(piece, k), -1))
    exact_err = max(abs(_horner(exact, Fraction(t)) - (1 if t >= r else 0)) for t in range(k + 1))
    if exact_err > Fraction(gamma):
        raise ExplicitPathError(
            f"explicit-path verification failed: exact band error {float(exact_err):.3e} > {gamma}"
        )
    poly = UnivariatePoly(np.array([float(c) for c in exact]))
    info = {
        "path": "explicit",
        "log_base": base,
        "decay": decay,
        "pieces": pieces,
        "exact_coeffs": tuple(exact),
        "float64_error": verify_bands(poly, kind),
    }
    return UnivariateApproximant(poly, kind, float(exact_err), info=info)
