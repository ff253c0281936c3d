import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from polyrelease.errors import (
    ApproximationFloorError,
    ContractError,
    DimensionError,
    IndexSetViolation,
    ParseError,
)
from polyrelease.families import (
    FamilyDescriptor,
    enumerate_decision_lists,
    enumerate_index_set,
    exact_query,
    lift_row,
    make_family,
)
from polyrelease.sanitizer import (
    PrivacyBudget,
    accuracy_bound,
    aggregate,
    answer,
    dumps_summary,
    laplace_noise,
    loads_summary,
    min_database_size,
    noise_scale,
    sanitize,
    sensitivity_bound,
)

NOISELESS = PrivacyBudget(math.inf)


def test_aggregate_single_and_repeated_rows():
    fam = make_family("disj", k=2, gamma=0.05, m=4)
    x = np.array([1, 0, 1, 1])
    lifted = lift_row(fam, x).coeffs
    np.testing.assert_array_equal(aggregate(fam, [x]).coeffs, lifted)
    np.testing.assert_allclose(aggregate(fam, [x, x]).coeffs, lifted, rtol=0, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 1), min_size=4, max_size=4), min_size=1, max_size=12), st.randoms())
def test_aggregate_is_order_invariant(rows, rnd):
    fam = make_family("rofk", k=2, r=2, gamma=0.1, m=4)
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    assert aggregate(fam, rows).coeffs.tobytes() == aggregate(fam, shuffled).coeffs.tobytes()


def test_aggregate_rejects_bad_databases():
    fam = make_family("disj", k=1, gamma=0.1, m=3)
    with pytest.raises(DimensionError):
        aggregate(fam, np.zeros((2, 4)))
    with pytest.raises(ValueError):
        aggregate(fam, np.full((2, 3), 2))
    with pytest.raises(ValueError):
        aggregate(fam, np.zeros((0, 3)))


def test_sensitivity_examples():
    assert sensitivity_bound(make_family("disj", k=1, gamma=0.1, m=3), 2) == 1.0
    desc = FamilyDescriptor("disj", 1, 3, 0.1, 1, 100.0)
    assert sensitivity_bound(desc, 10_000) == 0.02


def test_noise_scale_examples():
    assert noise_scale(PrivacyBudget(0.5), 50, 0.02) == pytest.approx(2.0, rel=1e-15)
    approx = noise_scale(PrivacyBudget(0.5, 1e-6), 50, 0.02)
    assert approx == pytest.approx(0.12 * math.sqrt(50 * math.log(1e6)), rel=1e-14)
    assert 3.153 <= approx < 3.154
    assert noise_scale(NOISELESS, 50, 0.02) == 0.0
    with pytest.raises(ContractError):
        noise_scale(PrivacyBudget(0.5), 50, 0.02, mode="approx")


def test_budget_validation():
    with pytest.raises(ValueError):
        PrivacyBudget(0.0)
    with pytest.raises(ValueError):
        PrivacyBudget(1.0, 1.0)


def test_noiseless_sanitize_equals_aggregate():
    fam = make_family("disj", k=2, gamma=0.05, m=5)
    db = np.random.default_rng(1).integers(0, 2, size=(30, 5))
    s = sanitize(fam, db, NOISELESS, seed=4)
    assert s.noise_scale == 0.0
    np.testing.assert_array_equal(s.coeffs.coeffs, aggregate(fam, db).coeffs)


def test_answer_examples():
    fam = make_family("disj", k=1, gamma=0.1, m=3)
    s = sanitize(fam, [[1, 1, 0], [0, 1, 1], [1, 1, 1]], NOISELESS)
    assert answer(s, [0, 1, 0]) == pytest.approx(1.0, abs=1e-9)
    assert answer(s, [0, 0, 0]) == 0.0
    with pytest.raises(IndexSetViolation):
        answer(s, [1, 1, 0])

    fam = make_family("disj", k=3, gamma=0.05, m=4)
    s = sanitize(fam, np.ones((5, 4), dtype=int), NOISELESS)
    for y in enumerate_index_set(fam):
        if any(y):
            assert abs(answer(s, y) - 1) <= 0.05


def test_clamped_answers_stay_in_unit_interval():
    fam = make_family("disj", k=2, gamma=0.05, m=4)
    s = sanitize(fam, np.eye(4, dtype=int), PrivacyBudget(0.01), seed=0)
    values = [answer(s, y, clamp=True) for y in enumerate_index_set(fam)]
    assert all(0.0 <= v <= 1.0 for v in values)


@pytest.mark.parametrize(
    "kind,kw,m",
    [("disj", {"k": 3}, 5), ("rofk", {"k": 3, "r": 2}, 5), ("declist", {"k": 2}, 3)],
)
def test_noiseless_answers_within_gamma(kind, kw, m):
    fam = make_family(kind, gamma=0.05, m=m, **kw)
    if kind == "declist":
        db = list(enumerate_decision_lists(2, m))[::5]
    else:
        db = list(itertools.product((0, 1), repeat=m)) * 2
    s = sanitize(fam, db, NOISELESS)
    for y in enumerate_index_set(fam):
        truth = np.mean([exact_query(fam, x, y) for x in db])
        assert abs(answer(s, y) - truth) <= fam.gamma + 1e-9


def test_accuracy_bound_examples():
    fam = make_family("disj", k=1, gamma=0.05, m=9)
    assert fam.T == 1.0 and fam.space.size == 10
    alpha = accuracy_bound(fam, 10**6, PrivacyBudget(1.0), 0.1)
    assert alpha == pytest.approx(0.05 + 400 * math.log(100) / 1e6, rel=1e-14)
    assert alpha == pytest.approx(0.0518421, abs=1e-7)
    assert accuracy_bound(fam, 10, NOISELESS, 0.1) == 0.05

    approx = accuracy_bound(fam, 10**6, PrivacyBudget(1.0, 1e-6), 0.1)
    want = 0.05 + 12 * 10 * math.sqrt(10 * math.log(1e6)) * math.log(100) / 1e6
    assert approx == pytest.approx(want, rel=1e-14)


def test_min_database_size_examples():
    fam = make_family("disj", k=1, gamma=0.05, m=9)
    n = min_database_size(fam, PrivacyBudget(1.0), 0.06, 0.1)
    assert n == 184207
    assert accuracy_bound(fam, n, PrivacyBudget(1.0), 0.1) <= 0.06
    assert accuracy_bound(fam, n - 1, PrivacyBudget(1.0), 0.1) > 0.06
    with pytest.raises(ApproximationFloorError, match="approximation floor"):
        min_database_size(fam, PrivacyBudget(1.0), 0.05, 0.1)


def test_laplace_noise_distribution():
    draws = laplace_noise(np.random.default_rng(0), 50_000, 2.5)
    assert stats.kstest(draws, stats.laplace(scale=2.5).cdf).pvalue > 0.01
    assert abs(np.mean(np.abs(draws)) - 2.5) / 2.5 < 0.03


def test_noise_stream_is_seeded():
    fam = make_family("disj", k=2, gamma=0.05, m=4)
    db = np.eye(4, dtype=int)
    a = sanitize(fam, db, PrivacyBudget(1.0), seed=12)
    b = sanitize(fam, db, PrivacyBudget(1.0), seed=12)
    c = sanitize(fam, db, PrivacyBudget(1.0), seed=13)
    assert a.coeffs.coeffs.tobytes() == b.coeffs.coeffs.tobytes()
    assert a.coeffs.coeffs.tobytes() != c.coeffs.coeffs.tobytes()


def test_summary_round_trip_is_bitwise():
    fam = make_family("rofk", k=2, r=1, gamma=0.05, m=4)
    s = sanitize(fam, np.eye(4, dtype=int), PrivacyBudget(0.7, 1e-5), seed=1)
    text = dumps_summary(s)
    back = loads_summary(text)
    assert dumps_summary(back) == text
    assert back.coeffs.coeffs.tobytes() == s.coeffs.coeffs.tobytes()
    assert back.family == s.family


def test_noiseless_summary_round_trip():
    fam = make_family("disj", k=1, gamma=0.1, m=2)
    text = dumps_summary(sanitize(fam, [[1, 0]], NOISELESS))
    assert '"epsilon": Infinity' in text
    assert dumps_summary(loads_summary(text)) == text


def test_tampered_noise_scale_is_rejected():
    fam = make_family("disj", k=1, gamma=0.1, m=2)
    text = dumps_summary(sanitize(fam, [[1, 0], [0, 1]], PrivacyBudget(1.0), seed=0))
    scale = repr(sanitize(fam, [[1, 0], [0, 1]], PrivacyBudget(1.0), seed=0).noise_scale)
    with pytest.raises(ContractError):
        loads_summary(text.replace(f'"noise_scale": {scale}', '"noise_scale": 0.5'))


def test_malformed_summary_reports_line():
    with pytest.raises(ParseError, match="line 2"):
        loads_summary('{\n  "n": ,\n}')
    with pytest.raises(ParseError, match="format_version"):
        loads_summary('{"format_version": 9}')
