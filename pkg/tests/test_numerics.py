"""Signed-log arithmetic and stable binomial helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickebell.numerics import (NEG_INF, log_binomial, log_factorial,
                                set_precision_mode, slog, slog_mul, slog_pow,
                                slog_sum, slog_sum_mp, slog_sum_vec,
                                slog_to_float)


def test_log_binomial_small_exact():
    assert math.isclose(log_binomial(4, 2), math.log(6), rel_tol=1e-14)
    assert log_binomial(0, 0) == 0.0
    assert log_binomial(3, 5) == NEG_INF
    assert log_binomial(3, -1) == NEG_INF


def test_log_binomial_against_big_integer():
    # exact big-integer reference at the table scale
    ref = math.log(math.comb(10_000, 5_000))
    assert abs(log_binomial(10_000, 5_000) - ref) <= 1e-9 * abs(ref)


def test_log_factorial_matches_comb():
    for a in (0, 1, 2, 7, 40):
        assert math.isclose(log_factorial(a), math.log(math.factorial(a)),
                            rel_tol=1e-13)


def test_slog_roundtrip_and_saturation():
    s, l = slog(-3.5)
    assert s == -1 and math.isclose(slog_to_float(s, l), -3.5, rel_tol=1e-15)
    assert slog_to_float(0, NEG_INF) == 0.0
    assert slog_to_float(1, 1000.0) == math.inf
    assert slog_to_float(-1, 1000.0) == -math.inf


def test_slog_mul_pow():
    a, b = slog(-2.0), slog(3.0)
    s, l = slog_mul(a, b)
    assert s == -1 and math.isclose(math.exp(l), 6.0, rel_tol=1e-14)
    s, l = slog_pow(slog(-2.0), 3)
    assert s == -1 and math.isclose(math.exp(l), 8.0, rel_tol=1e-14)
    assert slog_pow(slog(0.0), 0) == (1, 0.0)
    with pytest.raises(ValueError):
        slog_pow(slog(2.0), -1)


def test_slog_sum_cancellation_reporting():
    s, l, canc = slog_sum([(1, 0.0), (1, 0.0)])
    assert s == 1 and math.isclose(math.exp(l), 2.0) and canc == 1.0
    s, l, canc = slog_sum([(1, 0.0), (-1, 0.0)])
    assert s == 0 and l == NEG_INF and canc == math.inf
    # 1e8 - (1e8 - 1): gross/net ~ 2e8
    big = math.log(1e8)
    s, l, canc = slog_sum([(1, big), (-1, math.log(1e8 - 1.0))])
    assert s == 1 and canc > 1e7


@given(st.lists(st.floats(-1e3, 1e3).filter(lambda v: abs(v) > 1e-6),
                min_size=1, max_size=30))
@settings(max_examples=200, deadline=None)
def test_slog_sum_vec_matches_fsum(values):
    terms = [slog(v) for v in values]
    signs = np.array([t[0] for t in terms])
    logs = np.array([t[1] for t in terms])
    s, l, _ = slog_sum_vec(signs, logs)
    ref = math.fsum(values)
    got = slog_to_float(s, l)
    assert math.isclose(got, ref, rel_tol=1e-9, abs_tol=1e-9)


def test_slog_sum_mp_agrees_with_float_path():
    terms = [slog(v) for v in (1.25, -0.75, 3.0, -2.25)]
    s1, l1, _ = slog_sum(terms)
    s2, l2, _ = slog_sum_mp(terms)
    assert s1 == s2 and math.isclose(l1, l2, rel_tol=1e-12)


def test_precision_mode_toggle():
    set_precision_mode("extended")
    try:
        with pytest.raises(ValueError):
            set_precision_mode("quad")
    finally:
        set_precision_mode("standard")
