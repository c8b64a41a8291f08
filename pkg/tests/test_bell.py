"""Closed-form Hardy and MABK evaluation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickebell.bell import (LOG_MODE_N, MABK_N_CAP, InequalityKind,
                            MeasurementPair, beta_coefficient, hardy_value,
                            hardy_value_mixture, mabk_closed_vacuum,
                            mabk_closed_w, mabk_value_mixture,
                            symmetric_correlator)
from dickebell.errors import (ConstructionError, DomainError,
                              ResourceLimitError, SingularAngleError)
from dickebell.states import DickeMixture, excitation_loss, make_pure

ANGLES = st.floats(-math.pi, math.pi).filter(lambda a: abs(a) > 1e-6)


def _pair(a0, a1):
    return MeasurementPair(a0, a1)


# ----------------------------------------------------------------------
# measurement pair
# ----------------------------------------------------------------------

def test_pair_canonical_range():
    p = _pair(3 * math.pi, -3 * math.pi)
    assert -math.pi < p.alpha0 <= math.pi
    assert -math.pi < p.alpha1 <= math.pi
    assert math.isclose(p.alpha0, math.pi)
    with pytest.raises(ConstructionError):
        _pair(math.nan, 0.0)
    with pytest.raises(ConstructionError):
        _pair(0.0, math.inf)


# ----------------------------------------------------------------------
# Hardy
# ----------------------------------------------------------------------

def test_hardy_vacuum_at_zero_angles():
    # 1 - n at alpha0 = alpha1 = 0
    assert abs(hardy_value(3, 0, _pair(0.0, 0.0)) - (-2.0)) <= 1e-12


def test_hardy_w_at_zero_angles():
    # every term carries a sine factor
    assert abs(hardy_value(3, 1, _pair(0.0, 0.0))) <= 1e-12


def test_hardy_domain_errors():
    with pytest.raises(DomainError):
        hardy_value(3, 4, _pair(0.1, 0.2))
    with pytest.raises(DomainError):
        hardy_value(1, 0, _pair(0.1, 0.2))


@given(a0=ANGLES, a1=ANGLES, n=st.integers(2, 40))
@settings(max_examples=150, deadline=None)
def test_hardy_k1_matches_specialized_form(n, a0, a1):
    # the general alternating form must reduce to the one-excitation
    # closed form: S = n c0^{2(n-1)} s0^2
    #   - [c0^{n-1} s1 + (n-1) c0^{n-2} c1 s0]^2 - n s1^{2(n-1)} c1^2
    # written in projector half-angles
    h0, h1 = a0 / 2.0, a1 / 2.0
    c0, s0 = math.cos(h0), math.sin(h0)
    c1, s1 = math.cos(h1), math.sin(h1)
    ref = (n * c0 ** (2 * (n - 1)) * s0 ** 2
           - (c0 ** (n - 1) * s1 + (n - 1) * c0 ** (n - 2) * c1 * s0) ** 2
           - n * s1 ** (2 * (n - 1)) * c1 ** 2)
    got = hardy_value(n, 1, _pair(a0, a1))
    assert math.isclose(got, ref, rel_tol=1e-12, abs_tol=1e-12)


@given(a0=ANGLES, a1=ANGLES, n=st.integers(2, 40))
@settings(max_examples=150, deadline=None)
def test_hardy_k0_matches_specialized_form(n, a0, a1):
    h0, h1 = a0 / 2.0, a1 / 2.0
    c0 = math.cos(h0)
    c1, s1 = math.cos(h1), math.sin(h1)
    ref = c0 ** (2 * n) - n * c0 ** (2 * (n - 1)) * c1 ** 2 - s1 ** (2 * n)
    got = hardy_value(n, 0, _pair(a0, a1))
    assert math.isclose(got, ref, rel_tol=1e-12, abs_tol=1e-12)


@given(a0=ANGLES, a1=ANGLES, w=st.floats(0.05, 0.95))
@settings(max_examples=100, deadline=None)
def test_hardy_mixture_linearity(a0, a1, w):
    pair = _pair(a0, a1)
    mix = DickeMixture(n=5, weights={1: w, 0: 1.0 - w})
    lhs = hardy_value_mixture(mix, pair).value
    rhs = w * hardy_value(5, 1, pair) + (1 - w) * hardy_value(5, 0, pair)
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


def test_hardy_mixture_point_mass_and_flag():
    pair = _pair(0.7, -2.9)
    mix = make_pure(5, 1)
    bv = hardy_value_mixture(mix, pair)
    assert bv.value == hardy_value(5, 1, pair)
    assert bv.local_bound == 0.0
    assert bv.violated == (bv.value > 1e-12)


# ----------------------------------------------------------------------
# MABK input weights and correlators
# ----------------------------------------------------------------------

def test_beta_values():
    assert math.isclose(beta_coefficient(1, 2), 2.0, abs_tol=1e-14)
    assert math.isclose(beta_coefficient(0, 2), -2.0, abs_tol=1e-14)
    assert math.isclose(beta_coefficient(2, 3), 4.0, abs_tol=1e-14)


def test_beta_signed_powers_of_two():
    # |beta| is 0 or an exact power of two for every (x, N)
    for n in range(2, 20):
        for x in range(n + 1):
            b = beta_coefficient(x, n)
            if b == 0.0:
                continue
            assert math.isclose(math.log2(abs(b)) % 1.0, 0.0, abs_tol=1e-12)


@given(a0=ANGLES, a1=ANGLES, n=st.integers(2, 50),
       x_frac=st.floats(0, 1))
@settings(max_examples=150, deadline=None)
def test_vacuum_correlator_factorizes(n, x_frac, a0, a1):
    # E(x) for the vacuum is a plain product c0^(n-x) c1^x
    x = round(x_frac * n)
    got = symmetric_correlator(n, 0, x, _pair(a0, a1))
    ref = math.cos(a0) ** (n - x) * math.cos(a1) ** x
    assert math.isclose(got, ref, rel_tol=1e-12, abs_tol=1e-14)


def test_correlator_domain():
    with pytest.raises(DomainError):
        symmetric_correlator(4, 5, 0, _pair(0.3, 0.4))
    with pytest.raises(DomainError):
        symmetric_correlator(4, 1, 5, _pair(0.3, 0.4))


# ----------------------------------------------------------------------
# MABK values
# ----------------------------------------------------------------------

def test_mabk_vacuum_value_at_zero_angles():
    # all correlators are 1, so M = sum_x C(4,x) beta(x,4) = 2^4 exactly.
    # (conventions that rescale the inequality by 2^{(n+1)/2} quote this
    # value as 2^{3/2}; here the local bound is 2^n, so the full sum is
    # the consistent normalization)
    bv = mabk_value_mixture(make_pure(4, 0), _pair(0.0, 0.0))
    assert math.isclose(bv.value, 2.0 ** 4, rel_tol=1e-12)
    assert math.isclose(bv.value,
                        2.0 ** 2.5 * 2.0 ** 1.5, rel_tol=1e-12)
    assert not bv.violated
    assert bv.local_bound == 2.0 ** 4


def test_mabk_w3_ansatz_violates():
    from dickebell.thresholds import MABK_W, ansatz_measurement_pair
    pair = ansatz_measurement_pair(MABK_W, 3)
    bv = mabk_value_mixture(make_pure(3, 1), pair)
    assert abs(bv.value) > 2.0 ** 3
    assert bv.violated


def test_mabk_2party_quantum_cap():
    from dickebell.thresholds import optimize_angles, seed_pairs
    state = make_pure(2, 1)
    _, value = optimize_angles(2, state, InequalityKind.MABK,
                               seed_pairs(2, 1, InequalityKind.MABK))
    assert abs(value) <= 4.0 * math.sqrt(2.0) + 1e-9


def test_mabk_cap_raises():
    with pytest.raises(ResourceLimitError):
        mabk_value_mixture(make_pure(MABK_N_CAP + 1, 1), _pair(0.2, 0.3))


def test_mabk_log_mode_consistency():
    # just above the log-mode switch the scaled value must continue the
    # plain-value curve
    pair = _pair(0.11, -0.23)
    lo = mabk_value_mixture(make_pure(LOG_MODE_N, 1), pair)
    hi = mabk_value_mixture(make_pure(LOG_MODE_N + 1, 1), pair)
    assert lo.log_scale is None and hi.log_scale is not None
    assert abs(hi.value) == 1.0  # sign carrier
    assert math.isfinite(hi.log_scale)


@given(a0=ANGLES, a1=ANGLES, n=st.integers(2, 30))
@settings(max_examples=60, deadline=None)
def test_mabk_closed_w_matches_reduced_sum(n, a0, a1):
    if abs(math.cos(a0)) < 1e-6 or abs(math.cos(a1)) < 1e-6:
        return
    pair = _pair(a0, a1)
    closed = mabk_closed_w(n, pair)
    reduced = mabk_value_mixture(make_pure(n, 1), pair).value
    assert math.isclose(closed, reduced, rel_tol=1e-9, abs_tol=1e-9)


@given(a0=ANGLES, a1=ANGLES, n=st.integers(2, 30))
@settings(max_examples=60, deadline=None)
def test_mabk_closed_vacuum_matches_reduced_sum(n, a0, a1):
    pair = _pair(a0, a1)
    closed = mabk_closed_vacuum(n, pair)
    reduced = mabk_value_mixture(make_pure(n, 0), pair).value
    assert math.isclose(closed, reduced, rel_tol=1e-10, abs_tol=1e-10)


def test_mabk_closed_w_singular_angle():
    with pytest.raises(SingularAngleError):
        mabk_closed_w(4, _pair(math.pi / 2, 0.3))


def test_mabk_w7_branch_ansatz_matches_closed():
    from dickebell.thresholds import MABK_W, ansatz_measurement_pair
    pair = ansatz_measurement_pair(MABK_W, 7)
    closed = mabk_closed_w(7, pair)
    reduced = mabk_value_mixture(make_pure(7, 1), pair).value
    assert math.isclose(closed, reduced, rel_tol=1e-9)


@given(a0=ANGLES, a1=ANGLES, w=st.floats(0.05, 0.95))
@settings(max_examples=60, deadline=None)
def test_mabk_mixture_linearity(a0, a1, w):
    pair = _pair(a0, a1)
    mix = DickeMixture(n=6, weights={2: w, 0: 1.0 - w})
    lhs = mabk_value_mixture(mix, pair).value
    rhs = (w * mabk_value_mixture(make_pure(6, 2), pair).value
           + (1 - w) * mabk_value_mixture(make_pure(6, 0), pair).value)
    assert math.isclose(lhs, rhs, rel_tol=1e-11, abs_tol=1e-11)


def test_excitation_mixture_value_is_affine_in_p():
    # k=1: value at p interpolates the pure and vacuum values
    pair = _pair(0.9, -1.7)
    n = 7
    v1 = mabk_value_mixture(make_pure(n, 1), pair).value
    v0 = mabk_value_mixture(make_pure(n, 0), pair).value
    for p in (0.0, 0.25, 0.6, 1.0):
        mixed = excitation_loss(make_pure(n, 1), p)
        got = mabk_value_mixture(mixed, pair).value
        assert math.isclose(got, (1 - p) * v1 + p * v0,
                            rel_tol=1e-11, abs_tol=1e-11)
