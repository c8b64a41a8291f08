"""Ansatz families, angle optimization, and loss thresholds."""

import math

import numpy as np
import pytest

from dickebell.bell import InequalityKind, MeasurementPair, hardy_value_mixture, mabk_value_mixture
from dickebell.errors import DomainError
from dickebell.states import LossModel, excitation_loss, make_pure, particle_loss
from dickebell.thresholds import (HARDY_K2, HARDY_W, MABK_W, TABLE1_Q,
                                  AnsatzFamily, Method, ansatz_angles,
                                  ansatz_measurement_pair, hardy_family_for_k,
                                  hardy_k36, optimize_angles, seed_pairs,
                                  threshold_excitation,
                                  threshold_excitation_fixed,
                                  threshold_excitation_w, threshold_particle,
                                  w_threshold_optimized)

HARDY = InequalityKind.HARDY
MABK = InequalityKind.MABK


# ----------------------------------------------------------------------
# ansatz families
# ----------------------------------------------------------------------

def test_ansatz_hardy_w_literal():
    a = ansatz_angles(HARDY_W, 1)
    assert math.isclose(a.alpha0, math.pi / 2 - math.atan(math.sqrt(7)),
                        abs_tol=1e-14)
    assert math.isclose(a.alpha1, 1.0 - math.atan(math.sqrt(12)) / math.pi,
                        abs_tol=1e-14)


def test_ansatz_hardy_k2_literal():
    a = ansatz_angles(HARDY_K2, 25)
    assert math.isclose(a.alpha0, math.pi / 2 - math.atan(1.97 * 5.0),
                        abs_tol=1e-14)
    assert math.isclose(a.alpha1, (math.pi + 3) / 2 - math.atan(6.93 * 5.0),
                        abs_tol=1e-14)


def test_ansatz_table1_row_k3():
    a = ansatz_angles(hardy_k36(*TABLE1_Q[3]), 10_000)
    assert math.isclose(a.alpha0, math.pi / 2 - math.atan(1.63 * 100.0),
                        abs_tol=1e-14)
    assert math.isclose(a.alpha1, (math.pi + 1) / 2 - math.atan(4.72 * 100.0),
                        abs_tol=1e-14)


def test_ansatz_mabk_branches():
    # n = 6 is the 2 mod 4 branch
    a6 = ansatz_angles(MABK_W, 6)
    assert math.isclose(a6.alpha0,
                        math.pi / 2 - math.atan(0.72 * math.sqrt(6)),
                        abs_tol=1e-14)
    assert math.isclose(a6.alpha1,
                        -math.pi / 2 + math.atan(4.0 / 3.0 * math.sqrt(6)),
                        abs_tol=1e-14)
    a4 = ansatz_angles(MABK_W, 4)
    assert math.isclose(a4.alpha0,
                        math.pi / 2 + math.atan(1.25 * 2.0), abs_tol=1e-14)
    assert math.isclose(a4.alpha1,
                        math.pi / 2 - math.atan(4.0 / 9.0 * 2.0), abs_tol=1e-14)


def test_ansatz_family_validation():
    with pytest.raises(DomainError):
        AnsatzFamily("no_such_family")
    with pytest.raises(DomainError):
        hardy_k36(0.0, 4.72)
    with pytest.raises(DomainError):
        hardy_k36(1.63, -1.0)
    with pytest.raises(DomainError):
        ansatz_angles(HARDY_W, 0)


def test_hardy_family_for_k():
    assert hardy_family_for_k(1) is HARDY_W
    assert hardy_family_for_k(2) is HARDY_K2
    assert hardy_family_for_k(4).q0 == TABLE1_Q[4][0]
    assert hardy_family_for_k(7) is None


def test_ansatz_measurement_pair_convention():
    # Hardy family values live on the half-angle plane in units of pi;
    # the realized measurement pair is 2*pi times them
    printed = ansatz_angles(HARDY_W, 100)
    pair = ansatz_measurement_pair(HARDY_W, 100)
    ref = MeasurementPair(2 * math.pi * printed.alpha0,
                          2 * math.pi * printed.alpha1)
    assert math.isclose(pair.alpha0, ref.alpha0, abs_tol=1e-14)
    assert math.isclose(pair.alpha1, ref.alpha1, abs_tol=1e-14)
    # MABK values are radians already
    mp = ansatz_measurement_pair(MABK_W, 9)
    ma = ansatz_angles(MABK_W, 9)
    assert mp.alpha0 == ma.alpha0 and mp.alpha1 == ma.alpha1


def test_ansatz_pair_violates_where_it_should():
    # the families are near-threshold strategies: for k >= 2 they need
    # not violate at p = 0, but must a little below their threshold
    for k, p in ((1, 0.18), (2, 0.25), (3, 0.27), (6, 0.29)):
        n = 10_000
        pair = ansatz_measurement_pair(hardy_family_for_k(k), n)
        state = excitation_loss(make_pure(n, k), p)
        assert hardy_value_mixture(state, pair).violated
    assert mabk_value_mixture(make_pure(7, 1),
                              ansatz_measurement_pair(MABK_W, 7)).violated


# ----------------------------------------------------------------------
# angle optimization
# ----------------------------------------------------------------------

def test_refinement_not_below_seed():
    state = make_pure(3, 1)
    seed = ansatz_measurement_pair(HARDY_W, 3)
    seeded_value = hardy_value_mixture(state, seed).value
    _, best = optimize_angles(3, state, HARDY, [seed])
    assert best >= seeded_value - 1e-12


def test_optimize_needs_seeds():
    with pytest.raises(DomainError):
        optimize_angles(3, make_pure(3, 1), HARDY, [])


def _hardy_pure_dense_grid(n: int, k: int, a0: np.ndarray, a1: np.ndarray):
    """Hardy value of pure |n,k> on a full-angle meshgrid.

    Independent of the library's evaluators: overlaps of product
    measurement bras with the symmetrized state, written out per term.
    """
    h0 = a0[:, None] / 2.0
    h1 = a1[None, :] / 2.0
    c0, s0 = np.cos(h0), np.sin(h0)
    c1, s1 = np.cos(h1), np.sin(h1)
    cnk = math.comb(n, k)
    t_all0 = cnk * s0 ** (2 * k) * c0 ** (2 * (n - k))
    bracket = (math.comb(n - 1, k) * c1 * s0 ** k * c0 ** (n - 1 - k)
               + math.comb(n - 1, k - 1) * s1 * s0 ** (k - 1) * c0 ** (n - k))
    t_one1 = (n / cnk) * bracket ** 2
    t_all1 = cnk * c1 ** (2 * k) * s1 ** (2 * (n - k))
    return t_all0 - t_one1 - t_all1


def test_optimizer_matches_dense_grid_n6_k2():
    n, k = 6, 2
    axis = np.linspace(-math.pi, math.pi, 1000, endpoint=False) + math.pi / 1000
    grid = _hardy_pure_dense_grid(n, k, axis, axis)
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    # second dense pass around the best coarse cell
    step = axis[1] - axis[0]
    zoom0 = np.linspace(axis[i] - step, axis[i] + step, 1000)
    zoom1 = np.linspace(axis[j] - step, axis[j] + step, 1000)
    grid_best = float(np.max(_hardy_pure_dense_grid(n, k, zoom0, zoom1)))

    _, best = optimize_angles(n, make_pure(n, k), HARDY,
                              seed_pairs(n, k, HARDY))
    assert abs(best - grid_best) <= 1e-6


def test_seed_pairs_well_formed():
    for kind in (HARDY, MABK):
        pairs = seed_pairs(10, 4, kind)
        assert pairs and all(isinstance(p, MeasurementPair) for p in pairs)


# ----------------------------------------------------------------------
# W-state closed-ratio thresholds
# ----------------------------------------------------------------------

def test_ratio_zero_when_no_violation():
    # sigma_z-only measurements never violate either inequality
    flat = MeasurementPair(0.0, 0.0)
    assert threshold_excitation_w(4, HARDY, flat) == 0.0
    assert threshold_excitation_w(4, MABK, flat) == 0.0


def test_ratio_domain():
    with pytest.raises(DomainError):
        threshold_excitation_w(1, HARDY, MeasurementPair(0.3, 0.5))


def test_refined_ratio_not_below_ansatz_small_n():
    for n in (2, 3, 5, 7, 10):
        anz = threshold_excitation_w(n, HARDY,
                                     ansatz_measurement_pair(HARDY_W, n))
        opt = w_threshold_optimized(n, HARDY).threshold
        assert opt >= anz - 1e-9
    for n in (4, 6, 9, 10):
        anz = threshold_excitation_w(n, MABK,
                                     ansatz_measurement_pair(MABK_W, n))
        opt = w_threshold_optimized(n, MABK).threshold
        assert opt >= anz - 1e-9


def test_w_thresholds_below_one_third():
    for n in (2, 10, 100, 1000):
        assert w_threshold_optimized(n, HARDY).threshold < 1 / 3 + 1e-6
        assert w_threshold_optimized(n, MABK).threshold < 1 / 3 + 1e-6


def test_w_threshold_certified_witness():
    res = w_threshold_optimized(50, MABK)
    assert res.threshold > 0
    state = excitation_loss(make_pure(50, 1), res.threshold - 1e-6)
    assert mabk_value_mixture(state, res.angles).violated


# ----------------------------------------------------------------------
# excitation-loss threshold search
# ----------------------------------------------------------------------

def test_scan_equals_ratio_for_k1():
    # the k=1 mixture is affine in p, so scan+bisection and the closed
    # ratio must land on the same threshold
    for kind in (HARDY, MABK):
        scanned = threshold_excitation(4, 1, kind)
        ratio = w_threshold_optimized(4, kind)
        assert abs(scanned.threshold - ratio.threshold) <= 1e-6


def test_excitation_threshold_certified():
    res = threshold_excitation(6, 2, HARDY)
    assert 0.0 < res.threshold < 1.0
    state = excitation_loss(make_pure(6, 2), res.threshold - 1e-6)
    assert hardy_value_mixture(state, res.angles).violated
    assert res.model is LossModel.EXCITATION
    assert res.method is Method.GRID_THEN_LOCAL
    assert res.intervals and res.intervals[-1][1] == pytest.approx(res.threshold)


def test_excitation_threshold_validation():
    for bad in ((4, 0), (4, 4), (1, 1)):
        with pytest.raises(DomainError):
            threshold_excitation(bad[0], bad[1], HARDY)


def test_fixed_angle_threshold():
    opt = w_threshold_optimized(6, HARDY)
    fixed = threshold_excitation_fixed(6, 1, HARDY, opt.angles)
    # same angles, same affine mixture: thresholds agree to bisection width
    assert abs(fixed.threshold - opt.threshold) <= 2e-6
    assert fixed.method is Method.ANSATZ_ONLY

    none = threshold_excitation_fixed(4, 1, HARDY, MeasurementPair(0.0, 0.0))
    assert none.threshold == 0.0
    assert "no_violation" in none.flags


def test_robustness_nondecreasing_in_n():
    for k in (2, 3):
        previous = -1.0
        for n in (20, 50, 100):
            t = threshold_excitation(n, k, HARDY).threshold
            assert t >= previous - 1e-9
            previous = t


# ----------------------------------------------------------------------
# particle-loss threshold search
# ----------------------------------------------------------------------

def test_particle_flip_symmetry():
    a = threshold_particle(8, 3, HARDY)
    b = threshold_particle(8, 5, HARDY)
    assert a.m_star == b.m_star
    assert a.n_f == b.n_f
    assert a.threshold == b.threshold
    c = threshold_particle(12, 5, MABK)
    d = threshold_particle(12, 7, MABK)
    assert c.m_star == d.m_star


def test_particle_w_state_tolerates_losses():
    res = threshold_particle(8, 1, HARDY)
    assert res.m_star >= 1
    assert res.threshold == res.m_star / 8
    assert res.n_f == 8 - res.m_star
    assert res.model is LossModel.PARTICLE
    # the witness certifies a violation of the surviving mixture
    state = particle_loss(make_pure(8, 1), res.m_star)
    assert hardy_value_mixture(state, res.angles).violated


def test_particle_zero_tolerance_case():
    # |4,2> violates when pure but its single-loss mixture does not:
    # m* = 0 with no flag is the honest answer, not a failure mode
    res = threshold_particle(4, 2, HARDY)
    assert res.m_star == 0
    assert res.threshold == 0.0
    assert "no_violation" not in res.flags


def test_particle_validation():
    for bad in ((4, 0), (4, 4), (1, 1)):
        with pytest.raises(DomainError):
            threshold_particle(bad[0], bad[1], HARDY)
