"""Cross-validation of the closed-form evaluators against the dense oracle.

Every fast path in this package (closed-form Hardy components, the reduced
MABK correlator sum, the binomial/hypergeometric loss weights) is checked
here against the brute-force implementations in ``oracle``: dense state
vectors, explicit Kraus channels, partial traces, and literal probability
tensors.  The checks are deterministic (fixed RNG seed) and sized so the
default battery finishes in a few minutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bell import (InequalityKind, MeasurementPair, beta_coefficient,
                   hardy_value, mabk_closed_vacuum, mabk_closed_w,
                   mabk_value_mixture, symmetric_correlator)
from .errors import ResourceLimitError
from .oracle import (STATE_CAP, TENSOR_CAP, apply_amplitude_damping,
                     bell_from_tensor, build_dicke, correlator_from_tensor,
                     dicke_density, dicke_diagonal_residual,
                     enumerate_lhv_strategies, joint_probabilities, to_density,
                     trace_out)
from .states import excitation_loss, make_pure, particle_loss

DEFAULT_SEED = 412978
REL_TOL_BELL = 1e-9
TOL_WEIGHTS = 1e-10
TOL_KRAUS = 1e-12
TOL_COMPOSE = 1e-12
REL_TOL_CLOSED = 1e-7


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one cross-check: worst deviation against its tolerance."""

    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    cases: int
    detail: str = ""


def _angle_pairs(pairs: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi, math.pi, size=(pairs, 2))


def check_hardy_vs_dense(max_n: int = 8, pairs: int = 50,
                         seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Closed-form Hardy values vs literal probability-tensor evaluation."""
    cap = min(max_n, TENSOR_CAP)
    angles = _angle_pairs(pairs, seed)
    worst, worst_case, cases = 0.0, "", 0
    for n in range(2, cap + 1):
        for k in range(0, n + 1):
            rho = dicke_density(n, k)
            for a0, a1 in angles:
                pair = MeasurementPair(float(a0), float(a1))
                t = joint_probabilities(rho, pair)
                dense = bell_from_tensor(t, InequalityKind.HARDY)
                closed = hardy_value(n, k, pair)
                dev = abs(closed - dense) / max(abs(dense), 1.0)
                cases += 1
                if dev > worst:
                    worst, worst_case = dev, f"n={n} k={k}"
    return CheckOutcome("hardy-closed-vs-dense", worst <= REL_TOL_BELL,
                        worst, REL_TOL_BELL, cases, worst_case)


def check_mabk_vs_dense(max_n: int = 8, pairs: int = 50,
                        seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Reduced-sum MABK values vs the full 2^n correlator sum on tensors."""
    cap = min(max_n, TENSOR_CAP)
    angles = _angle_pairs(pairs, seed + 1)
    worst, worst_case, cases = 0.0, "", 0
    for n in range(2, cap + 1):
        for k in range(0, n + 1):
            rho = dicke_density(n, k)
            state = make_pure(n, k)
            for a0, a1 in angles:
                pair = MeasurementPair(float(a0), float(a1))
                t = joint_probabilities(rho, pair)
                dense = bell_from_tensor(t, InequalityKind.MABK)
                reduced = mabk_value_mixture(state, pair).value
                dev = abs(reduced - dense) / max(abs(dense), 1.0)
                cases += 1
                if dev > worst:
                    worst, worst_case = dev, f"n={n} k={k}"
    return CheckOutcome("mabk-reduced-vs-dense", worst <= REL_TOL_BELL,
                        worst, REL_TOL_BELL, cases, worst_case)


def check_correlator_vs_dense(max_n: int = 7, pairs: int = 12,
                              seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Closed-form symmetric correlators vs tensor contractions."""
    cap = min(max_n, TENSOR_CAP)
    angles = _angle_pairs(pairs, seed + 2)
    worst, worst_case, cases = 0.0, "", 0
    for n in range(2, cap + 1):
        for k in range(0, n + 1):
            rho = dicke_density(n, k)
            for a0, a1 in angles:
                pair = MeasurementPair(float(a0), float(a1))
                t = joint_probabilities(rho, pair)
                for x in range(n + 1):
                    xvec = [1] * x + [0] * (n - x)
                    dense = correlator_from_tensor(t, xvec)
                    closed = symmetric_correlator(n, k, x, pair)
                    dev = abs(closed - dense)
                    cases += 1
                    if dev > worst:
                        worst, worst_case = dev, f"n={n} k={k} x={x}"
    return CheckOutcome("correlator-vs-dense", worst <= REL_TOL_BELL,
                        worst, REL_TOL_BELL, cases, worst_case)


def check_particle_weights(max_n: int = 8) -> CheckOutcome:
    """Hypergeometric particle-loss weights vs brute-force partial trace."""
    cap = min(max_n, STATE_CAP)
    worst, worst_case, cases = 0.0, "", 0
    for n in range(3, cap + 1):
        for k in range(0, n + 1):
            rho = dicke_density(n, k)
            for m in range(1, n - 1):
                reduced = trace_out(rho, m)
                weights, residual = dicke_diagonal_residual(reduced)
                model = particle_loss(make_pure(n, k), m)
                dev = residual
                for l in range(0, n - m + 1):
                    dev = max(dev, abs(weights.get(l, 0.0) - model.weight(l)))
                cases += 1
                if dev > worst:
                    worst, worst_case = dev, f"n={n} k={k} m={m}"
    return CheckOutcome("particle-weights-vs-partial-trace",
                        worst <= TOL_WEIGHTS, worst, TOL_WEIGHTS, cases,
                        worst_case)


def check_excitation_vs_kraus(max_n: int = 8) -> CheckOutcome:
    """Binomial one-excitation loss model vs the exact damping channel."""
    cap = min(max_n, STATE_CAP)
    worst, worst_case, cases = 0.0, "", 0
    for n in range(2, cap + 1):
        psi = build_dicke(n, 1)
        rho = to_density(psi)
        for p in (0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
            damped = apply_amplitude_damping(rho, p)
            weights, residual = dicke_diagonal_residual(damped)
            model = excitation_loss(make_pure(n, 1), p)
            dev = residual
            for l in (0, 1):
                dev = max(dev, abs(weights.get(l, 0.0) - model.weight(l)))
            cases += 1
            if dev > worst:
                worst, worst_case = dev, f"n={n} p={p}"
    return CheckOutcome("excitation-vs-amplitude-damping",
                        worst <= TOL_KRAUS, worst, TOL_KRAUS, cases,
                        worst_case)


def check_lhv_bounds(max_n: int = 4) -> CheckOutcome:
    """Exhaustive deterministic local strategies respect both bounds exactly.

    Local-deterministic probability tensors must give Hardy <= 0 and
    |MABK| <= 2^n with no tolerance at all; the check also records that
    both bounds are attained.
    """
    cap = min(max_n, 4)
    worst, worst_case, cases = 0.0, "", 0
    attained = True
    for n in range(2, cap + 1):
        hardy_max = -math.inf
        mabk_max = -math.inf
        for t in enumerate_lhv_strategies(n):
            s = bell_from_tensor(t, InequalityKind.HARDY)
            m = abs(bell_from_tensor(t, InequalityKind.MABK))
            hardy_max = max(hardy_max, s)
            mabk_max = max(mabk_max, m)
            cases += 1
            dev = max(s, m - 2.0 ** n)
            if dev > worst:
                worst, worst_case = dev, f"n={n}"
        if hardy_max != 0.0 or mabk_max != 2.0 ** n:
            attained = False
            worst_case = f"n={n} bounds not attained"
    return CheckOutcome("lhv-exhaustive-bounds",
                        worst <= 0.0 and attained, worst, 0.0, cases,
                        worst_case)


def check_loss_composition(seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Two sequential losses equal one combined loss, weight for weight."""
    rng = np.random.default_rng(seed + 3)
    worst, worst_case, cases = 0.0, "", 0
    for n, k in [(4, 1), (6, 3), (9, 4), (12, 7), (20, 11), (35, 5)]:
        state = make_pure(n, k)
        for _ in range(6):
            p, q = rng.uniform(0.0, 1.0, size=2)
            once = excitation_loss(state, 1.0 - (1.0 - p) * (1.0 - q))
            twice = excitation_loss(excitation_loss(state, p), q)
            dev = max(abs(once.weight(l) - twice.weight(l))
                      for l in range(k + 1))
            cases += 1
            if dev > worst:
                worst, worst_case = dev, f"excitation n={n} k={k}"
        for m1 in (1, 2):
            for m2 in (1, 3):
                if m1 + m2 >= n:
                    continue
                once = particle_loss(state, m1 + m2)
                twice = particle_loss(particle_loss(state, m1), m2)
                dev = max(abs(once.weight(l) - twice.weight(l))
                          for l in range(0, n - m1 - m2 + 1))
                cases += 1
                if dev > worst:
                    worst, worst_case = dev, f"particle n={n} k={k} m={m1}+{m2}"
    return CheckOutcome("loss-composition-laws", worst <= TOL_COMPOSE,
                        worst, TOL_COMPOSE, cases, worst_case)


def check_w_closed_forms(max_n: int = 100, pairs: int = 10,
                         seed: int = DEFAULT_SEED) -> CheckOutcome:
    """Log-scaled one-excitation/vacuum MABK closed forms vs the reduced sum.

    Regular (non-singular) angles only; the reduced sum accumulates
    structural cancellation as n grows, hence the looser relative bar.
    """
    angles = _angle_pairs(pairs, seed + 4)
    worst, worst_case, cases = 0.0, "", 0
    for n in (2, 3, 5, 8, 13, 21, 40, 70, max_n):
        for a0, a1 in angles:
            if abs(math.cos(a0)) < 1e-6 or abs(math.cos(a1)) < 1e-6:
                continue
            pair = MeasurementPair(float(a0), float(a1))
            for k, closed_fn in ((1, mabk_closed_w), (0, mabk_closed_vacuum)):
                bv = mabk_value_mixture(make_pure(n, k), pair)
                reduced = bv.value if bv.log_scale is None else \
                    math.copysign(math.exp(min(bv.log_scale, 700.0)), bv.value)
                closed = closed_fn(n, pair)
                scale = max(abs(closed), abs(reduced), 1.0)
                dev = abs(closed - reduced) / scale
                cases += 1
                if dev > worst:
                    worst, worst_case = dev, f"n={n} k={k}"
    return CheckOutcome("w-closed-forms-vs-reduced", worst <= REL_TOL_CLOSED,
                        worst, REL_TOL_CLOSED, cases, worst_case)


def check_beta_exactness(max_n: int = 24) -> CheckOutcome:
    """Input-weight coefficients are exact signed powers of two (or zero)."""
    worst, worst_case, cases = 0.0, "", 0
    for n in range(2, max_n + 1):
        for x in range(0, n + 1):
            b = beta_coefficient(x, n)
            ref = 2.0 ** ((n + 1) / 2.0) * math.cos(
                math.pi / 4.0 * (1 + n - 2 * x))
            dev = abs(b - ref)
            cases += 1
            if dev > worst:
                worst, worst_case = dev, f"n={n} x={x}"
    # float cosine of multiples of pi/4 wobbles at ~1e-16 x 2^((n+1)/2)
    tol = 1e-12 * 2.0 ** ((max_n + 1) / 2.0)
    return CheckOutcome("input-weight-exactness", worst <= tol, worst, tol,
                        cases, worst_case)


def run_all(max_n: int = 8, pairs: int = 50,
            seed: int = DEFAULT_SEED) -> list:
    """Run the oracle-equivalence battery; raises if max_n exceeds the caps.

    The exhaustive local-strategy enumeration (check_lhv_bounds) is not
    included here — it checks the bounds themselves, not a closed form,
    and is toggled separately by the CLI.
    """
    if max_n > STATE_CAP:
        raise ResourceLimitError(
            f"verification capped at n={STATE_CAP} (dense states), got {max_n}")
    return [
        check_hardy_vs_dense(max_n, pairs, seed),
        check_mabk_vs_dense(max_n, pairs, seed),
        check_correlator_vs_dense(min(max_n, 7), max(pairs // 4, 4), seed),
        check_particle_weights(max_n),
        check_excitation_vs_kraus(max_n),
        check_loss_composition(seed),
        check_w_closed_forms(seed=seed),
        check_beta_exactness(),
    ]
