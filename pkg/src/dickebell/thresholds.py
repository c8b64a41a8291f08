"""Measurement-angle optimization and loss-threshold certification.

For a Dicke state |n,k> and one of the two inequalities, the excitation
threshold is the supremum of loss probabilities p at which some pair of
measurement angles still violates; angles are re-optimized at every
probed p, because for k >= 2 the fixed-angle violation window can be far
narrower than the state-level one.  The search is a continuation: walk p
upward re-optimizing from the previous witness, re-probe the region above
the edge on the coarse 0.01 grid in descending order, then bisect the
edge to 1e-6 and re-certify the witness just below it.

Particle-loss thresholds probe the discrete lost-particle count m
descending from n-2 and report the largest violating m.

Angle seeds combine a global 64x64 grid over (-pi, pi]^2, closed-form
ansatz families (whose as-written values are in units of pi of the
Hardy half-angle parametrization -- seeds scale them accordingly), and
1/sqrt(n)-scaled local grids around the basin anchors, refined with
deterministic Nelder-Mead (simplex diameter 1e-10, max 2000 evaluations
per start).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .bell import (InequalityKind, MeasurementPair, hardy_components_slog,
                   hardy_mixture_slog, hardy_value_mixture, mabk_mixture_slog,
                   mabk_value_mixture, mabk_vacuum_scaled, mabk_w_scaled)
from .errors import DegenerateRatioError, DomainError
from .numerics import CANCELLATION_THRESHOLD, LOG_TWO, slog_to_float
from .states import DickeMixture, LossModel, excitation_loss, make_pure, particle_loss

P_SCAN_STEP = 1e-2
P_BISECT_TOL = 1e-6
P_CERT_MARGIN = 1e-6
#: how far above the continuation edge the descending 0.01-grid re-probe
#: starts (violating sets have always been single intervals [0, p_th] in
#: practice; the window guards against undetected resurgence)
P_REPROBE_WINDOW = 0.15

_NM_OPTIONS = dict(xatol=1e-10, fatol=math.inf, maxfev=2000)
_GRID_SIZE = 64
_SPREAD_TOL = 1e-4


class Method(Enum):
    ANSATZ_ONLY = "AnsatzOnly"
    GRID_THEN_LOCAL = "GridThenLocal"


@dataclass(frozen=True)
class ThresholdResult:
    """A certified loss-threshold lower bound.

    For excitation loss ``threshold`` is p_th in [0,1]; for particle loss
    it is the lost fraction m*/n, with the integer count in ``m_star`` and
    the surviving party count in ``n_f``.  ``bell_value_at_witness`` is
    the Bell value at the certification point (for MABK it is stored
    scaled, as signed M / 2^n, so that large n stays representable).
    ``intervals`` records the violating-p runs seen by the probes.
    """

    n: int
    k: int
    kind: InequalityKind
    model: LossModel
    threshold: float
    angles: MeasurementPair
    bell_value_at_witness: float
    method: Method
    evaluations: int
    flags: tuple = ()
    intervals: tuple = ()
    m_star: int | None = None
    n_f: int | None = None


# ----------------------------------------------------------------------
# ansatz angle families
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzFamily:
    """Closed-form measurement-angle family fitted at small n.

    ``hardy_k36`` carries the two fitted coefficients (q0, q1) of the
    k = 3..6 Hardy family; the other members are parameter-free.
    """

    name: str
    q0: float | None = None
    q1: float | None = None

    def __post_init__(self):
        if self.name not in ("hardy_w", "mabk_w", "hardy_k2", "hardy_k36"):
            raise DomainError(f"unknown ansatz family {self.name!r}")
        if self.name == "hardy_k36":
            if self.q0 is None or self.q1 is None or self.q0 <= 0 or self.q1 <= 0:
                raise DomainError("hardy_k36 needs positive coefficients q0, q1")


HARDY_W = AnsatzFamily("hardy_w")
MABK_W = AnsatzFamily("mabk_w")
HARDY_K2 = AnsatzFamily("hardy_k2")


def hardy_k36(q0: float, q1: float) -> AnsatzFamily:
    return AnsatzFamily("hardy_k36", q0=q0, q1=q1)


#: fitted (q0, q1) coefficients of the k = 3..6 Hardy angle family
TABLE1_Q = {3: (1.63, 4.72), 4: (1.47, 3.77), 5: (1.34, 3.07), 6: (1.24, 2.66)}


def hardy_family_for_k(k: int) -> AnsatzFamily | None:
    """The Hardy ansatz family fitted for excitation number k, if any."""
    if k == 1:
        return HARDY_W
    if k == 2:
        return HARDY_K2
    if k in TABLE1_Q:
        return hardy_k36(*TABLE1_Q[k])
    return None


def ansatz_angles(family: AnsatzFamily, n: int) -> MeasurementPair:
    """Literal closed-form angles of the given family at party count n.

    Values are returned exactly as the formulas read.  Note the Hardy
    families' values are *not* radians of the measurement direction: they
    parametrize the half-angle plane in units of pi (see the seed helpers
    below), so evaluating a Bell expression directly at them gives no
    violation.  The MABK branches are plain radians.
    """
    if n < 1:
        raise DomainError("party count must be positive")
    rt = math.sqrt(n)
    if family.name == "hardy_w":
        return MeasurementPair(math.pi / 2 - math.atan(math.sqrt(7 * n)),
                               1.0 - math.atan(math.sqrt(12 * n)) / math.pi)
    if family.name == "hardy_k2":
        return MeasurementPair(math.pi / 2 - math.atan(1.97 * rt),
                               (math.pi + 3) / 2 - math.atan(6.93 * rt))
    if family.name == "hardy_k36":
        return MeasurementPair(math.pi / 2 - math.atan(family.q0 * rt),
                               (math.pi + 1) / 2 - math.atan(family.q1 * rt))
    branch = n % 4
    if branch == 0:
        return MeasurementPair(math.pi / 2 + math.atan(1.25 * rt),
                               math.pi / 2 - math.atan(4.0 / 9.0 * rt))
    if branch == 1:
        return MeasurementPair(math.pi / 2 + math.atan(0.72 * rt),
                               math.pi / 2 - math.atan(4.0 / 3.0 * rt))
    if branch == 2:
        return MeasurementPair(math.pi / 2 - math.atan(0.72 * rt),
                               -math.pi / 2 + math.atan(4.0 / 3.0 * rt))
    return MeasurementPair(math.pi / 2 - math.atan(0.75 * rt),
                           math.pi / 2 + math.atan(4.0 / 3.0 * rt))


def ansatz_measurement_pair(family: AnsatzFamily, n: int) -> MeasurementPair:
    """Measurement angles (radians) realized by the family at n.

    Undoes the Hardy families' as-written parametrization (half-angle
    plane in units of pi): their measurement pair is 2 pi x the formula
    values.  The MABK family is written directly in radians and passes
    through.
    """
    a = ansatz_angles(family, n)
    if family.name == "mabk_w":
        return a
    return MeasurementPair(2.0 * math.pi * a.alpha0, 2.0 * math.pi * a.alpha1)


#: fitted half-angle-plane optima in scaled coordinates (t0, t1) with
#: a0 = t0/sqrt(n), a1 = pi/2 + t1/sqrt(n); extended past k=6 by the
#: empirical trends t0 ~ 1.09 sqrt(k), t1 ~ 0.21 k
_HARDY_T_SEEDS = {1: (1.18, 0.28), 2: (1.59, 0.45), 3: (1.89, 0.63),
                  4: (2.18, 0.85), 5: (2.44, 1.07), 6: (2.67, 1.27)}


def _hardy_seed_halves(n: int, k: int) -> list:
    """Half-angle seed points for the Hardy optimizer."""
    seeds = []
    fam = hardy_family_for_k(k)
    if fam is not None:
        a = ansatz_angles(fam, n)
        # family values are in units of pi of the half-angle plane
        for sgn in (1.0, -1.0):
            seeds.append((math.pi * a.alpha0, sgn * math.pi * a.alpha1))
    t0, t1 = _HARDY_T_SEEDS.get(k, (1.09 * math.sqrt(k), 0.21 * k))
    rt = math.sqrt(n)
    for sgn in (1.0, -1.0):
        seeds.append((t0 / rt, sgn * (math.pi / 2 + t1 / rt)))
    return seeds


def _mabk_seed_angles(n: int, k: int) -> list:
    """Full-angle seed points for the MABK optimizer."""
    seeds = []
    a = ansatz_angles(MABK_W, n)
    seeds.append((a.alpha0, a.alpha1))
    if n % 2 == 0:
        # the family's n = 0 mod 4 branch stops violating past n ~ 24; the
        # n = 2 mod 4 shape is near-optimal for all even n, so seed it too
        rt = math.sqrt(n)
        seeds.append((math.pi / 2 - math.atan(0.72 * rt),
                      -math.pi / 2 + math.atan(4.0 / 3.0 * rt)))
    seeds.extend([(-s0, -s1) for s0, s1 in seeds])
    return seeds


@lru_cache(maxsize=None)
def _global_grid():
    pts = -math.pi + 2.0 * math.pi * (np.arange(_GRID_SIZE) + 1) / _GRID_SIZE
    g0, g1 = np.meshgrid(pts, pts, indexing="ij")
    return np.column_stack([g0.ravel(), g1.ravel()])


def _hardy_scaled_grid(n: int, k: int) -> np.ndarray:
    """1/sqrt(n)-scaled half-angle grid around the small-angle basins."""
    rt = math.sqrt(n)
    t0_hi = max(6.5, 1.2 * math.sqrt(k) + 2.5)
    t1_hi = max(3.5, 0.25 * k + 1.5)
    u0 = np.linspace(0.3, t0_hi, 48)
    u1 = np.linspace(-t1_hi, t1_hi, 56)
    pts = []
    for anchor in (math.pi / 2, -math.pi / 2):
        g0, g1 = np.meshgrid(u0 / rt, anchor + u1 / rt, indexing="ij")
        pts.append(np.column_stack([g0.ravel(), g1.ravel()]))
    return np.vstack(pts)


# ----------------------------------------------------------------------
# objectives (internal coordinates: Hardy half-angles, MABK full angles)
# ----------------------------------------------------------------------

class _Objective:
    """Score to maximize at fixed state; tracks evaluation counts.

    Hardy scores are the sign-aware arctan compression of the signed log
    of S (monotone, finite, positive iff violating); MABK scores are
    log|M| - n log 2 (positive iff violating).  ``last_cancellation``
    holds the slog cancellation of the most recent evaluation; it is only
    meaningful away from the violation edge, where S -> 0 makes the ratio
    diverge for geometric rather than numerical reasons.
    """

    def __init__(self, n: int, kind: InequalityKind, support, weights):
        self.n = n
        self.kind = kind
        self.support = tuple(int(l) for l in support)
        self.weights = np.asarray(weights, dtype=float)
        self.evaluations = 0
        self.last_cancellation = 1.0
        self._ls = np.array(self.support, dtype=np.int64)

    def with_weights(self, weights) -> "_Objective":
        o = _Objective(self.n, self.kind, self.support, weights)
        o.evaluations = self.evaluations
        return o

    def score(self, x0: float, x1: float) -> float:
        self.evaluations += 1
        if self.kind is InequalityKind.HARDY:
            s, lg, canc = hardy_mixture_slog(self.n, self._ls, self.weights, x0, x1)
            self.last_cancellation = canc
            if s == 0:
                return 0.0
            return math.copysign(math.pi / 2 + math.atan(lg), s)
        s, lg, canc = mabk_mixture_slog(self.n, self.support, self.weights, x0, x1)
        self.last_cancellation = canc
        if s == 0:
            return -1e3
        return lg - self.n * LOG_TWO

    def witness_cancellation(self, pt) -> float:
        self.score(pt[0], pt[1])
        return self.last_cancellation

    def violated_score(self, score: float) -> bool:
        if self.kind is InequalityKind.HARDY:
            # score > pi/2 + atan(ln 1e-12) matches the BellValue tolerance
            return score > math.pi / 2 + math.atan(math.log(1e-12))
        return score > math.log1p(1e-12)

    def witness_pair(self, x0: float, x1: float) -> MeasurementPair:
        if self.kind is InequalityKind.HARDY:
            return MeasurementPair(2.0 * x0, 2.0 * x1)
        return MeasurementPair(x0, x1)

    def internal_from_pair(self, pair: MeasurementPair):
        if self.kind is InequalityKind.HARDY:
            return (pair.alpha0 / 2.0, pair.alpha1 / 2.0)
        return (pair.alpha0, pair.alpha1)


def _nm_refine(obj: _Objective, start, h_stages=(None, None)) -> tuple:
    """Deterministic two-stage simplex refinement; returns (score, point)."""
    x = np.asarray(start, dtype=float)
    h1 = h_stages[0] if h_stages[0] is not None else max(0.5 / math.sqrt(obj.n), 1e-3)
    h2 = h_stages[1] if h_stages[1] is not None else max(0.005 / math.sqrt(obj.n), 1e-5)
    for h in (h1, h2):
        simplex = np.array([x, x + [h, 0.0], x + [0.0, h]])
        r = minimize(lambda t: -obj.score(t[0], t[1]), x, method="Nelder-Mead",
                     options=dict(initial_simplex=simplex, **_NM_OPTIONS))
        x = r.x
    return obj.score(x[0], x[1]), (float(x[0]), float(x[1]))


def _optimize(obj: _Objective, seed_points, grids=(), max_starts: int | None = None):
    """Grid seeding + multi-start refinement.

    With ``max_starts`` the seed list is pre-ranked by direct evaluation
    and only the top starts are simplex-refined (the grid best and the
    leading seed are always kept).  Returns (best_score, best_point,
    spread_flag): the flag is set when the refined optimum fails to hold
    the best grid score (a local search regressing below its own seed
    signals an unstable objective).
    """
    best_grid = None
    for grid in grids:
        for x0, x1 in grid:
            v = obj.score(float(x0), float(x1))
            if best_grid is None or v > best_grid[0]:
                best_grid = (v, (float(x0), float(x1)))
    starts = list(seed_points)
    if max_starts is not None and len(starts) > max_starts:
        ranked = sorted(starts, key=lambda st: -obj.score(st[0], st[1]))
        starts = [starts[0]] + [st for st in ranked if st != starts[0]]
        starts = starts[:max_starts]
    if best_grid is not None:
        starts.append(best_grid[1])
    best = None
    for st in starts:
        r = _nm_refine(obj, st)
        if best is None or r[0] > best[0]:
            best = r
    spread = best_grid is not None and best[0] < best_grid[0] - _SPREAD_TOL
    return best[0], best[1], spread


# ----------------------------------------------------------------------
# public optimization entry point
# ----------------------------------------------------------------------

def optimize_angles(n: int, state: DickeMixture, kind: InequalityKind,
                    seeds: list) -> tuple[MeasurementPair, float]:
    """Maximize the Bell expression over the two angles.

    Runs deterministic Nelder-Mead from every seed plus the best point of
    a 64x64 grid over (-pi, pi]^2 (and, for Hardy, of a 1/sqrt(n)-scaled
    grid around the small-angle basins).  Returns the best witness and
    its Bell value (for MABK the signed value, which saturates to +-inf
    past the double range; compare via mabk_value_mixture at large n).
    """
    if not seeds:
        raise DomainError("optimize_angles needs at least one seed")
    support = state.support()
    ws = [state.weight(l) for l in support]
    obj = _Objective(n, kind, support, ws)
    seed_pts = [obj.internal_from_pair(s) for s in seeds]
    grids = [_global_grid() if kind is InequalityKind.MABK
             else _global_grid() / 2.0]
    if kind is InequalityKind.HARDY:
        grids.append(_hardy_scaled_grid(n, max(state.support(), default=1)))
    _, best_pt, _ = _optimize(obj, seed_pts, grids)
    pair = obj.witness_pair(*best_pt)
    if kind is InequalityKind.HARDY:
        return pair, hardy_value_mixture(state, pair).value
    bv = mabk_value_mixture(state, pair)
    if bv.log_scale is None:
        return pair, bv.value
    return pair, slog_to_float(int(bv.value), bv.log_scale)


def seed_pairs(n: int, k: int, kind: InequalityKind) -> list:
    """Standard optimizer seed angles for the |n,k> family (as pairs)."""
    pts = _seed_points(n, k, kind)
    if kind is InequalityKind.HARDY:
        return [MeasurementPair(2.0 * h0, 2.0 * h1) for h0, h1 in pts]
    return [MeasurementPair(a0, a1) for a0, a1 in pts]


# ----------------------------------------------------------------------
# W-state closed-ratio thresholds
# ----------------------------------------------------------------------

def threshold_excitation_w(n: int, kind: InequalityKind,
                           angles: MeasurementPair) -> float:
    """Loss ratio tolerated by the one-excitation state at fixed angles.

    The k=1 mixture is affine in p, so the threshold at fixed angles is a
    closed ratio: Hardy S1/(S1-S0); MABK (sigma 2^n - M1)/(M0 - M1) over
    both signs sigma, keeping the root in [0,1] that certifies violation
    below it.  Clamped to [0,1]; 0 when the pure state does not violate.
    """
    if n < 2:
        raise DomainError("need n >= 2")
    if kind is InequalityKind.HARDY:
        h0, h1 = angles.alpha0 / 2.0, angles.alpha1 / 2.0
        signs, logs, _ = hardy_components_slog(n, [0, 1], h0, h1)
        s0 = float(signs[0] * np.exp(logs[0])) if signs[0] else 0.0
        s1 = float(signs[1] * np.exp(logs[1])) if signs[1] else 0.0
        if abs(s1 - s0) < 1e-300:
            raise DegenerateRatioError(
                "Hardy ratio denominator S1 - S0 vanishes at these angles")
        if s1 <= 1e-12:
            return 0.0
        return min(1.0, max(0.0, s1 / (s1 - s0)))
    m1 = mabk_w_scaled(n, angles.alpha0, angles.alpha1)
    m0 = mabk_vacuum_scaled(n, angles.alpha0, angles.alpha1)
    if abs(m0 - m1) < 1e-300:
        raise DegenerateRatioError(
            "MABK ratio denominator M0 - M1 vanishes at these angles")
    if abs(m1) <= 1.0 + 1e-12:
        return 0.0
    best = 0.0
    for sigma in (1.0, -1.0):
        p = (sigma - m1) / (m0 - m1)
        if 0.0 <= p <= 1.0:
            probe = 0.999 * p
            if abs((1.0 - probe) * m1 + probe * m0) > 1.0:
                best = max(best, p)
    return min(1.0, best)


def w_threshold_optimized(n: int, kind: InequalityKind,
                          refine: bool = True) -> ThresholdResult:
    """Best closed-ratio W-state excitation threshold over angles.

    With ``refine`` the ratio is maximized by grid + simplex search
    (method GridThenLocal); otherwise only the ansatz angles are
    evaluated (AnsatzOnly).
    """
    if n < 2:
        raise DomainError("need n >= 2")
    evals = [0]

    if kind is InequalityKind.HARDY:
        def ratio_at(h0, h1):
            evals[0] += 1
            signs, logs, _ = hardy_components_slog(n, [0, 1], h0, h1)
            if signs[1] <= 0:
                return 0.0
            # p = S1 / (S1 - S0) computed in log scale
            if signs[0] > 0 and logs[0] >= logs[1]:
                return 1.0
            diff = logs[1] + math.log1p(-float(signs[0]) * math.exp(logs[0] - logs[1]))
            return min(1.0, math.exp(logs[1] - diff))
        seeds = _hardy_seed_halves(n, 1)
        to_pair = lambda pt: MeasurementPair(2 * pt[0], 2 * pt[1])
        grids = [_global_grid() / 2.0, _hardy_scaled_grid(n, 1)]
    else:
        def ratio_at(a0, a1):
            evals[0] += 1
            m1 = mabk_w_scaled(n, a0, a1)
            if abs(m1) <= 1.0:
                return 0.0
            m0 = mabk_vacuum_scaled(n, a0, a1)
            best = 0.0
            for sigma in (1.0, -1.0):
                den = m0 - m1
                if den == 0.0:
                    continue
                p = (sigma - m1) / den
                if 0.0 <= p <= 1.0:
                    probe = 0.999 * p
                    if abs((1.0 - probe) * m1 + probe * m0) > 1.0:
                        best = max(best, p)
            return best
        seeds = _mabk_seed_angles(n, 1)
        to_pair = lambda pt: MeasurementPair(pt[0], pt[1])
        grids = [_global_grid()]

    best_v, best_pt = 0.0, seeds[0]
    if refine:
        for grid in grids:
            for x0, x1 in grid:
                v = ratio_at(float(x0), float(x1))
                if v > best_v:
                    best_v, best_pt = v, (float(x0), float(x1))
        starts = seeds + [best_pt]
    else:
        starts = seeds
    for st in starts:
        x = np.asarray(st, dtype=float)
        if refine:
            for h in (max(0.5 / math.sqrt(n), 1e-3), max(0.005 / math.sqrt(n), 1e-5)):
                simplex = np.array([x, x + [h, 0.0], x + [0.0, h]])
                r = minimize(lambda t: -ratio_at(t[0], t[1]), x,
                             method="Nelder-Mead",
                             options=dict(initial_simplex=simplex, **_NM_OPTIONS))
                x = r.x
        v = ratio_at(x[0], x[1])
        if v > best_v:
            best_v, best_pt = v, (float(x[0]), float(x[1]))

    pair = to_pair(best_pt)
    p_cert = max(best_v - P_CERT_MARGIN, 0.0)
    flags = set()
    if kind is InequalityKind.HARDY:
        bv = hardy_value_mixture(excitation_loss(make_pure(n, 1), p_cert), pair)
        witness_value = bv.value
        certified = bv.violated
    else:
        # the k = 1 mixture is exactly affine in the two closed forms, so
        # certification can avoid the (cancellation-prone) correlator sum
        m1 = mabk_w_scaled(n, pair.alpha0, pair.alpha1)
        m0 = mabk_vacuum_scaled(n, pair.alpha0, pair.alpha1)
        witness_value = (1.0 - p_cert) * m1 + p_cert * m0
        certified = abs(witness_value) > 1.0
    if best_v <= 0.0:
        flags.add("no_violation")
    elif not certified:
        flags.add("uncertified_edge")
    return ThresholdResult(
        n=n, k=1, kind=kind, model=LossModel.EXCITATION, threshold=best_v,
        angles=pair, bell_value_at_witness=float(witness_value),
        method=Method.GRID_THEN_LOCAL if refine else Method.ANSATZ_ONLY,
        evaluations=evals[0], flags=tuple(sorted(flags)),
        intervals=((0.0, best_v),) if best_v > 0 else ())


# ----------------------------------------------------------------------
# general excitation threshold: continuation + descending re-probe + bisection
# ----------------------------------------------------------------------

def _excitation_objective(n: int, k: int, kind: InequalityKind, p: float,
                          proto: _Objective | None = None) -> _Objective:
    state = excitation_loss(make_pure(n, k), p)
    support = list(range(k + 1))
    ws = [state.weight(l) for l in support]
    if proto is not None:
        return proto.with_weights(ws)
    return _Objective(n, kind, support, ws)


def _seed_points(n: int, k: int, kind: InequalityKind) -> list:
    if kind is InequalityKind.HARDY:
        return _hardy_seed_halves(n, k)
    return _mabk_seed_angles(n, k)


def _cone_seeds(nf: int, support, weights) -> list:
    """Half-angle seeds for degenerate small-angle Hardy violations.

    When the surviving mixture has no vacuum component (l_min >= 1), the
    lightest component vanishes slowest as the angles shrink, so S stays
    positive inside a narrow cone around h1/h0 = -(nf-j)/j (j = l_min) at
    small scale; these violations are tiny (~ w_j^2 / w_{j+1}) but real.
    The mirrored corner covers mixtures missing the all-ones component.
    Seeds are skipped when the w_j^2 / w_{j+1} scale sits hopelessly below
    the violation tolerance.
    """
    seeds = []
    if not len(support):
        return seeds
    lmin, lmax = int(support[0]), int(support[-1])
    scales = (0.02, 0.006, 0.002)
    if lmin >= 1 and _cone_feasible(weights[0], weights[min(1, len(weights) - 1)]):
        for ratio in ((nf - lmin) / lmin, (nf - lmin) / lmin - 1.2):
            for eps in scales:
                seeds.append((eps, -ratio * eps))
    if lmax <= nf - 1 and _cone_feasible(weights[-1],
                                         weights[max(len(weights) - 2, 0)]):
        j = nf - lmax
        for ratio in ((nf - j) / j, (nf - j) / j - 1.2):
            for eps in scales:
                seeds.append((math.pi / 2 - eps, math.pi / 2 + ratio * eps))
    return seeds


def _cone_feasible(w_edge: float, w_next: float, margin: float = 1e-15) -> bool:
    if w_edge <= 0.0:
        return False
    if w_next <= 0.0:
        return True
    return w_edge * w_edge / w_next > margin


def _mirror_half(seeds: list) -> list:
    """Image of half-angle seeds under the global bit flip h -> pi/2 - h."""
    return [(math.pi / 2 - h0, math.pi / 2 - h1) for h0, h1 in seeds]


def threshold_excitation(n: int, k: int, kind: InequalityKind) -> ThresholdResult:
    """Certified lower bound on the excitation-loss threshold of |n,k>.

    Angles are re-optimized at every probed p (warm-started from the
    neighboring probe's witness); the 0.01-grid re-probe above the
    continuation edge runs in descending order, then the edge is bisected
    to 1e-6 and the witness re-verified at threshold - 1e-6.
    """
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"invalid threshold parameters n={n}, k={k}")
    obj = _excitation_objective(n, k, kind, 0.0)
    grids = [_global_grid() if kind is InequalityKind.MABK else _global_grid() / 2.0]
    if kind is InequalityKind.HARDY:
        grids.append(_hardy_scaled_grid(n, k))
    score0, pt, spread = _optimize(obj, _seed_points(n, k, kind), grids)
    flags = set()
    if spread:
        flags.add("optimizer_spread")
    # the pure-state witness is away from the edge, so its cancellation
    # measures the formula's structural instability rather than S -> 0
    if obj.witness_cancellation(pt) > CANCELLATION_THRESHOLD:
        flags.add("precision_fallback")
    if not obj.violated_score(score0):
        return ThresholdResult(
            n=n, k=k, kind=kind, model=LossModel.EXCITATION, threshold=0.0,
            angles=obj.witness_pair(*pt), bell_value_at_witness=0.0,
            method=Method.GRID_THEN_LOCAL, evaluations=obj.evaluations,
            flags=tuple(sorted(flags | {"no_violation"})))

    # ascending continuation on the coarse grid
    proto = obj
    p_lo, witness = 0.0, pt
    violating = [0.0]
    p = 0.0
    while p < 1.0 - 1e-12:
        p_next = min(p + P_SCAN_STEP, 1.0)
        o = _excitation_objective(n, k, kind, p_next, proto)
        sc, cand = _nm_refine(o, witness)
        proto = o
        if not o.violated_score(sc):
            break
        p, p_lo, witness = p_next, p_next, cand
        violating.append(p_next)
    edge_hi = min(p_lo + P_SCAN_STEP, 1.0)

    # descending re-probe of the region above the edge
    if p_lo < 1.0 - 1e-12:
        reprobe_top = min(1.0 - P_SCAN_STEP, p_lo + P_REPROBE_WINDOW)
        ps = np.arange(round(reprobe_top / P_SCAN_STEP),
                       round(edge_hi / P_SCAN_STEP), -1) * P_SCAN_STEP
        probe_witness = witness
        for p_probe in ps:
            o = _excitation_objective(n, k, kind, float(p_probe), proto)
            sc, cand = _nm_refine(o, probe_witness)
            proto = o
            if o.violated_score(sc):
                # violation resurges above the continuation edge
                p_lo, witness = float(p_probe), cand
                edge_hi = min(p_lo + P_SCAN_STEP, 1.0)
                violating.append(float(p_probe))
                flags.add("nonmonotone_violation")
                break
            probe_witness = cand

    # bisect the edge
    lo, hi = p_lo, edge_hi
    while hi - lo > P_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        o = _excitation_objective(n, k, kind, mid, proto)
        sc, cand = _nm_refine(o, witness,
                              h_stages=(max(0.005 / math.sqrt(n), 1e-5), None))
        proto = o
        if o.violated_score(sc):
            lo, witness = mid, cand
        else:
            hi = mid
    threshold = 0.5 * (lo + hi)

    # certify the witness just below the reported threshold
    p_cert = max(threshold - P_CERT_MARGIN, 0.0)
    pair = obj.witness_pair(*witness)
    state = excitation_loss(make_pure(n, k), p_cert)
    if kind is InequalityKind.HARDY:
        bv = hardy_value_mixture(state, pair)
        witness_value = bv.value
    else:
        bv = mabk_value_mixture(state, pair)
        witness_value = bv.mabk_scaled()
    if not bv.violated:
        o = _excitation_objective(n, k, kind, p_cert, proto)
        sc, cand = _nm_refine(o, witness)
        proto = o
        if o.violated_score(sc):
            witness = cand
            pair = obj.witness_pair(*witness)
            bv2 = (hardy_value_mixture if kind is InequalityKind.HARDY
                   else mabk_value_mixture)(state, pair)
            witness_value = bv2.value if kind is InequalityKind.HARDY \
                else bv2.mabk_scaled()
            if not bv2.violated:
                flags.add("uncertified_edge")
        else:
            flags.add("uncertified_edge")

    intervals = _merge_intervals(violating, threshold)
    return ThresholdResult(
        n=n, k=k, kind=kind, model=LossModel.EXCITATION, threshold=threshold,
        angles=pair, bell_value_at_witness=float(witness_value),
        method=Method.GRID_THEN_LOCAL, evaluations=proto.evaluations,
        flags=tuple(sorted(flags)), intervals=intervals)


def _merge_intervals(violating_ps, threshold: float) -> tuple:
    if not violating_ps:
        return ()
    ps = sorted(violating_ps)
    runs = [[ps[0], ps[0]]]
    for p in ps[1:]:
        if p - runs[-1][1] <= P_SCAN_STEP + 1e-12:
            runs[-1][1] = p
        else:
            runs.append([p, p])
    runs[-1][1] = max(runs[-1][1], threshold)
    return tuple((float(a), float(b)) for a, b in runs)


def threshold_excitation_fixed(n: int, k: int, kind: InequalityKind,
                               angles: MeasurementPair) -> ThresholdResult:
    """Excitation-loss threshold at fixed measurement angles.

    No angle optimization: p is scanned on the 0.01 grid and the first
    sign-change edge bisected to 1e-6 with the given angles throughout.
    Useful for evaluating how far a closed-form angle family alone gets.
    """
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"invalid threshold parameters n={n}, k={k}")
    obj = _excitation_objective(n, k, kind, 0.0)
    pt = obj.internal_from_pair(angles)

    def violates(p: float) -> bool:
        nonlocal proto
        o = _excitation_objective(n, k, kind, p, proto)
        proto = o
        return o.violated_score(o.score(*pt))

    proto = obj
    if not violates(0.0):
        return ThresholdResult(
            n=n, k=k, kind=kind, model=LossModel.EXCITATION, threshold=0.0,
            angles=angles, bell_value_at_witness=0.0,
            method=Method.ANSATZ_ONLY, evaluations=proto.evaluations,
            flags=("no_violation",))
    p_lo = 0.0
    while p_lo < 1.0 - 1e-12 and violates(min(p_lo + P_SCAN_STEP, 1.0)):
        p_lo = min(p_lo + P_SCAN_STEP, 1.0)
    lo, hi = p_lo, min(p_lo + P_SCAN_STEP, 1.0)
    while hi - lo > P_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if violates(mid):
            lo = mid
        else:
            hi = mid
    threshold = 0.5 * (lo + hi)

    flags = set()
    p_cert = max(threshold - P_CERT_MARGIN, 0.0)
    state = excitation_loss(make_pure(n, k), p_cert)
    if kind is InequalityKind.HARDY:
        bv = hardy_value_mixture(state, angles)
        witness_value = bv.value
    else:
        bv = mabk_value_mixture(state, angles)
        witness_value = bv.mabk_scaled()
    if not bv.violated:
        flags.add("uncertified_edge")
    return ThresholdResult(
        n=n, k=k, kind=kind, model=LossModel.EXCITATION, threshold=threshold,
        angles=angles, bell_value_at_witness=float(witness_value),
        method=Method.ANSATZ_ONLY, evaluations=proto.evaluations,
        flags=tuple(sorted(flags)), intervals=((0.0, threshold),))


# ----------------------------------------------------------------------
# particle-loss threshold
# ----------------------------------------------------------------------

def threshold_particle(n: int, k: int, kind: InequalityKind) -> ThresholdResult:
    """Largest lost-particle count m* for which |n,k> still violates.

    Probes m descending from n-2 (surviving states need >= 2 parties),
    optimizing angles per m (full grid at the first probe, then
    warm-started from the previous m), and stops at the first violating m.
    The k <-> n-k weight symmetry is exact, so k is canonicalized to
    min(k, n-k) and the witness mapped back through the global bit flip
    (alpha -> pi - alpha at every site).
    """
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"invalid threshold parameters n={n}, k={k}")
    kc = min(k, n - k)
    res = _particle_canonical(n, kc, kind)
    if kc == k:
        return res
    pair = MeasurementPair(math.pi - res.angles.alpha0,
                           math.pi - res.angles.alpha1)
    flags = set(res.flags)
    witness_value = res.bell_value_at_witness
    if res.m_star is not None:
        state = particle_loss(make_pure(n, k), res.m_star)
        bv = (hardy_value_mixture if kind is InequalityKind.HARDY
              else mabk_value_mixture)(state, pair)
        witness_value = bv.value if kind is InequalityKind.HARDY \
            else bv.mabk_scaled()
        if not bv.violated:
            flags.add("uncertified_edge")
    return ThresholdResult(
        n=n, k=k, kind=kind, model=res.model, threshold=res.threshold,
        angles=pair, bell_value_at_witness=float(witness_value),
        method=res.method, evaluations=res.evaluations,
        flags=tuple(sorted(flags)), m_star=res.m_star, n_f=res.n_f)


def _particle_canonical(n: int, k: int, kind: InequalityKind) -> ThresholdResult:
    evaluations = 0
    flags = set()
    witness_pt = None
    first = True
    for m in range(n - 2, -1, -1):
        state = particle_loss(make_pure(n, k), m)
        nf = n - m
        support = state.support()
        ws = [state.weight(l) for l in support]
        obj = _Objective(nf, kind, support, ws)
        k_eff = max(min(round(k * nf / n), nf - 1), 1)
        k_top = max(min(k, nf - 1), 1)
        seeds = _seed_points(nf, k_top, kind)
        if k_eff != k_top:
            seeds += _seed_points(nf, k_eff, kind)
        if kind is InequalityKind.HARDY:
            seeds += _mirror_half(seeds)
            seeds += _cone_seeds(nf, support, ws)
        if witness_pt is not None:
            seeds = [witness_pt] + seeds
        if first:
            grids = [_global_grid() if kind is InequalityKind.MABK
                     else _global_grid() / 2.0]
            if kind is InequalityKind.HARDY:
                grids.append(_hardy_scaled_grid(nf, k_top))
            first = False
        else:
            grids = [_coarse_grid_16() if kind is InequalityKind.MABK
                     else _coarse_grid_16() / 2.0]
        sc, pt, spread = _optimize(obj, seeds, grids)
        witness_pt = pt
        if obj.violated_score(sc):
            if spread:
                flags.add("optimizer_spread")
            if obj.witness_cancellation(pt) > CANCELLATION_THRESHOLD:
                flags.add("precision_fallback")
            evaluations += obj.evaluations
            pair = obj.witness_pair(*pt)
            bv = (hardy_value_mixture if kind is InequalityKind.HARDY
                  else mabk_value_mixture)(state, pair)
            witness_value = bv.value if kind is InequalityKind.HARDY \
                else bv.mabk_scaled()
            if not bv.violated:
                flags.add("uncertified_edge")
            return ThresholdResult(
                n=n, k=k, kind=kind, model=LossModel.PARTICLE,
                threshold=m / n, angles=pair,
                bell_value_at_witness=float(witness_value),
                method=Method.GRID_THEN_LOCAL, evaluations=evaluations,
                flags=tuple(sorted(flags)), m_star=m, n_f=nf)
        evaluations += obj.evaluations
    flags.add("no_violation")
    return ThresholdResult(
        n=n, k=k, kind=kind, model=LossModel.PARTICLE, threshold=0.0,
        angles=MeasurementPair(0.0, 0.0), bell_value_at_witness=0.0,
        method=Method.GRID_THEN_LOCAL, evaluations=evaluations,
        flags=tuple(sorted(flags)), m_star=None, n_f=None)


@lru_cache(maxsize=None)
def _coarse_grid_16():
    pts = -math.pi + 2.0 * math.pi * (np.arange(16) + 1) / 16
    g0, g1 = np.meshgrid(pts, pts, indexing="ij")
    return np.column_stack([g0.ravel(), g1.ravel()])
