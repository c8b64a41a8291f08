"""Bell expressions for Dicke mixtures under identical single-plane measurements.

Every site measures one of two directions A_j = cos(alpha_j) sigma_z +
sin(alpha_j) sigma_x, the same pair (alpha_0, alpha_1) everywhere.  Two
inequality families are evaluated on Dicke-diagonal states:

* a Hardy-type expression S_n with local bound 0, through its closed form
  for Dicke components.  The closed form lives in projector half-angle
  variables (the outcome-+1 projector of A_j rotates the basis by
  alpha_j / 2), so public entry points halve the measurement angles
  before substituting;
* the full-correlation MABK expression M_n with local bound 2^n.  The
  permutation symmetry collapses the 2^n-term input sum to n+1 terms
  weighted by C(n,x); correlators enter through the measurement angles
  directly.  Fast closed forms cover the one-excitation and vacuum
  components at any n.

All sums are accumulated in signed log space (see numerics); when the
alternating correlator sums cancel catastrophically (ratio beyond
CANCELLATION_THRESHOLD) the value is recomputed with mpmath.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import (ConstructionError, DomainError, ResourceLimitError,
                     SingularAngleError)
from .numerics import (CANCELLATION_THRESHOLD, FALLBACK_DPS, LOG_TWO, NEG_INF,
                       get_precision_mode, log_binomial, slog_sum_vec,
                       slog_to_float)
from .states import DickeMixture

#: party-count cap for the correlator-sum MABK path (n+1 reduced terms,
#: each itself a double sum -- grows too fast past this)
MABK_N_CAP = 2000

#: past this, MABK values are carried as sign * exp(log_scale) because 2^n
#: no longer fits comfortably in a double
LOG_MODE_N = 60

_VIOL_TOL = 1e-12
_SINGULAR_TOL = 1e-8


class InequalityKind(Enum):
    HARDY = "hardy"
    MABK = "mabk"


def _canonical_angle(a) -> float:
    a = float(a)
    if not math.isfinite(a):
        raise ConstructionError(f"measurement angle must be finite, got {a}")
    r = math.remainder(a, 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


@dataclass(frozen=True)
class MeasurementPair:
    """The two per-site measurement angles, canonicalized into (-pi, pi]."""

    alpha0: float
    alpha1: float

    def __post_init__(self):
        object.__setattr__(self, "alpha0", _canonical_angle(self.alpha0))
        object.__setattr__(self, "alpha1", _canonical_angle(self.alpha1))


@dataclass(frozen=True)
class BellValue:
    """An evaluated Bell expression with its local bound and violation flag.

    For MABK with n > LOG_MODE_N the magnitude cannot be held in a double;
    ``value`` then carries only the sign (+-1.0 or 0.0), ``log_scale`` the
    log-magnitude (true value = value * exp(log_scale)), and
    ``local_bound`` is stored as log(2^n) = n ln 2.  ``cancellation`` is
    the worst gross/net ratio met while accumulating (1.0 = benign).
    """

    kind: InequalityKind
    n: int
    value: float
    local_bound: float
    violated: bool
    log_scale: float | None = None
    cancellation: float = 1.0

    def mabk_scaled(self) -> float:
        """Signed M / 2^n (only meaningful for MABK values)."""
        if self.kind is not InequalityKind.MABK:
            raise DomainError("mabk_scaled on a non-MABK value")
        if self.log_scale is None:
            return self.value / math.ldexp(1.0, self.n)
        return slog_to_float(int(self.value), self.log_scale - self.n * LOG_TWO)


def _logabs(v: float) -> float:
    return math.log(abs(v)) if v != 0.0 else NEG_INF


def _sign_pow(base_sign: float, exps: np.ndarray) -> np.ndarray:
    """Elementwise sign of base**exps for a scalar base sign (+-1)."""
    if base_sign >= 0.0:
        return np.ones(exps.shape)
    return 1.0 - 2.0 * (np.asarray(exps) % 2)


# ----------------------------------------------------------------------
# Hardy expression
# ----------------------------------------------------------------------

def hardy_components_slog(n: int, ls, h0: float, h1: float):
    """Signed logs of S_n on pure Dicke components, vectorized over l.

    Angles h0, h1 are the *half* measurement angles.  Returns
    (signs, logmags, cancellation) arrays; cancellation is per component.
    """
    l = np.asarray(ls, dtype=np.int64)
    c0, s0 = math.cos(h0), math.sin(h0)
    c1, s1 = math.cos(h1), math.sin(h1)
    lc0, ls0, lc1, ls1 = map(_logabs, (c0, s0, c1, s1))

    def powlog(e, base_log):
        # e * base_log with the 0**0 == 1 convention (avoids 0 * -inf)
        e = np.maximum(e, 0)
        return np.where(e == 0, 0.0, e * base_log)

    def safe_abs_log(v):
        # log|v| with log(0) -> -inf and no warning
        av = np.abs(v)
        return np.where(av > 0.0, np.log(np.where(av > 0.0, av, 1.0)), NEG_INF)

    def canc_ratio(gross, net):
        an = np.abs(net)
        r = gross / np.where(an > 0.0, an, 1.0)
        return np.where(an > 0.0, r, np.where(gross > 0.0, np.inf, 1.0))

    with np.errstate(divide="ignore", invalid="ignore"):
        lCnl = gammaln(n + 1) - gammaln(l + 1) - gammaln(n - l + 1)
        # first term: C(n,l) c0^(2(n-l)) s0^(2l), always nonnegative
        t1_log = lCnl + powlog(2 * (n - l), lc0) + powlog(2 * l, ls0)
        t1_sig = np.ones(l.shape)

        # bracket: C(n-1,l-1) c0^(n-l) s1 s0^(l-1) + C(n-1,l) c0^(n-1-l) c1 s0^l
        b1_log = (gammaln(n) - gammaln(np.maximum(l, 1)) - gammaln(n - l + 1)
                  + powlog(n - l, lc0) + powlog(l - 1, ls0) + ls1)
        b1_log = np.where(l >= 1, b1_log, NEG_INF)
        b1_sig = (_sign_pow(math.copysign(1, c0), n - l)
                  * _sign_pow(math.copysign(1, s0), np.maximum(l - 1, 0))
                  * math.copysign(1, s1))
        b2_log = (gammaln(n) - gammaln(l + 1) - gammaln(np.maximum(n - l, 1))
                  + powlog(n - 1 - l, lc0) + powlog(l, ls0) + lc1)
        b2_log = np.where(l <= n - 1, b2_log, NEG_INF)
        b2_sig = (_sign_pow(math.copysign(1, c0), np.maximum(n - 1 - l, 0))
                  * _sign_pow(math.copysign(1, s0), l)
                  * math.copysign(1, c1))

        m = np.maximum(b1_log, b2_log)
        m_safe = np.where(np.isneginf(m), 0.0, m)
        e1 = np.exp(b1_log - m_safe)
        e2 = np.exp(b2_log - m_safe)
        br = b1_sig * e1 + b2_sig * e2
        br_canc = canc_ratio(e1 + e2, br)
        t2_log = np.where(br != 0.0,
                          math.log(n) - lCnl + 2.0 * (m_safe + safe_abs_log(br)),
                          NEG_INF)
        t2_sig = np.where(br != 0.0, -1.0, 0.0)

        # last term: -C(n,l) s1^(2(n-l)) c1^(2l)
        t3_log = lCnl + powlog(2 * (n - l), ls1) + powlog(2 * l, lc1)
        t3_sig = -np.ones(l.shape)

        tmax = np.maximum(np.maximum(t1_log, t2_log), t3_log)
        tmax_safe = np.where(np.isneginf(tmax), 0.0, tmax)
        u1 = t1_sig * np.exp(t1_log - tmax_safe)
        u2 = t2_sig * np.exp(t2_log - tmax_safe)
        u3 = t3_sig * np.exp(t3_log - tmax_safe)
        net = u1 + u2 + u3
        canc = np.maximum(canc_ratio(np.abs(u1) + np.abs(u2) + np.abs(u3), net),
                          br_canc)
        signs = np.sign(net)
        logs = np.where(net != 0.0, tmax_safe + safe_abs_log(net), NEG_INF)
    return signs, logs, canc


def _hardy_mixture_mp(n: int, ls, ws, h0: float, h1: float, dps: int) -> float:
    """Extended-precision weighted Hardy value (direct closed form).

    ``dps`` is only the starting precision: the float-pipeline cancellation
    estimate that sizes it is itself unreliable once the double-precision
    net is pure rounding noise, so the sum is re-run at escalating
    precision until the net is resolved against the gross magnitude.
    """
    import mpmath

    for _ in range(_MP_MAX_ESCALATIONS):
        with mpmath.workdps(dps):
            c0, s0 = mpmath.cos(h0), mpmath.sin(h0)
            c1, s1 = mpmath.cos(h1), mpmath.sin(h1)
            total = mpmath.mpf(0)
            gross = mpmath.mpf(0)
            for l, w in zip(ls, ws):
                l = int(l)
                cnl = mpmath.binomial(n, l)
                t1 = cnl * c0 ** (2 * (n - l)) * s0 ** (2 * l)
                br = mpmath.mpf(0)
                bg = mpmath.mpf(0)
                if l >= 1:
                    b = mpmath.binomial(n - 1, l - 1) * c0 ** (n - l) * s1 * s0 ** (l - 1)
                    br += b
                    bg += abs(b)
                if l <= n - 1:
                    b = mpmath.binomial(n - 1, l) * c0 ** (n - 1 - l) * c1 * s0 ** l
                    br += b
                    bg += abs(b)
                t2 = n / cnl * br ** 2
                t3 = cnl * s1 ** (2 * (n - l)) * c1 ** (2 * l)
                total += w * (t1 - t2 - t3)
                gross += w * (abs(t1) + n / cnl * bg ** 2 + abs(t3))
            resolved, dps = _mp_resolution(total, gross, dps)
            if resolved:
                return float(total)
    return float(total)


def hardy_mixture_slog(n: int, ls, ws, h0: float, h1: float):
    """(sign, logmag, cancellation) of sum_l w_l S_n(|n,l>) at half-angles."""
    signs, logs, canc = hardy_components_slog(n, ls, h0, h1)
    lw = np.where(np.asarray(ws) > 0.0, np.log(np.maximum(ws, 1e-320)), NEG_INF)
    s, lg, mix_canc = slog_sum_vec(signs, logs + lw)
    worst = max(mix_canc, float(np.max(canc[np.asarray(ws) > 0.0], initial=1.0)))
    return s, lg, worst


def hardy_value(n: int, k: int, angles: MeasurementPair) -> float:
    """Hardy expression S_n on the pure Dicke state with k excitations."""
    if n < 2 or not 0 <= k <= n:
        raise DomainError(f"invalid Dicke parameters n={n}, k={k}")
    h0, h1 = angles.alpha0 / 2.0, angles.alpha1 / 2.0
    signs, logs, canc = hardy_components_slog(n, [k], h0, h1)
    if get_precision_mode() == "extended" or canc[0] > CANCELLATION_THRESHOLD:
        return _hardy_mixture_mp(n, [k], [1.0], h0, h1, _fallback_dps(canc[0]))
    return slog_to_float(int(signs[0]), float(logs[0]))


def hardy_value_mixture(state: DickeMixture, angles: MeasurementPair) -> BellValue:
    """Hardy expression on a Dicke mixture (affine in the weights)."""
    if state.n < 2:
        raise DomainError("Hardy expression needs n >= 2")
    h0, h1 = angles.alpha0 / 2.0, angles.alpha1 / 2.0
    ls = np.array(state.support(), dtype=np.int64)
    ws = np.array([state.weight(int(l)) for l in ls])
    s, lg, canc = hardy_mixture_slog(state.n, ls, ws, h0, h1)
    value = slog_to_float(s, lg)
    if get_precision_mode() == "extended" or canc > CANCELLATION_THRESHOLD:
        value = _hardy_mixture_mp(state.n, ls, ws, h0, h1, _fallback_dps(canc))
    return BellValue(kind=InequalityKind.HARDY, n=state.n, value=value,
                     local_bound=0.0, violated=value > _VIOL_TOL,
                     cancellation=float(canc))


def _fallback_dps(canc: float) -> int:
    if not math.isfinite(canc) or canc <= 0.0:
        return FALLBACK_DPS
    return max(FALLBACK_DPS, int(math.log10(canc)) + 25)


_MP_MAX_ESCALATIONS = 8
_MP_RESOLUTION_GUARD = 15


def _mp_resolution(net, gross, dps: int):
    """Check whether an mpmath alternating sum is resolved at this dps.

    Resolved means the net is safely above the rounding floor gross *
    10^-(dps - guard).  Returns (resolved, next_dps); escalation doubles
    the precision or jumps straight to the measured cancellation, whichever
    is larger.
    """
    import mpmath

    if gross == 0:
        return True, dps
    if net != 0 and abs(net) > gross * mpmath.mpf(10) ** -(dps - _MP_RESOLUTION_GUARD):
        return True, dps
    floor = gross * mpmath.mpf(10) ** (-dps)
    measured = gross / max(abs(net), floor)
    need = int(mpmath.log(measured, 10)) + 2 * _MP_RESOLUTION_GUARD
    return False, max(need, 2 * dps)


# ----------------------------------------------------------------------
# MABK expression
# ----------------------------------------------------------------------

# cos(j * pi/4) as (sign, logmag) for j mod 8
_COS8 = {0: (1.0, 0.0), 1: (1.0, -0.5 * LOG_TWO), 2: (0.0, NEG_INF),
         3: (-1.0, -0.5 * LOG_TWO), 4: (-1.0, 0.0), 5: (-1.0, -0.5 * LOG_TWO),
         6: (0.0, NEG_INF), 7: (1.0, -0.5 * LOG_TWO)}


def _beta_slog(x: int, N: int) -> tuple[float, float]:
    s, lg = _COS8[(1 + N - 2 * x) % 8]
    return s, lg + 0.5 * (N + 1) * LOG_TWO


def beta_coefficient(x: int, N: int) -> float:
    """Input-weight coefficient 2^((N+1)/2) cos[pi/4 (1+N-2x)].

    Always an exact signed power of two (or zero): the half-power of two
    and the cos(pi/4) factor combine exactly, so this is evaluated via
    ldexp rather than transcendentals.
    """
    if not 0 <= x <= N:
        raise DomainError(f"x={x} outside 0..{N}")
    j = (1 + N - 2 * x) % 8
    if N % 2 == 0:
        return {1: 1.0, 3: -1.0, 5: -1.0, 7: 1.0}[j] * math.ldexp(1.0, N // 2)
    if j in (2, 6):
        return 0.0
    return math.ldexp(1.0, (N + 1) // 2) * (1.0 if j == 0 else -1.0)


@lru_cache(maxsize=None)
def _correlator_terms(n_f: int, k: int, x: int):
    """Static part of the (r, q) double sum for one symmetric correlator.

    Returns (signs, const_logs, e0, e1, e2, e3): per-term sign from the
    (-1)^(k-r) alternation, the log of the binomial prefactors already
    divided by C(n_f, k), and the exponents of c0, s0, c1, s1.
    """
    sig, clog, e0, e1, e2, e3 = [], [], [], [], [], []
    lnorm = log_binomial(n_f, k)
    for r in range(k + 1):
        for q in range(max(0, 2 * r + x - n_f), min(2 * r, x) + 1):
            lg = (log_binomial(n_f - x, 2 * r - q) + log_binomial(x, q)
                  + log_binomial(2 * r, r) + log_binomial(n_f - 2 * r, k - r)
                  - lnorm)
            if lg == NEG_INF:
                continue
            sig.append(-1.0 if (k - r) % 2 else 1.0)
            clog.append(lg)
            e0.append(n_f + q - x - 2 * r)
            e1.append(2 * r - q)
            e2.append(x - q)
            e3.append(q)
    return (np.array(sig), np.array(clog), np.array(e0, dtype=np.int64),
            np.array(e1, dtype=np.int64), np.array(e2, dtype=np.int64),
            np.array(e3, dtype=np.int64))


def _trig_term_parts(a0: float, a1: float, e0, e1, e2, e3):
    """Angle-dependent sign and log-magnitude of c0^e0 s0^e1 c1^e2 s1^e3."""
    c0, s0 = math.cos(a0), math.sin(a0)
    c1, s1 = math.cos(a1), math.sin(a1)
    logs = np.zeros(e0.shape)
    signs = np.ones(e0.shape)
    with np.errstate(invalid="ignore"):
        for v, e in ((c0, e0), (s0, e1), (c1, e2), (s1, e3)):
            lv = _logabs(v)
            logs = logs + np.where(e == 0, 0.0, e * lv)
            if v < 0.0:
                signs = signs * _sign_pow(-1.0, e)
    return signs, logs


def symmetric_correlator(n_f: int, k: int, x: int, angles: MeasurementPair) -> float:
    """Full correlator E(x) of a pure Dicke state |n_f, k> when x of the
    n_f parties measure direction 1 and the rest direction 0."""
    if n_f < 1 or not 0 <= k <= n_f or not 0 <= x <= n_f:
        raise DomainError(f"invalid correlator arguments n_f={n_f}, k={k}, x={x}")
    csig, clog, e0, e1, e2, e3 = _correlator_terms(n_f, k, x)
    tsig, tlog = _trig_term_parts(angles.alpha0, angles.alpha1, e0, e1, e2, e3)
    s, lg, canc = slog_sum_vec(csig * tsig, clog + tlog)
    if get_precision_mode() == "extended" or canc > CANCELLATION_THRESHOLD:
        return _correlator_mp(n_f, k, x, angles.alpha0, angles.alpha1,
                              _fallback_dps(canc))
    return slog_to_float(s, lg)


def _correlator_mp(n_f, k, x, a0, a1, dps) -> float:
    import mpmath

    with mpmath.workdps(dps):
        c0, s0 = mpmath.cos(a0), mpmath.sin(a0)
        c1, s1 = mpmath.cos(a1), mpmath.sin(a1)
        tot = mpmath.mpf(0)
        for r in range(k + 1):
            for q in range(max(0, 2 * r + x - n_f), min(2 * r, x) + 1):
                tot += ((-1) ** (k - r) * mpmath.binomial(n_f - x, 2 * r - q)
                        * mpmath.binomial(x, q) * mpmath.binomial(2 * r, r)
                        * mpmath.binomial(n_f - 2 * r, k - r)
                        * c0 ** (n_f + q - x - 2 * r) * s0 ** (2 * r - q)
                        * c1 ** (x - q) * s1 ** q)
        return float(tot / mpmath.binomial(n_f, k))


@lru_cache(maxsize=32)
def _mabk_terms(n: int, support: tuple):
    """Flat term table for the reduced MABK sum over a fixed mixture support.

    Concatenates, over every component l and input weight x, the correlator
    terms with C(n,x) and beta(x,n) folded into the static sign/log parts.
    ``widx`` maps each flat term back to its component's slot in the
    weight vector.
    """
    sig, clog, e0, e1, e2, e3, widx = [], [], [], [], [], [], []
    for slot, l in enumerate(support):
        for x in range(n + 1):
            bs, bl = _beta_slog(x, n)
            if bs == 0.0:
                continue
            cs, cl, a, b, c, d = _correlator_terms(n, l, x)
            pref = bl + log_binomial(n, x)
            sig.append(cs * bs)
            clog.append(cl + pref)
            e0.append(a); e1.append(b); e2.append(c); e3.append(d)
            widx.append(np.full(a.shape, slot, dtype=np.int64))
    cat = np.concatenate
    return (cat(sig), cat(clog), cat(e0), cat(e1), cat(e2), cat(e3), cat(widx))


def mabk_mixture_slog(n: int, support: tuple, ws, a0: float, a1: float):
    """(sign, logmag, cancellation) of the signed MABK value via the
    reduced correlator sum; ws are the weights on the support components."""
    csig, clog, e0, e1, e2, e3, widx = _mabk_terms(n, support)
    tsig, tlog = _trig_term_parts(a0, a1, e0, e1, e2, e3)
    lw = np.where(np.asarray(ws) > 0.0,
                  np.log(np.maximum(ws, 1e-320)), NEG_INF)
    return slog_sum_vec(csig * tsig, clog + tlog + lw[widx])


def _mabk_mixture_mp(n, support, ws, a0, a1, dps):
    """Extended-precision reduced MABK sum; returns (sign, logmag).

    Like the Hardy fallback, re-runs at escalating precision until the
    alternating x-sum is resolved (its true cancellation can exceed the
    double-precision estimate by hundreds of digits at large n).
    """
    import mpmath

    for _ in range(_MP_MAX_ESCALATIONS):
        with mpmath.workdps(dps):
            c0, s0 = mpmath.cos(a0), mpmath.sin(a0)
            c1, s1 = mpmath.cos(a1), mpmath.sin(a1)
            tot = mpmath.mpf(0)
            gross = mpmath.mpf(0)
            for l, w in zip(support, ws):
                if w <= 0.0:
                    continue
                comp = mpmath.mpf(0)
                gcomp = mpmath.mpf(0)
                for x in range(n + 1):
                    e = mpmath.mpf(0)
                    ge = mpmath.mpf(0)
                    for r in range(l + 1):
                        for q in range(max(0, 2 * r + x - n), min(2 * r, x) + 1):
                            t = ((-1) ** (l - r) * mpmath.binomial(n - x, 2 * r - q)
                                 * mpmath.binomial(x, q) * mpmath.binomial(2 * r, r)
                                 * mpmath.binomial(n - 2 * r, l - r)
                                 * c0 ** (n + q - x - 2 * r) * s0 ** (2 * r - q)
                                 * c1 ** (x - q) * s1 ** q)
                            e += t
                            ge += abs(t)
                    cnl = mpmath.binomial(n, l)
                    beta = 2 ** (mpmath.mpf(n + 1) / 2) * mpmath.cos(
                        mpmath.pi / 4 * (1 + n - 2 * x))
                    comp += mpmath.binomial(n, x) * beta * e / cnl
                    gcomp += mpmath.binomial(n, x) * abs(beta) * ge / cnl
                tot += w * comp
                gross += w * gcomp
            resolved, dps = _mp_resolution(tot, gross, dps)
            if resolved:
                break
    if tot == 0:
        return 0.0, NEG_INF
    with mpmath.workdps(dps):
        return (1.0 if tot > 0 else -1.0), float(mpmath.log(abs(tot)))


def mabk_value_mixture(state: DickeMixture, angles: MeasurementPair) -> BellValue:
    """Signed MABK value of a Dicke mixture via the reduced correlator sum."""
    n = state.n
    if n < 2:
        raise DomainError("MABK expression needs n >= 2")
    if n > MABK_N_CAP:
        raise ResourceLimitError(
            f"correlator-sum MABK path capped at n={MABK_N_CAP}, got {n}")
    support = tuple(state.support())
    ws = np.array([state.weight(l) for l in support])
    s, lg, canc = mabk_mixture_slog(n, support, ws, angles.alpha0, angles.alpha1)
    if get_precision_mode() == "extended" or canc > CANCELLATION_THRESHOLD:
        s, lg = _mabk_mixture_mp(n, support, ws, angles.alpha0, angles.alpha1,
                                 _fallback_dps(canc))
    return _mabk_bell_value(n, s, lg, float(canc))


def _mabk_bell_value(n: int, s: float, lg: float, canc: float) -> BellValue:
    bound_log = n * LOG_TWO
    violated = s != 0.0 and lg > bound_log + math.log1p(_VIOL_TOL)
    if n <= LOG_MODE_N:
        return BellValue(kind=InequalityKind.MABK, n=n,
                         value=slog_to_float(int(s), lg),
                         local_bound=math.ldexp(1.0, n), violated=violated,
                         cancellation=canc)
    return BellValue(kind=InequalityKind.MABK, n=n, value=float(np.sign(s)),
                     local_bound=bound_log, violated=violated, log_scale=lg,
                     cancellation=canc)


# --- closed forms for the k <= 1 components -------------------------------

def mabk_w_scaled(n: int, a0: float, a1: float) -> float:
    """Signed M_n / 2^n of the one-excitation Dicke state, closed form.

    With w = c0 - i c1 and u = s0 - i s1 the reduced sum collapses to
    M = 2^((n+1)/2) Re[e^(i(n+1)pi/4) w^(n-2) ((n-1) u^2 - w^2)], evaluated
    here log-scaled; the symmetrized z + conj(z) evaluation is real by
    construction.
    """
    c0, s0 = math.cos(a0), math.sin(a0)
    c1, s1 = math.cos(a1), math.sin(a1)
    w = complex(c0, -c1)
    u = complex(s0, -s1)
    q = (n - 1) * u * u - w * w
    if q == 0:
        return 0.0
    if w == 0:
        if n == 2:
            return (cmath.exp(0.75j * math.pi) * q).real * 2.0 ** 1.5 / 4.0
        return 0.0
    lg = ((n - 2) * math.log(abs(w)) + math.log(abs(q))
          + 0.5 * (n + 1) * LOG_TWO - n * LOG_TWO)
    th = (n - 2) * cmath.phase(w) + cmath.phase(q) + 0.25 * (n + 1) * math.pi
    return math.exp(lg) * math.cos(th)


def mabk_vacuum_scaled(n: int, a0: float, a1: float) -> float:
    """Signed M_n / 2^n of the vacuum component:
    M = 2^((n+1)/2) Re[e^(i(n+1)pi/4) (c0 - i c1)^n]."""
    w = complex(math.cos(a0), -math.cos(a1))
    if w == 0:
        return 0.0
    lg = n * math.log(abs(w)) + 0.5 * (n + 1) * LOG_TWO - n * LOG_TWO
    th = n * cmath.phase(w) + 0.25 * (n + 1) * math.pi
    return math.exp(lg) * math.cos(th)


def _check_regular(angles: MeasurementPair) -> None:
    if (abs(math.cos(angles.alpha0)) < _SINGULAR_TOL
            or abs(math.cos(angles.alpha1)) < _SINGULAR_TOL):
        raise SingularAngleError(
            "closed form is singular near |cos alpha| = 0; "
            "use the correlator-sum path instead")


def mabk_closed_w(n: int, angles: MeasurementPair) -> float:
    """Signed MABK value of the one-excitation state via the closed form.

    Raises SingularAngleError near |c0| = 0 or |c1| = 0, where the
    derivation of the closed form degenerates; callers fall back to
    mabk_value_mixture there.  Overflows of 2^n saturate to +-inf; use
    mabk_w_scaled for large n.
    """
    if n < 2:
        raise DomainError("MABK expression needs n >= 2")
    _check_regular(angles)
    v = mabk_w_scaled(n, angles.alpha0, angles.alpha1)
    if v == 0.0:
        return 0.0
    return slog_to_float(1 if v > 0 else -1, math.log(abs(v)) + n * LOG_TWO)


def mabk_closed_vacuum(n: int, angles: MeasurementPair) -> float:
    """Signed MABK value of the vacuum component via the closed form."""
    if n < 2:
        raise DomainError("MABK expression needs n >= 2")
    v = mabk_vacuum_scaled(n, angles.alpha0, angles.alpha1)
    if v == 0.0:
        return 0.0
    return slog_to_float(1 if v > 0 else -1, math.log(abs(v)) + n * LOG_TWO)
