"""Log-domain combinatorics and signed accumulation helpers.

Everything downstream manipulates quantities like C(10^4, 50) * c0**(2*10^4)
that overflow or underflow double precision long before the objects of
interest (signs, ratios, comparisons against 2^n) become extreme.  The
shared convention: a *signed log* is a pair ``(sign, logmag)`` with
``sign in {-1, 0, +1}`` and ``logmag = ln|x|`` (``-inf`` iff ``sign == 0``).

Alternating sums are accumulated with a max-shifted compensated sum; the
ratio of gross to net magnitude is reported so callers can re-evaluate in
software extended precision (mpmath) when cancellation eats the mantissa.
"""

from __future__ import annotations

import math

import numpy as np

LOG_TWO = math.log(2.0)
NEG_INF = float("-inf")

#: cancellation ratio beyond which double-precision results are deemed
#: untrustworthy and an extended-precision re-evaluation is requested
CANCELLATION_THRESHOLD = 1e6

#: significant decimal digits used by the extended-precision fallback
FALLBACK_DPS = 40

_precision_mode = "standard"


def set_precision_mode(mode: str) -> None:
    """Select 'standard' (doubles + fallback on cancellation) or 'extended'
    (always evaluate the cancellation-prone sums in software precision)."""
    global _precision_mode
    if mode not in ("standard", "extended"):
        raise ValueError(f"unknown precision mode {mode!r}")
    _precision_mode = mode


def get_precision_mode() -> str:
    return _precision_mode


def log_factorial(a: int) -> float:
    """ln(a!) via the log-gamma function."""
    if a < 0:
        raise ValueError("factorial of negative integer")
    return math.lgamma(a + 1)


def log_binomial(a: int, b) -> float:
    """ln C(a, b); returns -inf when b < 0 or b > a (the empty-choice
    convention used by the hypergeometric weights and correlator sums)."""
    if a < 0:
        raise ValueError("log_binomial requires a >= 0")
    if b < 0 or b > a:
        return NEG_INF
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def slog(x: float) -> tuple[int, float]:
    """Signed log of a plain float."""
    if x == 0.0:
        return (0, NEG_INF)
    return (1 if x > 0 else -1, math.log(abs(x)))


def slog_to_float(s: int, logmag: float) -> float:
    """Back to a double; saturates to +/-inf past the exponent range."""
    if s == 0 or logmag == NEG_INF:
        return 0.0
    if logmag > 709.0:
        return math.inf if s > 0 else -math.inf
    return s * math.exp(logmag)


def slog_mul(a: tuple[int, float], b: tuple[int, float]) -> tuple[int, float]:
    if a[0] == 0 or b[0] == 0:
        return (0, NEG_INF)
    return (a[0] * b[0], a[1] + b[1])


def slog_pow(a: tuple[int, float], e: int) -> tuple[int, float]:
    """Integer power of a signed log; 0**0 == 1."""
    if e < 0:
        raise ValueError("negative exponent")
    if e == 0:
        return (1, 0.0)
    if a[0] == 0:
        return (0, NEG_INF)
    sign = -1 if (a[0] < 0 and e % 2 == 1) else 1
    return (sign, a[1] * e)


def slog_sum(terms) -> tuple[int, float, float]:
    """Signed log-sum-exp of an iterable of (sign, logmag) pairs.

    Returns (sign, logmag, cancellation) where cancellation is the ratio of
    the gross magnitude sum to the net result (1.0 for same-sign input,
    inf when the net is exactly zero).
    """
    live = [(s, l) for s, l in terms if s != 0 and l != NEG_INF]
    if not live:
        return (0, NEG_INF, 1.0)
    lmax = max(l for _, l in live)
    net = math.fsum(s * math.exp(l - lmax) for s, l in live)
    gross = math.fsum(math.exp(l - lmax) for _, l in live)
    if net == 0.0:
        return (0, NEG_INF, math.inf)
    return (1 if net > 0 else -1, lmax + math.log(abs(net)), gross / abs(net))


def slog_sum_vec(signs: np.ndarray, logs: np.ndarray) -> tuple[int, float, float]:
    """Vectorized signed log-sum-exp over numpy arrays.

    A fast numpy pass decides whether the sum is benign; near-cancelling
    sums are redone with compensated (fsum) accumulation before reporting.
    """
    mask = (signs != 0) & (logs != NEG_INF)
    if not np.any(mask):
        return (0, NEG_INF, 1.0)
    sg = signs[mask].astype(np.float64)
    lg = logs[mask]
    lmax = float(lg.max())
    scaled = np.exp(lg - lmax)
    net = float(sg @ scaled)
    gross = float(scaled.sum())
    if net == 0.0 or gross > 1e3 * abs(net):
        net = math.fsum((sg * scaled).tolist())
        if net == 0.0:
            return (0, NEG_INF, math.inf)
    return (1 if net > 0 else -1, lmax + math.log(abs(net)), gross / abs(net))


def slog_sum_mp(terms, dps: int = FALLBACK_DPS) -> tuple[int, float, float]:
    """Extended-precision signed log-sum-exp (mpmath workspace).

    Callers that can rebuild the term logs themselves at high precision
    should do so before calling; this protects only the accumulation step.
    """
    import mpmath

    with mpmath.workdps(dps):
        net = mpmath.mpf(0)
        gross = mpmath.mpf(0)
        for s, l in terms:
            if s == 0 or l == NEG_INF:
                continue
            t = mpmath.exp(l)
            net += s * t
            gross += t
        if net == 0:
            return (0, NEG_INF, math.inf)
        return (1 if net > 0 else -1, float(mpmath.log(abs(net))),
                float(gross / abs(net)) if net else math.inf)
