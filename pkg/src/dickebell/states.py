"""Dicke-diagonal states of n qubits and the two loss channels.

A symmetric Dicke state |n,k> has k excitations shared among n qubits.
Both loss models considered here map Dicke states to mixtures that are
diagonal in the Dicke basis, so a state is just a sparse map from
excitation number to probability weight:

* excitation loss -- each of the k excitations is independently lost with
  probability p, giving a binomial mixture over surviving excitation
  numbers l <= k (particle number unchanged);
* particle loss -- m of the n particles are traced out, giving a
  hypergeometric mixture over how many excitations remain among the
  n_f = n - m survivors.

Weights are computed in log domain so that n ~ 10^4 components never
overflow, and clamped/renormalized against harmless negative round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConstructionError, DomainError
from .numerics import NEG_INF, log_binomial

_CLAMP = -1e-15
_NORM_TOL = 1e-12


class LossModel(Enum):
    """Which of the two loss channels produced a state / threshold."""

    EXCITATION = "excitation"
    PARTICLE = "particle"


@dataclass(frozen=True)
class DickeLabel:
    """A pure symmetric Dicke state |n,k>."""

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ConstructionError(f"need at least one qubit, got n={self.n}")
        if not 0 <= self.k <= self.n:
            raise ConstructionError(f"excitation count k={self.k} outside 0..{self.n}")


@dataclass(frozen=True)
class DickeMixture:
    """Dicke-diagonal mixed state: sparse weights over excitation number.

    Weights are validated to be nonnegative up to round-off (entries in
    [-1e-15, 0) are clamped to zero) and to sum to 1 within 1e-12; the
    stored weights are exactly renormalized after clamping.
    """

    n: int
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ConstructionError(f"need at least one qubit, got n={self.n}")
        clean = {}
        for k, w in self.weights.items():
            kk = int(k)
            if kk != k or not 0 <= kk <= self.n:
                raise ConstructionError(f"excitation label {k!r} outside 0..{self.n}")
            w = float(w)
            if w < _CLAMP:
                raise ConstructionError(f"negative weight {w} at k={kk}")
            if w <= 0.0:
                continue
            clean[kk] = clean.get(kk, 0.0) + w
        total = math.fsum(clean.values())
        if abs(total - 1.0) > _NORM_TOL:
            raise ConstructionError(f"weights sum to {total}, not 1")
        if total != 1.0:
            clean = {k: w / total for k, w in clean.items()}
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    def weight(self, k: int) -> float:
        """Weight on |n,k><n,k| (0 for absent components)."""
        return self.weights.get(k, 0.0)

    def support(self) -> list[int]:
        """Excitation numbers carrying nonzero weight, ascending."""
        return list(self.weights.keys())

    def items(self):
        return self.weights.items()


def make_pure(n: int, k: int) -> DickeMixture:
    """Point-mass mixture at |n,k>."""
    DickeLabel(n, k)  # range validation
    return DickeMixture(n=n, weights={k: 1.0})


def excitation_loss(state: DickeMixture, p: float) -> DickeMixture:
    """Independent loss of each excitation with probability p.

    A component with k excitations spreads binomially over the surviving
    count l: weight C(k,l) (1-p)^l p^(k-l).  Particle number is unchanged.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"loss probability p={p} outside [0, 1]")
    if p == 0.0:
        return state
    if p == 1.0:
        return DickeMixture(n=state.n, weights={0: 1.0})
    lp, lq = math.log(p), math.log1p(-p)
    out: dict[int, float] = {}
    for k, w in state.items():
        for l in range(k + 1):
            t = w * math.exp(log_binomial(k, l) + l * lq + (k - l) * lp)
            out[l] = out.get(l, 0.0) + t
    return DickeMixture(n=state.n, weights=out)


def particle_loss(state: DickeMixture, m: int) -> DickeMixture:
    """Trace out m of the n particles.

    By permutation symmetry the surviving n_f = n - m qubits hold a
    hypergeometric mixture: a k-excitation component contributes weight
    C(n_f,l) C(m,k-l) / C(n,k) at excitation number l.
    """
    if m < 0 or m >= state.n:
        raise DomainError(f"cannot trace out m={m} of n={state.n} particles")
    if m == 0:
        return state
    n, nf = state.n, state.n - m
    out: dict[int, float] = {}
    for k, w in state.items():
        lnk = log_binomial(n, k)
        for l in range(max(0, k - m), min(nf, k) + 1):
            lw = log_binomial(nf, l) + log_binomial(m, k - l) - lnk
            if lw == NEG_INF:
                continue
            out[l] = out.get(l, 0.0) + w * math.exp(lw)
    return DickeMixture(n=nf, weights=out)
