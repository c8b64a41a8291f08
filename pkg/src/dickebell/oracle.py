"""Brute-force qubit-level reference implementation for small n.

Everything here works on dense 2^n-dimensional objects and literal
definitions -- explicit symmetrized state vectors, per-qubit Kraus maps,
partial traces, projector-built joint probability tensors, and the Bell
expressions as plain sums over outcome strings.  It exists to be slow,
obvious, and independent of every closed form in the rest of the package,
so that those closed forms can be validated against it.

Outcome indexing convention: axis value 0 means outcome +1 and axis
value 1 means outcome -1; the Hardy expression's "0"/"1" outcome labels
map to +1/-1 in that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .bell import InequalityKind, MeasurementPair, beta_coefficient
from .errors import ConstructionError, ResourceLimitError
from .numerics import log_binomial

#: dense state/density-matrix cap (memory ~16 * 4^n bytes for matrices)
STATE_CAP = 12
#: full joint-probability-tensor cap (4^n real entries)
TENSOR_CAP = 10

_EIG_TRUNC = 1e-13


@dataclass(frozen=True)
class DenseState:
    """Pure n-qubit state as an explicit amplitude vector (qubit 0 is the
    most significant bit of the basis index)."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (2 ** self.n,):
            raise ConstructionError(
                f"amplitude vector has shape {amp.shape}, want (2^{self.n},)")
        if abs(np.vdot(amp, amp).real - 1.0) > 1e-12:
            raise ConstructionError("state vector is not normalized")
        object.__setattr__(self, "amplitudes", amp)


@dataclass(frozen=True)
class DensityMatrix:
    """Dense n-qubit density operator.

    Construction checks Hermiticity and unit trace (1e-12) and positive
    semidefiniteness (eigenvalues >= -1e-10); the eigenvalue check makes
    construction O(8^n), which is the point of a brute-force oracle.
    """

    n: int
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        dim = 2 ** self.n
        if m.shape != (dim, dim):
            raise ConstructionError(f"matrix shape {m.shape}, want ({dim},{dim})")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0.0):
            raise ConstructionError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ConstructionError(f"trace is {np.trace(m)}, not 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ConstructionError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", m)


@dataclass(frozen=True)
class ProbabilityTensor:
    """Joint conditional probabilities P(a|x) for all settings and outcomes.

    ``values`` has 2n binary axes: the first n are the settings x_i, the
    last n the outcome indices a_i (0 -> +1, 1 -> -1).
    """

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2,) * (2 * self.n):
            raise ConstructionError("tensor must have 2n binary axes")
        if v.min() < -1e-12 or v.max() > 1.0 + 1e-12:
            raise ConstructionError("probabilities outside [0, 1]")
        sums = v.sum(axis=tuple(range(self.n, 2 * self.n)))
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise ConstructionError("conditional distributions do not sum to 1")
        object.__setattr__(self, "values", v)


def build_dicke(n: int, k: int) -> DenseState:
    """|n,k>: equal amplitude C(n,k)^(-1/2) on all weight-k basis strings."""
    if n > STATE_CAP:
        raise ResourceLimitError(f"dense states capped at n={STATE_CAP}, got {n}")
    if n < 1 or not 0 <= k <= n:
        raise ConstructionError(f"invalid Dicke parameters n={n}, k={k}")
    amp = np.zeros(2 ** n, dtype=complex)
    norm = math.exp(-0.5 * log_binomial(n, k))
    for i in range(2 ** n):
        if bin(i).count("1") == k:
            amp[i] = norm
    return DenseState(n=n, amplitudes=amp)


def to_density(state: DenseState) -> DensityMatrix:
    """|psi><psi| of a pure state."""
    return DensityMatrix(n=state.n, entries=np.outer(state.amplitudes,
                                                     state.amplitudes.conj()))


def dicke_density(n: int, k: int) -> DensityMatrix:
    return to_density(build_dicke(n, k))


def _apply_qubit_kraus(rho: np.ndarray, n: int, q: int, kraus) -> np.ndarray:
    """sum_m K_m rho K_m^dagger acting on qubit q only."""
    a, b = 2 ** q, 2 ** (n - q - 1)
    r = rho.reshape(a, 2, b, a, 2, b)
    out = np.zeros_like(r)
    for km in kraus:
        out += np.einsum("xi,aibcjd,yj->axbcyd", km, r, km.conj())
    return out.reshape(2 ** n, 2 ** n)


def apply_amplitude_damping(state: DensityMatrix, p: float) -> DensityMatrix:
    """Independent per-qubit decay |1> -> |0> with probability p.

    Kraus pair K0 = diag(1, sqrt(1-p)), K1 = sqrt(p) |0><1| applied to
    every qubit via index arithmetic (no 4^n channel matrices).
    """
    if not 0.0 <= p <= 1.0:
        raise ConstructionError(f"loss probability p={p} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - p)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(p)], [0.0, 0.0]], dtype=complex)
    rho = state.entries
    for q in range(state.n):
        rho = _apply_qubit_kraus(rho, state.n, q, (k0, k1))
    return DensityMatrix(n=state.n, entries=rho)


def trace_out(state: DensityMatrix, m: int) -> DensityMatrix:
    """Partial trace over the last m qubits."""
    if m < 0 or m >= state.n:
        raise ConstructionError(f"cannot trace out m={m} of n={state.n} qubits")
    if m == 0:
        return state
    nf = state.n - m
    r = state.entries.reshape(2 ** nf, 2 ** m, 2 ** nf, 2 ** m)
    return DensityMatrix(n=nf, entries=np.einsum("aibi->ab", r))


def _outcome_rows(alpha: float) -> np.ndarray:
    """Bra rows of the two outcome projectors of cos(a) sigma_z + sin(a) sigma_x.

    Row 0 is the +1 eigenvector (cos a/2, sin a/2), row 1 the -1
    eigenvector (-sin a/2, cos a/2)."""
    h = alpha / 2.0
    return np.array([[math.cos(h), math.sin(h)],
                     [-math.sin(h), math.cos(h)]])


def joint_probabilities(state: DensityMatrix, angles: MeasurementPair) -> ProbabilityTensor:
    """P(a|x) for every setting/outcome assignment, via the spectral
    decomposition of rho (eigenvalues below 1e-13 are dropped) and
    per-qubit basis rotations of each eigenvector."""
    n = state.n
    if n > TENSOR_CAP:
        raise ResourceLimitError(
            f"full probability tensors capped at n={TENSOR_CAP}, got {n}")
    rows = np.stack([_outcome_rows(angles.alpha0), _outcome_rows(angles.alpha1)])
    q_mat = rows.reshape(4, 2)  # [(x,a), s]
    evals, evecs = np.linalg.eigh(state.entries)
    probs = np.zeros((4,) * n)
    for lam, vec in zip(evals, evecs.T):
        if lam <= _EIG_TRUNC:
            continue
        t = vec.reshape((2,) * n).astype(complex)
        for q in range(n):
            t = np.moveaxis(t, q, 0)
            shape = t.shape
            t = (q_mat @ t.reshape(shape[0], -1)).reshape((4,) + shape[1:])
            t = np.moveaxis(t, 0, q)
        probs += lam * (t.real ** 2 + t.imag ** 2)
    # split each (x_q, a_q) axis and bring all x axes to the front
    probs = probs.reshape((2,) * (2 * n))
    perm = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
    probs = np.transpose(probs, axes=perm)
    return ProbabilityTensor(n=n, values=np.clip(probs, 0.0, None))


def bell_from_tensor(t: ProbabilityTensor, kind: InequalityKind) -> float:
    """Literal Bell sums over the tensor (no symmetry assumptions)."""
    n = t.n
    v = t.values
    if kind is InequalityKind.HARDY:
        zeros = (0,) * n
        ones = (1,) * n
        total = v[zeros + zeros]
        for i in range(n):
            x = [0] * n
            x[i] = 1
            total -= v[tuple(x) + zeros]
        total -= v[ones + ones]
        return float(total)
    sign = np.ones((2,) * n)
    for q in range(n):
        shape = [1] * n
        shape[q] = 2
        sign = sign * np.array([1.0, -1.0]).reshape(shape)
    total = 0.0
    for xvec in np.ndindex(*(2,) * n):
        e = float((v[xvec] * sign).sum())
        total += beta_coefficient(int(sum(xvec)), n) * e
    return float(total)


def correlator_from_tensor(t: ProbabilityTensor, xvec) -> float:
    """Product-of-outcomes expectation E(x) for one setting assignment."""
    n = t.n
    sign = np.ones((2,) * n)
    for q in range(n):
        shape = [1] * n
        shape[q] = 2
        sign = sign * np.array([1.0, -1.0]).reshape(shape)
    return float((t.values[tuple(xvec)] * sign).sum())


def bell_value_oracle(state: DensityMatrix, angles: MeasurementPair,
                      kind: InequalityKind) -> float:
    return bell_from_tensor(joint_probabilities(state, angles), kind)


def lhv_strategy_tensor(n: int, choices) -> ProbabilityTensor:
    """Deterministic local strategy: party i answers choices[i][x] (outcome
    index, 0 -> +1) to setting x."""
    vals = np.ones(())
    for i in range(n):
        d = np.zeros((2, 2))
        d[0, choices[i][0]] = 1.0
        d[1, choices[i][1]] = 1.0
        vals = np.multiply.outer(vals, d)
    perm = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
    vals = np.transpose(vals, axes=perm)
    return ProbabilityTensor(n=n, values=vals)


def enumerate_lhv_strategies(n: int):
    """All 4^n deterministic local strategies as probability tensors."""
    for combo in product(product((0, 1), repeat=2), repeat=n):
        yield lhv_strategy_tensor(n, combo)


def dicke_diagonal_residual(state: DensityMatrix):
    """Project onto the Dicke-diagonal subspace.

    Returns (weights, residual): weights[l] = <n,l| rho |n,l> and the
    Frobenius norm of what is left after subtracting the Dicke-diagonal
    part.  A diagnostic for loss channels that are claimed to map Dicke
    states to Dicke mixtures.
    """
    n = state.n
    weights = {}
    residual = state.entries.copy()
    for l in range(n + 1):
        vec = build_dicke(n, l).amplitudes
        w = float(np.real(vec.conj() @ state.entries @ vec))
        weights[l] = w
        residual -= w * np.outer(vec, vec.conj())
    return weights, float(np.linalg.norm(residual))
