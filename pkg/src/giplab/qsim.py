"""Ideal simulation of the entanglement-assisted GIP protocol.

Each coordinate of the input uses its own n-qudit resource
``(|0...0> + |1...1> + ... + |n-1...n-1>)/sqrt(n)``. Player ``p`` applies the
phase map selected by its symbol, a QFT on its qudit, and measures; the sum of
the n measured digits equals the column product.

Two backends are provided. ``dense`` evolves the full n^n state vector.
``analytic`` stays in the n-dimensional span of the ``|k,...,k>`` states: after
the QFT the amplitude of a digit string depends only on its digit sum mod n, so
the protocol reduces to sampling a class and then a uniform string in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import FieldElem, PhaseExp, check_modulus
from .instances import PromiseColumn, PromiseInstance, gip_eval

NORM_TOL = 1e-9
MEASURE_NORM_TOL = 1e-6
DEFAULT_MAX_AMPLITUDES = 10_000_000


class MemoryBudgetError(MemoryError):
    pass


@dataclass(frozen=True)
class QuditRegister:
    n: int
    k: int
    amplitudes: np.ndarray

    def __post_init__(self):
        check_modulus(self.n)
        if self.amplitudes.shape != (self.n**self.k,):
            raise ValueError(f"expected {self.n ** self.k} amplitudes, got {self.amplitudes.shape}")

    @classmethod
    def basis(cls, n: int, digits) -> QuditRegister:
        digits = tuple(digits)
        amps = np.zeros(n ** len(digits), dtype=complex)
        amps[digits_to_index(digits, n)] = 1.0
        return cls(n, len(digits), amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.n,) * self.k)


@dataclass(frozen=True)
class MeasurementOutcome:
    digits: tuple[int, ...]

    def digit_sum(self, n: int) -> int:
        return sum(self.digits) % n


@dataclass(frozen=True)
class Transcript:
    """Symbols sent by players 2..n, in player order."""

    n: int
    symbols: tuple[int, ...]
    alphabet_sizes: tuple[int, ...]
    alice_symbol: int = 0
    outcomes: tuple[MeasurementOutcome, ...] = field(default=(), repr=False)

    @property
    def ideal_bits(self) -> float:
        return sum(math.log2(a) for a in self.alphabet_sizes)

    @property
    def rounded_bits(self) -> int:
        return sum(math.ceil(math.log2(a)) for a in self.alphabet_sizes)


def digits_to_index(digits, n: int) -> int:
    idx = 0
    for d in digits:
        if not 0 <= d < n:
            raise ValueError(f"digit {d} out of range for n={n}")
        idx = idx * n + d
    return idx


def index_to_digits(index: int, n: int, k: int) -> tuple[int, ...]:
    if not 0 <= index < n**k:
        raise ValueError(f"index {index} out of range for {k} qudits of dimension {n}")
    out = []
    for _ in range(k):
        index, d = divmod(index, n)
        out.append(d)
    return tuple(reversed(out))


def make_entangled_state(n: int) -> QuditRegister:
    check_modulus(n)
    amps = np.zeros(n**n, dtype=complex)
    step = sum(n**i for i in range(n))  # index of |1,1,...,1>
    amps[np.arange(n) * step] = 1 / math.sqrt(n)
    return QuditRegister(n, n, amps)


def phase_map_exponents(j: int, n: int) -> tuple[int, ...]:
    """Exponents (units of 2*pi/n^2) that the phase map for symbol ``j`` puts on each digit."""
    nn = n * n
    if j % n == 0:
        return tuple((-(n * (n - 1) // 2)) % nn if i == 0 else 0 for i in range(n))
    return tuple((-((i * j) % n)) % nn for i in range(n))


def phase_map(j: int, n: int) -> tuple[PhaseExp, ...]:
    return tuple(PhaseExp(e, n) for e in phase_map_exponents(j, n))


def _check_qudit(reg: QuditRegister, qudit: int) -> None:
    if not 0 <= qudit < reg.k:
        raise IndexError(f"qudit index {qudit} out of range for {reg.k} qudits")


def _apply_local(reg: QuditRegister, qudit: int, matrix: np.ndarray) -> QuditRegister:
    psi = np.moveaxis(reg.tensor(), qudit, 0)
    psi = np.tensordot(matrix, psi, axes=([1], [0]))
    psi = np.moveaxis(psi, 0, qudit)
    return QuditRegister(reg.n, reg.k, np.ascontiguousarray(psi).reshape(-1))


def apply_phase_map(reg: QuditRegister, qudit: int, j) -> QuditRegister:
    _check_qudit(reg, qudit)
    phases = np.array([p.to_complex() for p in phase_map(int(j), reg.n)])
    shape = [1] * reg.k
    shape[qudit] = reg.n
    psi = reg.tensor() * phases.reshape(shape)
    return QuditRegister(reg.n, reg.k, psi.reshape(-1))


@lru_cache(maxsize=None)
def qft_matrix(n: int) -> np.ndarray:
    """F[k, j] = omega^(jk)/sqrt(n), so column j is the image of |j>."""
    jk = np.outer(np.arange(n), np.arange(n)) % n
    mat = np.exp(2j * np.pi * jk / n) / math.sqrt(n)
    mat.setflags(write=False)
    return mat


def apply_qft(reg: QuditRegister, qudit: int, inverse: bool = False) -> QuditRegister:
    _check_qudit(reg, qudit)
    mat = qft_matrix(reg.n)
    return _apply_local(reg, qudit, mat.conj().T if inverse else mat)


def measure_all(reg: QuditRegister, rng: np.random.Generator) -> MeasurementOutcome:
    probs = np.abs(reg.amplitudes) ** 2
    total = probs.sum()
    if abs(total - 1.0) > MEASURE_NORM_TOL:
        raise ValueError(f"register norm^2 is {total:.9f}, not 1")
    idx = int(rng.choice(probs.size, p=probs / total))
    return MeasurementOutcome(index_to_digits(idx, reg.n, reg.k))


# -- exact phase bookkeeping -------------------------------------------------


def postphase_coefficients(column: PromiseColumn) -> tuple[PhaseExp, ...]:
    """Coefficient of |k,...,k> after every player applies its phase map (exact).

    Computed by multiplying the n per-player phases on digit k.
    """
    n = column.n
    maps = [phase_map_exponents(x, n) for x in column.entries()]
    return tuple(PhaseExp(sum(m[k] for m in maps), n) for k in range(n))


def expected_postphase_coefficients(column: PromiseColumn) -> tuple[PhaseExp, ...]:
    """Closed form: omega^(-kj) for a constant column j, else omega^(-(n-1)/2) throughout."""
    n = column.n
    if column.b == 0:
        return tuple(PhaseExp.omega_power(-k * column.a, n) for k in range(n))
    return tuple(PhaseExp.omega_power(-(n - 1) // 2, n) for _ in range(n))


def nth_root_sum_is_zero(exponents, n: int) -> bool:
    """Exact test that a multiset of n-th roots omega^e sums to zero (n prime).

    For prime n the only rational relation among 1, omega, ..., omega^(n-1) is
    their plain sum, so the sum vanishes iff every root appears equally often.
    """
    counts = np.bincount(np.asarray(exponents) % n, minlength=n)
    return bool(np.all(counts == counts[0]))


def phased_span_state(n: int, x: int) -> QuditRegister:
    """(1/sqrt(n)) * sum_j omega^(-jx) |j,...,j>."""
    reg = make_entangled_state(n)
    stride = sum(n**i for i in range(n))
    amps = reg.amplitudes.copy()
    for j in range(n):
        amps[j * stride] *= PhaseExp.omega_power(-j * x, n).to_complex()
    return QuditRegister(n, n, amps)


def qft_all(reg: QuditRegister) -> QuditRegister:
    for q in range(reg.k):
        reg = apply_qft(reg, q)
    return reg


def exact_support_after_qft(n: int, x: int) -> np.ndarray:
    """Boolean mask over all n^n digit strings: is the post-QFT amplitude nonzero?

    The unnormalized amplitude of |k> is sum_j omega^(j*(sum(k) - x)); each term
    is tracked by its integer exponent and the vanishing test is exact.
    """
    digit_sums = np.indices((n,) * n, dtype=np.int64).reshape(n, -1).sum(axis=0)
    j = np.arange(n, dtype=np.int64)
    exps = (j[None, :] * (digit_sums[:, None] - x)) % n
    counts = np.stack([(exps == e).sum(axis=1) for e in range(n)], axis=1)
    vanishes = np.all(counts == counts[:, :1], axis=1)
    return ~vanishes


# -- dense backend ------------------------------------------------------------


def dense_budget_check(n: int, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES) -> None:
    if n**n > max_amplitudes:
        raise MemoryBudgetError(
            f"dense simulation of {n} qudits needs {n ** n} amplitudes "
            f"(limit {max_amplitudes}); use the analytic backend"
        )


def dense_postphase_state(column: PromiseColumn) -> QuditRegister:
    reg = make_entangled_state(column.n)
    for p, x in enumerate(column.entries()):
        reg = apply_phase_map(reg, p, x)
    return reg


def dense_final_state(column: PromiseColumn) -> QuditRegister:
    return qft_all(dense_postphase_state(column))


@lru_cache(maxsize=256)
def _dense_probabilities(n: int, a: int, b: int) -> np.ndarray:
    reg = dense_final_state(PromiseColumn(a, b, n))
    probs = np.abs(reg.amplitudes) ** 2
    total = probs.sum()
    if abs(total - 1.0) > MEASURE_NORM_TOL:
        raise ValueError(f"register norm^2 is {total:.9f}, not 1")
    probs = probs / total
    probs.setflags(write=False)
    return probs


def dense_class_marginals(column: PromiseColumn) -> np.ndarray:
    """Probability that the measured digits sum to s, for each s, from the dense state."""
    n = column.n
    probs = _dense_probabilities(n, column.a, column.b)
    digit_sums = np.indices((n,) * n).reshape(n, -1).sum(axis=0) % n
    return np.bincount(digit_sums, weights=probs, minlength=n)


def sample_outcome_dense(column: PromiseColumn, rng: np.random.Generator) -> MeasurementOutcome:
    n = column.n
    probs = _dense_probabilities(n, column.a, column.b)
    idx = int(rng.choice(probs.size, p=probs))
    return MeasurementOutcome(index_to_digits(idx, n, n))


# -- analytic backend -----------------------------------------------------------


def analytic_class_distribution(column: PromiseColumn) -> np.ndarray:
    n = column.n
    coeffs = np.array([c.to_complex() for c in postphase_coefficients(column)])
    ks = np.arange(n)
    fourier = np.exp(2j * np.pi * np.outer(ks, ks) / n)  # [s, k] -> omega^(ks)
    probs = np.abs(fourier @ coeffs) ** 2 / (n * n)
    return probs / probs.sum()


def sample_outcome_analytic(column: PromiseColumn, rng: np.random.Generator) -> MeasurementOutcome:
    n = column.n
    s = int(rng.choice(n, p=analytic_class_distribution(column)))
    head = rng.integers(0, n, size=n - 1)
    last = (s - int(head.sum())) % n
    return MeasurementOutcome(tuple(int(d) for d in head) + (last,))


# -- protocol -----------------------------------------------------------------------


def substream(seed: int, trial: int, coordinate: int) -> np.random.Generator:
    """Generator for one (trial, coordinate); independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, coordinate)))


def run_quantum_protocol(
    instance: PromiseInstance,
    backend: str = "dense",
    seed: int = 0,
    trial: int = 0,
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
) -> tuple[Transcript, FieldElem]:
    n = instance.n
    if backend == "dense":
        dense_budget_check(n, max_amplitudes)
        sample = sample_outcome_dense
    elif backend == "analytic":
        sample = sample_outcome_analytic
    else:
        raise ValueError(f"unknown backend {backend!r}")
    sums = [0] * n
    outcomes = []
    for i, col in enumerate(instance.columns):
        out = sample(col, substream(seed, trial, i))
        outcomes.append(out)
        for p, d in enumerate(out.digits):
            sums[p] = (sums[p] + d) % n
    transcript = Transcript(
        n=n,
        symbols=tuple(sums[1:]),
        alphabet_sizes=(n,) * (n - 1),
        alice_symbol=sums[0],
        outcomes=tuple(outcomes),
    )
    recovered = FieldElem((transcript.alice_symbol + sum(transcript.symbols)) % n, n)
    return transcript, recovered


def quantum_report(instance: PromiseInstance, backend: str, seed: int, trial: int = 0) -> dict:
    transcript, recovered = run_quantum_protocol(instance, backend, seed, trial)
    oracle = gip_eval(instance).value
    return {
        "protocol": "quantum",
        "n": instance.n,
        "m": instance.m,
        "backend": backend,
        "seed": seed,
        "trial": trial,
        "symbols": list(transcript.symbols),
        "recovered": recovered.value,
        "oracle": oracle,
        "match": recovered.value == oracle,
        "bit_cost": transcript.ideal_bits,
        "bit_cost_rounded": transcript.rounded_bits,
    }
