"""Classical counting protocol: players send symbol frequencies mod n^2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import FieldElem, check_modulus
from .instances import PromiseInstance, gip_eval


class ProtocolArithmeticError(ArithmeticError):
    """W was not a multiple of n; only an implementation bug can cause this."""


@dataclass(frozen=True)
class CountVector:
    beta: tuple[int, ...]
    m: int

    def __post_init__(self):
        if sum(self.beta) != self.m:
            raise ValueError("symbol counts must sum to the vector length")

    def __getitem__(self, k: int) -> int:
        return self.beta[k]


@dataclass(frozen=True)
class ClassicalTranscript:
    """``residues[p-2][k-1]`` is beta_k^p mod n^2, players p = 2..n, symbols k = 1..n-1."""

    n: int
    residues: tuple[tuple[int, ...], ...]

    @property
    def bit_cost(self) -> float:
        return (self.n - 1) ** 2 * math.log2(self.n**2)

    def flat(self) -> list[int]:
        return [r for row in self.residues for r in row]


def counts(vector, n: int) -> CountVector:
    arr = np.asarray(vector, dtype=np.int64).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError(f"entries must lie in [0, {n})")
    beta = np.bincount(arr, minlength=n)
    return CountVector(tuple(int(b) for b in beta), int(arr.size))


def transmit(instance: PromiseInstance) -> ClassicalTranscript:
    n = instance.n
    nn = n * n
    rows = []
    for p in range(2, n + 1):
        beta = counts(instance.players[p - 1], n).beta
        rows.append(tuple(beta[k] % nn for k in range(1, n)))
    return ClassicalTranscript(n, tuple(rows))


def alice_zero_counts(transcript: ClassicalTranscript, m: int) -> list[int]:
    """beta_0^p mod n^2 for p = 2..n, rebuilt from m and the received residues."""
    nn = transcript.n**2
    return [(m - sum(row)) % nn for row in transcript.residues]


def combine(n: int, m: int, alice_beta: CountVector, transcript: ClassicalTranscript) -> int:
    """Alice's W in [0, n^2)."""
    nn = n * n
    nonzero = [alice_beta.beta[1:]] + [row for row in transcript.residues]
    zeros = [alice_beta.beta[0]] + alice_zero_counts(transcript, m)
    weighted = sum(k * row[k - 1] for row in nonzero for k in range(1, n))
    return (weighted + (nn - n) // 2 * (n - 1) * sum(zeros)) % nn


def alice_decode(alice_vector, m: int, transcript: ClassicalTranscript) -> tuple[FieldElem, int]:
    """Alice's output and the intermediate W."""
    n = transcript.n
    w = combine(n, m, counts(alice_vector, n), transcript)
    if w % n:
        raise ProtocolArithmeticError(f"W = {w} is not divisible by n = {n}")
    return FieldElem((w // n) % n, n), w


def run_classical_protocol(instance: PromiseInstance) -> tuple[ClassicalTranscript, FieldElem]:
    transcript = transmit(instance)
    recovered, _ = alice_decode(instance.players[0], instance.m, transcript)
    return transcript, recovered


def beta_from_partition(partition: dict[tuple[int, int], int], player: int, k: int, n: int) -> int:
    """Frequency of symbol ``k`` in player ``player``'s vector, from the column partition counts."""
    check_modulus(n)
    return sum(partition.get(((k + i * (player - 1)) % n, (-i) % n), 0) for i in range(n))


def classical_report(instance: PromiseInstance) -> dict:
    transcript = transmit(instance)
    recovered, w = alice_decode(instance.players[0], instance.m, transcript)
    oracle = gip_eval(instance).value
    return {
        "protocol": "classical",
        "n": instance.n,
        "m": instance.m,
        "residues": [list(r) for r in transcript.residues],
        "W": w,
        "recovered": recovered.value,
        "oracle": oracle,
        "match": recovered.value == oracle,
        "bit_cost": transcript.bit_cost,
    }
