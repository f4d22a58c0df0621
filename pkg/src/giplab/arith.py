"""Exact arithmetic over F_n and exact phases that are n^2-th roots of unity."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


def is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def check_modulus(n: int) -> int:
    """Return ``n`` unchanged, raising ``ValueError`` unless it is an odd prime."""
    if not isinstance(n, int) or not is_odd_prime(n):
        raise ValueError(f"n must be an odd prime >= 3, got {n!r}")
    return n


@dataclass(frozen=True)
class FieldElem:
    value: int
    modulus: int

    def __post_init__(self):
        check_modulus(self.modulus)
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} is not a residue mod {self.modulus}")

    @classmethod
    def of(cls, value: int, modulus: int) -> FieldElem:
        return cls(value % modulus, modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.modulus != self.modulus:
                raise ValueError(f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((self.value + o) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((self.value - o) % self.modulus, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((o - self.value) % self.modulus, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElem((self.value * o) % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value % self.modulus, self.modulus)

    def __pow__(self, e: int):
        if e < 0:
            return inv(self) ** (-e)
        return FieldElem(pow(self.value, e, self.modulus), self.modulus)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.modulus})"


def inv(x: FieldElem) -> FieldElem:
    if x.value == 0:
        raise ZeroDivisionError("no inverse: zero has no multiplicative inverse")
    return FieldElem(pow(x.value, -1, x.modulus), x.modulus)


@dataclass(frozen=True)
class PhaseExp:
    """The unit complex number exp(2*pi*i * exponent / n^2), kept exactly.

    ``omega = exp(2*pi*i/n)`` corresponds to exponent ``n``.
    """

    exponent: int
    n: int

    def __post_init__(self):
        check_modulus(self.n)
        if not 0 <= self.exponent < self.n * self.n:
            object.__setattr__(self, "exponent", self.exponent % (self.n * self.n))

    @classmethod
    def unity(cls, n: int) -> PhaseExp:
        return cls(0, n)

    @classmethod
    def omega_power(cls, k: int, n: int) -> PhaseExp:
        """omega^k with omega the primitive n-th root of unity."""
        return cls(k * n, n)

    def __mul__(self, other: PhaseExp) -> PhaseExp:
        return phase_mul(self, other)

    def __pow__(self, e: int) -> PhaseExp:
        return PhaseExp(self.exponent * e, self.n)

    def conj(self) -> PhaseExp:
        return PhaseExp(-self.exponent, self.n)

    def to_complex(self) -> complex:
        return cmath.exp(2j * math.pi * self.exponent / (self.n * self.n))


def phase_mul(p: PhaseExp, q: PhaseExp) -> PhaseExp:
    if p.n != q.n:
        raise ValueError(f"phase modulus mismatch: {p.n}^2 vs {q.n}^2")
    return PhaseExp((p.exponent + q.exponent) % (p.n * p.n), p.n)
