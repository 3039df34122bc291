"""Exact residue arithmetic modulo primes and prime powers.

Values are plain Python ints wrapped in an immutable :class:`Residue`;
mixing moduli is an error, never a silent coercion.  Rational parameters
such as 1/2 or 1/4 are :class:`fractions.Fraction` instances, which are
already kept in lowest terms with a positive denominator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from nonord.errors import ModulusMismatch, NonInvertible

MAX_MODULUS = 1 << 62

RationalParam = Fraction
IntLike = Union[int, "Residue"]


@dataclass(frozen=True, slots=True)
class Residue:
    value: int
    modulus: int

    def __post_init__(self) -> None:
        if not 2 <= self.modulus <= MAX_MODULUS:
            raise ValueError(f"modulus {self.modulus} outside [2, 2**62]")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def _other(self, other: IntLike) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"mod {self.modulus} vs mod {other.modulus}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: IntLike) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue((self.value + o) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue((self.value - o) % self.modulus, self.modulus)

    def __rsub__(self, other: IntLike) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue((o - self.value) % self.modulus, self.modulus)

    def __mul__(self, other: IntLike) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue(self.value * o % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> Residue:
        return Residue(-self.value % self.modulus, self.modulus)

    def __pow__(self, e: int) -> Residue:
        if e < 0:
            return self.inverse() ** (-e)
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def __truediv__(self, other: IntLike) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self * mod_inverse(o, self.modulus)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Residue):
            return self.value == other.value and self.modulus == other.modulus
        if isinstance(other, int):
            return (self.value - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.modulus))

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> Residue:
        return mod_inverse(self.value, self.modulus)

    def signed(self) -> int:
        """Representative in (-m/2, m/2]."""
        v = self.value
        return v - self.modulus if 2 * v > self.modulus else v

    def __repr__(self) -> str:
        return f"Residue({self.value} mod {self.modulus})"


def mod_inverse(x: int, m: int) -> Residue:
    """Inverse of ``x`` modulo ``m`` by the extended Euclidean algorithm.

    Works for any modulus, prime or not; raises :class:`NonInvertible`
    when ``gcd(x, m) > 1``.
    """
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    r0, r1 = m, x % m
    s0, s1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if r0 != 1:
        raise NonInvertible(f"{x} is not invertible modulo {m} (gcd {r0})")
    return Residue(s0 % m, m)


def rational_residue(r: Fraction | int, m: int) -> Residue:
    r = Fraction(r)
    return Residue(r.numerator % m, m) * mod_inverse(r.denominator, m)


def rising_factorial(x: Residue, k: int) -> Residue:
    """Pochhammer symbol (x)_k = x(x+1)...(x+k-1) in the residue ring."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    m = x.modulus
    acc = 1
    v = x.value
    for j in range(k):
        acc = acc * (v + j) % m
        if not acc:
            break
    return Residue(acc, m)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer) strictly: no whitespace, q != 0."""
    if not text or any(c.isspace() for c in text):
        raise ValueError(f"malformed rational {text!r}")
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if sep and (not den or den[0] in "+-"):
        raise ValueError(f"malformed rational {text!r}")
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(n, d)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def odd_primes_up_to(n: int) -> list[int]:
    return [p for p in primes_up_to(n) if p > 2]
