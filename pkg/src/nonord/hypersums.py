"""Truncated hypergeometric sums modulo p, p^2, p^3 and the checks built on them.

For parameters (s1, s2) the sum is

    sum_{k=0}^{p-1} (s1)_k (s2)_k (1-s1)_k (1-s2)_k / k!^4,

evaluated directly in Z/p^r.  Every k < p has k! prime to p, so the
denominators are units and the loop stops at k = p - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from nonord.errors import BadPrime
from nonord.modring import is_prime, mod_inverse, odd_primes_up_to, rational_residue, Residue
from nonord.qseries import CoeffTable, odd_zeros
from nonord.report import Report, stopwatch

MAX_POWER = 3


@dataclass(frozen=True)
class HyperParams:
    s1: Fraction
    s2: Fraction

    def __post_init__(self) -> None:
        s1, s2 = Fraction(self.s1), Fraction(self.s2)
        for s in (s1, s2):
            if not 0 < s < 1:
                raise ValueError(f"parameter {s} outside (0, 1)")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)

    @property
    def quadruple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.s1, self.s2, 1 - self.s1, 1 - self.s2)

    @property
    def denominator_product(self) -> int:
        out = 1
        for s in self.quadruple:
            out *= s.denominator
        return out

    def __str__(self) -> str:
        return f"({self.s1},{self.s2})"


HALF = HyperParams(Fraction(1, 2), Fraction(1, 2))
CM_PARAMS = HyperParams(Fraction(1, 4), Fraction(1, 3))


def check_prime(p: int, params: HyperParams | None = None) -> None:
    if p == 2 or not is_prime(p):
        raise BadPrime(f"p must be an odd prime, got {p}")
    if params is not None and params.denominator_product % p == 0:
        raise BadPrime(f"p={p} divides a denominator of {params}")


def truncated_sum(p: int, r: int, params: HyperParams = HALF) -> Residue:
    """The truncated sum reduced into Z/p^r."""
    check_prime(p, params)
    if not 1 <= r:
        raise ValueError("power must be positive")
    m = p**r
    sig = [rational_residue(s, m).value for s in params.quadruple]
    term = 1
    total = 1
    for k in range(1, p):
        num = 1
        for s in sig:
            num = num * (s + k - 1) % m
        if not num:
            # the term and every later one vanish identically mod p^r
            break
        ik = mod_inverse(k, m).value
        term = term * num % m * pow(ik, 4, m) % m
        total += term
    return Residue(total % m, m)


def exact_sum(p: int, params: HyperParams = HALF) -> Fraction:
    """The same truncated sum as an exact rational (oracle for small p)."""
    total = Fraction(0)
    term = Fraction(1)
    for k in range(p):
        if k:
            for s in params.quadruple:
                term *= s + k - 1
            term /= Fraction(k) ** 4
        total += term
    return total


def reduce_rational(x: Fraction, m: int) -> Residue:
    return rational_residue(x, m)


def vanhamme_check(p: int, tab: CoeffTable, power: int = MAX_POWER) -> Report:
    """sum_{k<p} (1/2)_k^4 / k!^4 = b(p) mod p^power (power 3 is the supercongruence)."""
    check_prime(p)
    tab.require(p)
    with stopwatch() as sw:
        s = truncated_sum(p, power, HALF)
        bp = tab.b(p)
        ok = s == Residue(bp, s.modulus)
    return Report(
        "vanhamme",
        {"p": p, "power": power},
        ok,
        {"sum_residue": s.value, "b_p": bp, "b_p_residue": bp % s.modulus, "modulus": s.modulus},
        sw["ms"],
    )


def vanhamme_sweep(pmax: int, tab: CoeffTable, power: int = MAX_POWER) -> Report:
    tab.require(pmax)
    with stopwatch() as sw:
        results = [vanhamme_check(p, tab, power) for p in odd_primes_up_to(pmax)]
        failures = [r.params["p"] for r in results if not r.passed]
    return Report(
        "vanhamme-sweep",
        {"pmax": pmax, "power": power},
        not failures,
        {"primes_checked": len(results), "failures": failures},
        sw["ms"],
    )


def nonordinary_search(tab: CoeffTable, bound: int) -> tuple[list[int], dict]:
    """Odd primes p <= bound with p | b(p), plus side information.

    Primes dividing the level are not candidates (b(p) there is not a
    Hecke eigenvalue of the usual kind); they and p = 2 are reported in the
    side dict together with every odd n <= bound with b(n) = 0.
    """
    tab.require(bound)
    level = tab.descriptor.level
    found = [p for p in odd_primes_up_to(bound) if level % p and tab.b(p) % p == 0]
    info = {
        "p2_nonordinary": bound >= 2 and tab.b(2) % 2 == 0,
        "level_primes_skipped": [p for p in odd_primes_up_to(bound) if level % p == 0],
        "odd_zero_coefficients": odd_zeros(tab, bound),
    }
    return found, info


def search_report(tab: CoeffTable, bound: int, expected: list[int] | None = None) -> Report:
    with stopwatch() as sw:
        found, info = nonordinary_search(tab, bound)
    ok = True if expected is None else found == expected
    witness = {"nonordinary": found, **info}
    if expected is not None:
        witness["expected"] = expected
    return Report("search", {"form": tab.descriptor.name, "bound": bound}, ok, witness, sw["ms"])
