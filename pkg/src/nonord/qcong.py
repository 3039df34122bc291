"""Exact arithmetic in Z[a][q] / Phi_n(q) and the cyclotomic q-congruence.

Elements are 2-D object arrays of Python ints, rows indexed by the q-degree
(always < phi(n)) and columns by the a-degree.  Since Phi_n divides q^n - 1,
q is a unit with q^{-1} = q^{n-1}; negative q-exponents are folded mod n
as soon as they appear.

The congruence is checked with every denominator cleared.  With

    Ft(a)  = sum_{k<n} (a q^{(n+1)/2}; q)_k^2 (a q^{(1-n)/2}; q)_k^2 (a q^{k+1}; q)_{n-1-k}^4 q^k
    D(a)   = prod_{j=1}^{(n-1)/2} (1 - a q^j)^2 * prod_{j=(n+1)/2}^{n-1} (a - q^j)^2
    C      = prod_{j=1}^{n-1} (q^j - 1)^2

the statement F_n(a) = a^{n-1} C / D(a) * F_n(1) becomes

    Ft(a) D(a) (q; q)_{n-1}^4  ==  a^{n-1} C (aq; q)_{n-1}^4 Ft(1).

Every factor moved across is a nonzero element of the integral domain
Q(zeta_n)[a] (1 - zeta^j != 0 for 0 < j < n), so the two forms are
equivalent.
"""

from __future__ import annotations

import csv
import math
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from nonord.errors import CapExceeded, InvalidN
from nonord.report import Report, stopwatch

#: default largest n for the exact q-congruence run
N_CAP = 15

Term = tuple[int, int, int]  # (coefficient, a-exponent, q-exponent)


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n(q), low degree first."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _exact_div(poly, cyclotomic_poly(d))
    return tuple(poly)


def _exact_div(num: Sequence[int], den: Sequence[int]) -> list[int]:
    num = list(num)
    dl = len(den) - 1
    lead = den[-1]
    out = [0] * (len(num) - dl)
    for i in range(len(out) - 1, -1, -1):
        c, r = divmod(num[i + dl], lead)
        assert r == 0
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    assert not any(num[:dl]), "cyclotomic division left a remainder"
    return out


def _check_n(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise InvalidN(f"n must be odd and >= 3, got {n}")


def euler_phi(n: int) -> int:
    return len(cyclotomic_poly(n)) - 1


class CycRingElem:
    """Element of Z[a][q] / Phi_n(q)."""

    __slots__ = ("n", "data")

    def __init__(self, n: int, data: np.ndarray | Sequence[Sequence[int]], reduce: bool = True):
        self.n = n
        arr = np.array(data, dtype=object)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.size == 0:
            arr = np.zeros((1, 1), dtype=object)
        self.data = _reduce(arr, n) if reduce else arr

    # construction helpers

    @classmethod
    def zero(cls, n: int) -> "CycRingElem":
        return cls(n, np.zeros((euler_phi(n), 1), dtype=object), reduce=False)

    @classmethod
    def one(cls, n: int) -> "CycRingElem":
        return cls.monomial(n, 1, 0, 0)

    @classmethod
    def monomial(cls, n: int, coeff: int, a_exp: int, q_exp: int) -> "CycRingElem":
        return cls.from_terms(n, [(coeff, a_exp, q_exp)])

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Term]) -> "CycRingElem":
        terms = list(terms)
        amax = max((e for _, e, _ in terms), default=0)
        arr = np.zeros((n, amax + 1), dtype=object)
        for c, e, m in terms:
            arr[m % n, e] += c
        return cls(n, arr)

    @classmethod
    def from_q_poly(cls, n: int, coeffs: Sequence[int]) -> "CycRingElem":
        return cls.from_terms(n, [(c, 0, i) for i, c in enumerate(coeffs) if c])

    # structure

    @property
    def a_degree(self) -> int:
        nz = [j for j in range(self.data.shape[1]) if any(self.data[:, j])]
        return nz[-1] if nz else -1

    def is_zero(self) -> bool:
        return not any(x != 0 for x in self.data.flat)

    def cells(self) -> list[tuple[int, int, int]]:
        """Nonzero (q-degree, a-degree, coefficient) triples."""
        out = []
        for (i, j), c in np.ndenumerate(self.data):
            if c:
                out.append((i, j, int(c)))
        return out

    def _same(self, other: "CycRingElem") -> None:
        if other.n != self.n:
            raise ValueError(f"Phi_{self.n} vs Phi_{other.n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CycRingElem):
            return NotImplemented
        return self.n == other.n and (self - other).is_zero()

    def __add__(self, other: "CycRingElem") -> "CycRingElem":
        self._same(other)
        x, y = _pad(self.data, other.data)
        return CycRingElem(self.n, x + y, reduce=False)

    def __neg__(self) -> "CycRingElem":
        return CycRingElem(self.n, -self.data, reduce=False)

    def __sub__(self, other: "CycRingElem") -> "CycRingElem":
        self._same(other)
        x, y = _pad(self.data, other.data)
        return CycRingElem(self.n, x - y, reduce=False)

    def __mul__(self, other: "CycRingElem | int") -> "CycRingElem":
        if isinstance(other, int):
            return CycRingElem(self.n, self.data * other, reduce=False)
        self._same(other)
        x, y = self.data, other.data
        out = np.zeros((x.shape[0] + y.shape[0] - 1, x.shape[1] + y.shape[1] - 1), dtype=object)
        for i in range(x.shape[0]):
            if not any(x[i]):
                continue
            for j in range(y.shape[0]):
                if any(y[j]):
                    out[i + j] += np.convolve(x[i], y[j])
        return CycRingElem(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "CycRingElem":
        out = CycRingElem.one(self.n)
        for _ in range(e):
            out = out * self
        return out

    def mul_terms(self, terms: Sequence[Term]) -> "CycRingElem":
        """Multiply by a sparse polynomial sum c * a^e * q^m (m may be negative)."""
        n = self.n
        rows, cols = self.data.shape
        amax = max(e for _, e, _ in terms)
        out = np.zeros((n, cols + amax), dtype=object)
        for c, e, m in terms:
            for i in range(rows):
                out[(i + m) % n, e : e + cols] += c * self.data[i]
        return CycRingElem(n, out)

    def at_a(self, value: int) -> "CycRingElem":
        """Substitute a = value, leaving an element of Z[q] / Phi_n."""
        powers = np.array([value**j for j in range(self.data.shape[1])], dtype=object)
        col = self.data.dot(powers).reshape(-1, 1)
        return CycRingElem(self.n, col, reduce=False)

    def __repr__(self) -> str:
        return f"CycRingElem(n={self.n}, cells={self.cells()})"


def _pad(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = max(x.shape[0], y.shape[0])
    c = max(x.shape[1], y.shape[1])

    def grow(z: np.ndarray) -> np.ndarray:
        if z.shape == (r, c):
            return z
        out = np.zeros((r, c), dtype=object)
        out[: z.shape[0], : z.shape[1]] = z
        return out

    return grow(x), grow(y)


def _reduce(arr: np.ndarray, n: int) -> np.ndarray:
    """Fold rows with q^n = 1, then divide by the monic Phi_n."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    cols = arr.shape[1]
    folded = np.zeros((max(n, deg), cols), dtype=object)
    for i in range(arr.shape[0]):
        folded[i % n] += arr[i]
    low = np.array(phi[:-1], dtype=object).reshape(-1, 1)
    for i in range(folded.shape[0] - 1, deg - 1, -1):
        c = folded[i]
        if any(c):
            folded[i - deg : i] -= low * c
            folded[i] = 0
    return _trim_cols(folded[:deg])


def _trim_cols(arr: np.ndarray) -> np.ndarray:
    c = arr.shape[1]
    while c > 1 and not any(arr[:, c - 1]):
        c -= 1
    return arr[:, :c]


def remainder_by_phi(arr: np.ndarray, n: int) -> np.ndarray:
    """Plain long division by Phi_n row by row; no q^n = 1 shortcut."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    out = np.zeros((max(arr.shape[0], deg), arr.shape[1]), dtype=object)
    out[: arr.shape[0]] = arr
    for i in range(out.shape[0] - 1, deg - 1, -1):
        c = out[i].copy()
        if any(c):
            for j, pj in enumerate(phi):
                out[i - deg + j] -= pj * c
    return _trim_cols(out[:deg])


def qpoch(n: int, alpha: int, a_exp: int, q_exp: int, k: int) -> CycRingElem:
    """(alpha a^{a_exp} q^{q_exp}; q)_k = prod_{j<k} (1 - alpha a^{a_exp} q^{q_exp + j})."""
    _check_n(n)
    out = CycRingElem.one(n)
    if alpha == 0:
        return out
    for j in range(k):
        out = out.mul_terms([(1, 0, 0), (-alpha, a_exp, q_exp + j)])
    return out


def _qpoch_into(x: CycRingElem, a_exp: int, q_exp: int, k: int, power: int = 1) -> CycRingElem:
    for j in range(k):
        for _ in range(power):
            x = x.mul_terms([(1, 0, 0), (-1, a_exp, q_exp + j)])
    return x


def cleared_f(n: int) -> CycRingElem:
    """F_n(a; q) * (aq; q)_{n-1}^4 as a polynomial in a."""
    _check_n(n)
    h = (n + 1) // 2
    total = CycRingElem.zero(n)
    for k in range(n):
        t = CycRingElem.monomial(n, 1, 0, k)
        t = _qpoch_into(t, 1, h, k, 2)
        t = _qpoch_into(t, 1, (1 - n) // 2, k, 2)
        t = _qpoch_into(t, 1, k + 1, n - 1 - k, 4)
        total = total + t
    return total


def build_sides_e05(n: int) -> tuple[CycRingElem, CycRingElem]:
    """Both sides of the cleared q-congruence for odd n >= 3."""
    _check_n(n)
    ft = cleared_f(n)
    lhs = ft
    for j in range(1, (n - 1) // 2 + 1):
        for _ in range(2):
            lhs = lhs.mul_terms([(1, 0, 0), (-1, 1, j)])
    for j in range((n + 1) // 2, n):
        for _ in range(2):
            lhs = lhs.mul_terms([(1, 1, 0), (-1, 0, j)])
    lhs = _qpoch_into(lhs, 0, 1, n - 1, 4)

    rhs = ft.at_a(1).mul_terms([(1, n - 1, 0)])
    for j in range(1, n):
        for _ in range(2):
            rhs = rhs.mul_terms([(1, 0, j), (-1, 0, 0)])
    rhs = _qpoch_into(rhs, 1, 1, n - 1, 4)
    return lhs, rhs


def verify_e05(n: int, cap: int = N_CAP) -> Report:
    _check_n(n)
    if n > cap:
        raise CapExceeded(f"n={n} above cap {cap}")
    with stopwatch() as sw:
        lhs, rhs = build_sides_e05(n)
        diff = lhs - rhs
        cells = diff.cells()
    witness: dict = {"a_degree_lhs": lhs.a_degree, "a_degree_rhs": rhs.a_degree, "nonzero_cells": len(cells)}
    if cells:
        q, a, c = cells[0]
        witness["first_nonzero"] = {"q_degree": q, "a_degree": a, "coefficient": str(c)}
    return Report("qcong", {"n": n, "prime": _is_prime_small(n)}, not cells, witness, sw["ms"])


def verify_prefactor(n: int) -> Report:
    """prod_{j<n} (a - q^j) = 1 + a + ... + a^{n-1}, and prod_{j<n} (1 - q^j) = n."""
    _check_n(n)
    with stopwatch() as sw:
        prod = CycRingElem.one(n)
        for j in range(1, n):
            prod = prod.mul_terms([(1, 1, 0), (-1, 0, j)])
        geometric = CycRingElem.from_terms(n, [(1, e, 0) for e in range(n)])
        poly_ok = prod == geometric
        at_one = prod.at_a(1)
        expected = math.prod(sum(cyclotomic_poly(d)) for d in range(2, n + 1) if n % d == 0)
        value_ok = at_one == CycRingElem.monomial(n, expected, 0, 0)
    witness = {"poly_identity": poly_ok, "value_at_1": at_one.cells(), "expected_value": expected}
    return Report("prefactor", {"n": n}, poly_ok and value_ok, witness, sw["ms"])


def dump_difference_csv(n: int, path: str | Path) -> None:
    lhs, rhs = build_sides_e05(n)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q_degree", "a_degree", "coefficient"])
        for q, a, c in (lhs - rhs).cells():
            w.writerow([q, a, c])


def _is_prime_small(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, math.isqrt(n) + 1))
