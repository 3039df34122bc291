"""Dense univariate polynomials over F_p and over Z, and the polynomials
Q_p(a) and (a+1)_{p-1}^4 * sum_k prod_i (a+s_i)_k / (a+1)_k^4 built from them.

The mod-p builders never touch big integers: each summand is obtained from
the previous one by multiplying by four linear factors and dividing exactly
by (a+k)^4, all as numpy vector operations, for O(p^2) work per prime.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from nonord.errors import BadPrime, CapExceeded
from nonord.hypersums import HyperParams, check_prime
from nonord.modring import rational_residue
from nonord.qseries import CoeffTable
from nonord.report import Report, stopwatch

#: largest p accepted by the exact integer construction
INTEGER_CAP = 50
#: keeps every cumulative sum in :func:`_div_linear` inside int64
MAX_P = 1 << 20


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if len(nz) else c[:0]


class PolyModP:
    """Polynomial over F_p with coefficients c_0..c_deg stored low degree first.

    The zero polynomial has no stored coefficients and degree -1.
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Iterable[int] | np.ndarray = ()):
        self.p = p
        c = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
        if c.dtype == object or c.dtype.kind not in "iu":
            c = np.array([int(x) % p for x in c], dtype=np.int64)
        self.coeffs = _trim(np.mod(c.astype(np.int64), p))
        self.coeffs.flags.writeable = False

    @classmethod
    def _raw(cls, p: int, c: np.ndarray) -> "PolyModP":
        obj = cls.__new__(cls)
        obj.p = p
        obj.coeffs = _trim(c)
        obj.coeffs.flags.writeable = False
        return obj

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __getitem__(self, i: int) -> int:
        return int(self.coeffs[i]) if 0 <= i < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def tolist(self) -> list[int]:
        return [int(x) for x in self.coeffs]

    def _check(self, other: "PolyModP") -> None:
        if other.p != self.p:
            raise ValueError(f"F_{self.p} vs F_{other.p}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyModP):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.coeffs, other.coeffs)

    def __add__(self, other: "PolyModP") -> "PolyModP":
        self._check(other)
        n = max(len(self), len(other))
        out = np.zeros(n, dtype=np.int64)
        out[: len(self)] += self.coeffs
        out[: len(other)] += other.coeffs
        return PolyModP._raw(self.p, out % self.p)

    def __neg__(self) -> "PolyModP":
        return PolyModP._raw(self.p, (-self.coeffs) % self.p)

    def __sub__(self, other: "PolyModP") -> "PolyModP":
        return self + (-other)

    def scale(self, c: int) -> "PolyModP":
        return PolyModP._raw(self.p, self.coeffs * (c % self.p) % self.p)

    def __mul__(self, other: "PolyModP | int") -> "PolyModP":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return PolyModP(self.p)
        p = self.p
        if p * p * min(len(self), len(other)) < 1 << 62:
            prod = np.convolve(self.coeffs, other.coeffs) % p
        else:
            prod = np.convolve(self.coeffs.astype(object), other.coeffs.astype(object)) % p
        return PolyModP._raw(p, prod.astype(np.int64))

    __rmul__ = __mul__

    def mul_linear(self, u: int) -> "PolyModP":
        """Multiply by (a + u)."""
        return PolyModP._raw(self.p, _mul_linear(self.coeffs, u % self.p, self.p))

    def div_linear(self, u: int) -> "PolyModP":
        """Exact quotient by (a + u); AssertionError if the remainder is nonzero."""
        return PolyModP._raw(self.p, _div_linear(self.coeffs, u % self.p, self.p))

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + int(c)) % self.p
        return acc

    def __repr__(self) -> str:
        return f"PolyModP(p={self.p}, {self.tolist()})"


def _mul_linear(c: np.ndarray, u: int, p: int) -> np.ndarray:
    out = np.zeros(len(c) + 1, dtype=np.int64)
    out[1:] = c
    out[:-1] += u * c
    return out % p


def _powers(x: int, n: int, p: int) -> np.ndarray:
    """[1, x, x^2, ..., x^{n-1}] mod p by doubling."""
    out = np.ones(max(n, 1), dtype=np.int64)
    m = 1
    xm = x % p
    while m < n:
        k = min(m, n - m)
        out[m : m + k] = out[:k] * xm % p
        m += k
        xm = pow(x, m, p)
    return out[:n]


def _div_linear(t: np.ndarray, u: int, p: int) -> np.ndarray:
    if len(t) == 0:
        return t
    if u == 0:
        assert t[0] == 0, "nonzero remainder dividing by a"
        return t[1:].copy()
    # t = (a + u) q  =>  q_i = u^{-1} (-u^{-1})^i sum_{j<=i} (-u)^j t_j
    n = len(t)
    v = pow(u, -1, p)
    acc = np.cumsum(t * _powers(p - u, n, p) % p) % p
    q = acc * _powers(p - v, n, p) % p * v % p
    assert q[-1] == 0, f"nonzero remainder dividing by (a + {u}) mod {p}"
    return q[:-1]


def _pochhammer_power(p: int, start: int, length: int, power: int) -> np.ndarray:
    """((a + start)_length)^power as a coefficient array mod p."""
    c = np.ones(1, dtype=np.int64)
    for j in range(length):
        for _ in range(power):
            c = _mul_linear(c, (start + j) % p, p)
    return c


def _hyper_poly(p: int, sigmas: Sequence[int]) -> np.ndarray:
    """sum_k prod_i (a+sigma_i)_k * ((a+k+1)_{p-1-k})^4 over F_p."""
    if p > MAX_P:
        raise BadPrime(f"p={p} above the supported range {MAX_P}")
    t = _pochhammer_power(p, 1, p - 1, 4)
    total = t.copy()
    for k in range(1, p):
        for s in sigmas:
            t = _mul_linear(t, (s + k - 1) % p, p)
        for _ in range(4):
            t = _div_linear(t, k, p)
        total = (total + t) % p
    return total


def build_family_mod_p(p: int, params: HyperParams) -> PolyModP:
    """(a+1)_{p-1}^4 sum_{k<p} prod_i (a+s_i)_k / (a+1)_k^4 reduced mod p."""
    check_prime(p, params)
    sig = [rational_residue(s, p).value for s in params.quadruple]
    return PolyModP._raw(p, _hyper_poly(p, sig))


def build_qp_mod_p(p: int) -> PolyModP:
    """Q_p(a) = 2^{4(p-1)} (a+1)_{p-1}^4 sum_{k<p} (a+1/2)_k^4 / (a+1)_k^4 mod p."""
    check_prime(p)
    c = rational_residue(Fraction(1, 2), p).value
    poly = _hyper_poly(p, [c] * 4)
    return PolyModP._raw(p, poly * pow(2, 4 * (p - 1), p) % p)


def all_coeffs_divisible(poly: PolyModP) -> bool:
    return poly.is_zero()


def degree_drop_violations(poly: PolyModP) -> list[int]:
    """Degrees above 2(p-1) carrying a nonzero coefficient."""
    cut = 2 * (poly.p - 1)
    return [int(i) for i in np.flatnonzero(poly.coeffs) if i > cut]


def companion_rhs(p: int, bp: int) -> PolyModP:
    """b(p) * prod_{j=1}^{(p-1)/2} (j - a)^4 over F_p."""
    c = _pochhammer_power(p, p - (p - 1) // 2, (p - 1) // 2, 4)
    # (j - a)^4 = (a - j)^4; the product over j = 1..(p-1)/2 is (a - (p-1)/2)_{(p-1)/2}^4
    return PolyModP._raw(p, c * (bp % p) % p)


def first_mismatch(x: PolyModP, y: PolyModP) -> int | None:
    n = max(len(x), len(y))
    for i in range(n):
        if x[i] != y[i]:
            return i
    return None


def companion_check(p: int, tab: CoeffTable, qp: PolyModP | None = None) -> Report:
    check_prime(p)
    tab.require(p)
    with stopwatch() as sw:
        lhs = build_qp_mod_p(p) if qp is None else qp
        bp = tab.b(p)
        rhs = companion_rhs(p, bp)
        miss = first_mismatch(lhs, rhs)
        drop = degree_drop_violations(lhs)
    witness: dict = {"b_p_mod_p": bp % p, "lhs_degree": lhs.degree, "degree_drop_violations": drop[:10]}
    if miss is not None:
        witness.update(first_mismatch_degree=miss, lhs_coeff=lhs[miss], rhs_coeff=rhs[miss])
    return Report("companion", {"p": p}, miss is None and not drop, witness, sw["ms"])


def theorem1_equivalence(p: int, tab: CoeffTable, qp: PolyModP | None = None) -> Report:
    """p | b(p) (from the table) iff Q_p vanishes mod p (from the polynomial engine)."""
    check_prime(p)
    tab.require(p)
    with stopwatch() as sw:
        bp = tab.b(p)
        table_side = bp % p == 0
        poly = build_qp_mod_p(p) if qp is None else qp
        poly_side = all_coeffs_divisible(poly)
    return Report(
        "theorem1",
        {"p": p},
        table_side == poly_side,
        {"p_divides_b_p": table_side, "qp_zero_mod_p": poly_side, "b_p_mod_p": bp % p},
        sw["ms"],
    )


def family_check(p: int, params: HyperParams, tab: CoeffTable | None = None) -> Report:
    """Family polynomial mod p; with a table, zero-ness must match p | b(p)."""
    check_prime(p, params)
    with stopwatch() as sw:
        poly = build_family_mod_p(p, params)
        zero = poly.is_zero()
        witness: dict = {"zero_mod_p": zero, "degree": poly.degree, "constant_term": poly[0]}
        ok = True
        if tab is not None:
            tab.require(p)
            bp = tab.b(p)
            witness["b_p_mod_p"] = bp % p
            witness["constant_matches_b_p"] = poly[0] == bp % p
            ok = (zero == (bp % p == 0)) and witness["constant_matches_b_p"]
    return Report("family", {"p": p, "s1": str(params.s1), "s2": str(params.s2)}, ok, witness, sw["ms"])


def dump_csv(poly: PolyModP | "BigPoly", path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["degree", "coefficient"])
        for i, c in enumerate(poly.tolist()):
            w.writerow([i, c])


# --- exact integer / rational polynomials ------------------------------------


class BigPoly:
    """Polynomial with exact coefficients (int or Fraction), low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = c

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def tolist(self) -> list:
        return list(self.coeffs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BigPoly) and self.coeffs == other.coeffs

    def __add__(self, other: "BigPoly") -> "BigPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return BigPoly(self[i] + other[i] for i in range(n))

    def __mul__(self, other: "BigPoly | int | Fraction") -> "BigPoly":
        if not isinstance(other, BigPoly):
            return BigPoly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return BigPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return BigPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BigPoly":
        out = BigPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def mul_linear(self, lead, const) -> "BigPoly":
        """Multiply by (lead * a + const)."""
        c = self.coeffs
        out = [0] * (len(c) + 1)
        for i, x in enumerate(c):
            out[i] += const * x
            out[i + 1] += lead * x
        return BigPoly(out)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def reduce_mod(self, p: int) -> PolyModP:
        """Reduce a p-integral polynomial into F_p[a]."""
        out = []
        for c in self.coeffs:
            c = Fraction(c)
            if c.denominator % p == 0:
                raise ValueError(f"coefficient {c} is not p-integral")
            out.append(c.numerator * pow(c.denominator, -1, p) % p)
        return PolyModP(p, out)


def build_qp_integer(p: int, cap: int = INTEGER_CAP) -> BigPoly:
    """Exact Q_p(a) in Z[a] via sum_k 2^{4(p-1-k)} U_k with all halves cleared.

    U_k = ((2a+1)(2a+3)...(2a+2k-1))^4 * ((a+k+1)_{p-1-k})^4.
    """
    check_prime(p)
    if p > cap:
        raise CapExceeded(f"exact Q_p limited to p <= {cap}")
    # prefix[k] = prod_{j=1}^{k} (2a + 2j - 1); suffix[k] = prod_{j=k+1}^{p-1} (a + j)
    prefix = [BigPoly([1])]
    for j in range(1, p):
        prefix.append(prefix[-1].mul_linear(2, 2 * j - 1))
    suffix = [BigPoly([1])] * p
    for k in range(p - 2, -1, -1):
        suffix[k] = suffix[k + 1].mul_linear(1, k + 1)
    total = BigPoly()
    for k in range(p):
        total = total + (prefix[k] * suffix[k]) ** 4 * 2 ** (4 * (p - 1 - k))
    return total


def family_rational(p: int, params: HyperParams, scale: int | Fraction = 1) -> BigPoly:
    """scale * (a+1)_{p-1}^4 sum_k prod_i (a+s_i)_k / (a+1)_k^4 with exact
    rational coefficients, written as sum_k prod_i (a+s_i)_k * ((a+k+1)_{p-1-k})^4."""
    total = BigPoly()
    num = BigPoly([Fraction(1)])
    for k in range(p):
        if k:
            for s in params.quadruple:
                num = num.mul_linear(1, s + k - 1)
        tail = BigPoly([1])
        for j in range(k + 1, p):
            tail = tail.mul_linear(1, j)
        total = total + num * tail**4
    return total * scale


def p_adic_valuations(poly: BigPoly, p: int) -> list[int | None]:
    """v_p of each coefficient (None for zero coefficients)."""
    out: list[int | None] = []
    for c in poly.coeffs:
        c = Fraction(c)
        if c == 0:
            out.append(None)
            continue
        v = 0
        n, d = c.numerator, c.denominator
        while n % p == 0:
            n //= p
            v += 1
        while d % p == 0:
            d //= p
            v -= 1
        out.append(v)
    return out

