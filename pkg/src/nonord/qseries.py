"""Integer q-expansions of eta quotients.

An eta quotient prod_d eta(d*tau)^r_d is expanded as q^h times a product of
Euler products prod_m (1 - q^{dm}).  Each factor (q^d; q^d)^r is split into
r // 3 copies of Jacobi's cube series and r % 3 copies of the pentagonal
series, both sparse, so the dense accumulator only ever meets sparse
multiplicands and the whole expansion costs O(N^1.5).
"""

from __future__ import annotations

import csv
import math
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from nonord.errors import (
    ChecksumMismatch,
    FormatMismatch,
    InvalidDescriptor,
    LimitTooLarge,
    Overflow,
    TableTooShort,
)
from nonord.modring import primes_up_to
from nonord.report import Report, stopwatch

#: largest table length accepted; 8 bytes per coefficient
MAX_LIMIT = 50_000_000

INT64_MAX = np.iinfo(np.int64).max

SparseSeries = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class EtaQuotient:
    """Product of eta(d*tau)^r over ``factors`` = ((d, r), ...)."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        facs = tuple((int(d), int(r)) for d, r in self.factors)
        if not facs:
            raise InvalidDescriptor("empty eta quotient")
        for d, r in facs:
            if d < 1:
                raise InvalidDescriptor(f"scale {d} must be positive")
            if r < 1:
                raise InvalidDescriptor(f"exponent {r} must be positive")
        if len({d for d, _ in facs}) != len(facs):
            raise InvalidDescriptor("repeated scale in descriptor")
        shift = sum(d * r for d, r in facs)
        if shift % 24:
            raise InvalidDescriptor(f"q-shift {shift}/24 is not an integer")
        object.__setattr__(self, "factors", tuple(sorted(facs)))

    @property
    def weight(self) -> float:
        w = sum(r for _, r in self.factors)
        return w // 2 if w % 2 == 0 else w / 2

    @property
    def shift(self) -> int:
        return sum(d * r for d, r in self.factors) // 24

    @property
    def level(self) -> int:
        """Smallest N with every d | N and N * sum(r/d) = 0 mod 24."""
        base = math.lcm(*(d for d, _ in self.factors))
        n = base
        while True:
            if sum(n // d * r for d, r in self.factors) % 24 == 0:
                return n
            n += base

    @property
    def name(self) -> str:
        return ";".join(f"({d},{r})" for d, r in self.factors)

    @classmethod
    def parse(cls, text: str) -> "EtaQuotient":
        """Parse ``"(2,4);(4,4)"`` or one of the short names in :data:`FORMS`."""
        if text in FORMS:
            return FORMS[text]
        facs = []
        try:
            for part in text.split(";"):
                part = part.strip()
                if not (part.startswith("(") and part.endswith(")")):
                    raise ValueError
                d, r = part[1:-1].split(",")
                facs.append((int(d), int(r)))
        except ValueError:
            raise InvalidDescriptor(f"cannot parse eta quotient {text!r}") from None
        return cls(tuple(facs))


LEVEL8 = EtaQuotient(((2, 4), (4, 4)))
CM9 = EtaQuotient(((3, 8),))
FORMS = {"8-4": LEVEL8, "9-4-cm": CM9}


def _check_limit(n: int) -> None:
    if n < 1:
        raise ValueError(f"limit must be >= 1, got {n}")
    if n > MAX_LIMIT:
        raise LimitTooLarge(f"limit {n} exceeds budget {MAX_LIMIT}")


def euler_series(n: int) -> SparseSeries:
    """prod_{m>=1} (1 - q^m) below q^n via the pentagonal number theorem."""
    _check_limit(n)
    terms = {0: 1}
    k = 1
    while True:
        e1 = k * (3 * k - 1) // 2
        if e1 >= n:
            break
        sign = -1 if k % 2 else 1
        terms[e1] = sign
        e2 = k * (3 * k + 1) // 2
        if e2 < n:
            terms[e2] = sign
        k += 1
    return tuple(sorted(terms.items()))


def eta_cube_series(n: int) -> SparseSeries:
    """prod_{m>=1} (1 - q^m)^3 below q^n via Jacobi's identity."""
    _check_limit(n)
    out = []
    k = 0
    while (e := k * (k + 1) // 2) < n:
        out.append((e, (-1) ** k * (2 * k + 1)))
        k += 1
    return tuple(out)


def series_to_dense(s: SparseSeries, n: int) -> list[int]:
    out = [0] * n
    for e, c in s:
        if e < n:
            out[e] = c
    return out


def _scaled(s: SparseSeries, d: int, n: int) -> SparseSeries:
    return tuple((e * d, c) for e, c in s if e * d < n)


def _mul_sparse(acc: np.ndarray, s: SparseSeries) -> np.ndarray:
    n = len(acc)
    if acc.dtype != object:
        nz = np.abs(acc).max(initial=0)
        # exact fallback when int64 could overflow in this step
        if int(nz) * sum(abs(c) for _, c in s) > INT64_MAX:
            acc = acc.astype(object)
    out = np.zeros(n, dtype=acc.dtype)
    for e, c in s:
        if c == 1:
            out[e:] += acc[: n - e]
        elif c == -1:
            out[e:] -= acc[: n - e]
        else:
            out[e:] += c * acc[: n - e]
    return out


def _factor_plan(desc: EtaQuotient, n: int) -> list[SparseSeries]:
    euler = cube = None
    plan = []
    for d, r in desc.factors:
        m = (n - 1) // d + 1
        if r // 3:
            cube = eta_cube_series(m)
            plan += [_scaled(cube, d, n)] * (r // 3)
        if r % 3:
            euler = euler_series(m)
            plan += [_scaled(euler, d, n)] * (r % 3)
    # longest (densest) factors go last so early products stay sparse
    plan.sort(key=len)
    return plan


@dataclass(frozen=True, eq=False)
class CoeffTable:
    """Fourier coefficients b(1..N) of an eta quotient.

    ``values[n - 1]`` is b(n).  The array is read-only.
    """

    descriptor: EtaQuotient
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.int64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def b(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise TableTooShort(f"b({n}) requested from a table of length {self.N}")
        return int(self.values[n - 1])

    __getitem__ = b

    def require(self, n: int) -> None:
        if n > self.N:
            raise TableTooShort(f"need b(n) up to {n}, table stops at {self.N}")

    def truncated(self, n: int) -> "CoeffTable":
        self.require(n)
        return CoeffTable(self.descriptor, self.values[:n])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return self.descriptor == other.descriptor and np.array_equal(self.values, other.values)


def expand_eta_quotient(desc: EtaQuotient, n: int) -> CoeffTable:
    """Exact b(1..n) for q^h * prod_d (q^d; q^d)_inf^r."""
    h = desc.shift
    _check_limit(n)
    if n < h:
        raise ValueError(f"limit {n} is below the q-shift {h}")
    length = n - h + 1
    acc = np.zeros(length, dtype=np.int64)
    acc[0] = 1
    for s in _factor_plan(desc, length):
        acc = _mul_sparse(acc, s)
    if acc.dtype == object:
        big = [i for i, c in enumerate(acc) if abs(c) > INT64_MAX]
        if big:
            raise Overflow(f"b({big[0] + h}) does not fit in 64 bits")
        acc = acc.astype(np.int64)
    values = np.zeros(n, dtype=np.int64)
    values[h - 1 :] = acc[: n - h + 1]
    return CoeffTable(desc, values)


def naive_expand(desc: EtaQuotient, n: int) -> list[int]:
    """Reference b(1..n) by multiplying every (1 - q^{dm}) factor in turn."""
    h = desc.shift
    c = [0] * (n + 1)
    c[0] = 1
    for d, r in desc.factors:
        for m in range(1, n // d + 1):
            s = d * m
            for _ in range(r):
                for i in range(n, s - 1, -1):
                    c[i] -= c[i - s]
    return [c[k - h] if k >= h else 0 for k in range(1, n + 1)]


def divisor_counts(n: int) -> np.ndarray:
    """d(k) for k = 0..n (d(0) unused)."""
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        d[k::k] += 1
    return d


def deligne_violations(tab: CoeffTable) -> list[int]:
    """Indices n with |b(n)| > d(n) n^{(k-1)/2}."""
    n = np.arange(1, tab.N + 1, dtype=np.float64)
    bound = divisor_counts(tab.N)[1:] * n ** ((tab.descriptor.weight - 1) / 2)
    # small relative slack: the bound is attained by b(p^2)-type terms only in the limit
    bad = np.abs(tab.values.astype(np.float64)) > bound * (1 + 1e-12)
    return [int(i) + 1 for i in np.flatnonzero(bad)]


def hecke_check(tab: CoeffTable, bound: int | None = None) -> Report:
    """Multiplicativity and the prime-square recursion as a correctness oracle.

    Checks b(mn) = b(m) b(n) for coprime m, n with mn <= bound and
    b(p^2) = b(p)^2 - p^{k-1} for primes p not dividing the level.
    """
    bound = tab.N if bound is None else bound
    tab.require(bound)
    k = tab.descriptor.weight
    level = tab.descriptor.level
    with stopwatch() as sw:
        b = tab.values
        violations: list[dict] = []
        pairs = 0
        if b[0] != 1:
            violations.append({"kind": "normalisation", "n": 1, "b": int(b[0])})
        for m in range(2, bound // 2 + 1):
            bm = int(b[m - 1])
            for nn in range(m + 1, bound // m + 1):
                if math.gcd(m, nn) != 1:
                    continue
                pairs += 1
                lhs = int(b[m * nn - 1])
                if lhs != bm * int(b[nn - 1]):
                    violations.append({"kind": "multiplicative", "m": m, "n": nn, "b(mn)": lhs})
        squares = 0
        for p in primes_up_to(math.isqrt(bound)):
            if level % p == 0:
                continue
            squares += 1
            bp = int(b[p - 1])
            lhs = int(b[p * p - 1])
            if lhs != bp * bp - p ** int(k - 1):
                violations.append({"kind": "prime-square", "p": p, "b(p^2)": lhs})
    return Report(
        "hecke",
        {"form": tab.descriptor.name, "bound": bound},
        not violations,
        {
            "coprime_pairs": pairs,
            "prime_squares": squares,
            "violations": len(violations),
            "first_violations": violations[:20],
        },
        sw["ms"],
    )


# --- persistence -----------------------------------------------------------

MAGIC = b"ETAC"
VERSION = 1


def table_bytes(tab: CoeffTable) -> bytes:
    head = [MAGIC, struct.pack("<II", VERSION, len(tab.descriptor.factors))]
    for d, r in tab.descriptor.factors:
        head.append(struct.pack("<II", d, r))
    head.append(struct.pack("<Q", tab.N))
    payload = b"".join(head) + tab.values.astype("<i8").tobytes()
    return payload + struct.pack("<I", zlib.crc32(payload))


def table_from_bytes(data: bytes) -> CoeffTable:
    if len(data) < 12 or data[:4] != MAGIC:
        raise FormatMismatch("bad magic")
    version, count = struct.unpack_from("<II", data, 4)
    if version != VERSION:
        raise FormatMismatch(f"unsupported version {version}")
    off = 12
    if len(data) < off + 8 * count + 8:
        raise FormatMismatch("truncated header")
    facs = []
    for _ in range(count):
        facs.append(struct.unpack_from("<II", data, off))
        off += 8
    (n,) = struct.unpack_from("<Q", data, off)
    off += 8
    end = off + 8 * n
    if len(data) != end + 4:
        raise FormatMismatch(f"length {len(data)} does not match N={n}")
    (crc,) = struct.unpack_from("<I", data, end)
    if zlib.crc32(data[:end]) != crc:
        raise ChecksumMismatch("CRC32 mismatch")
    try:
        desc = EtaQuotient(tuple(facs))
    except InvalidDescriptor as exc:
        raise FormatMismatch(f"stored descriptor invalid: {exc}") from None
    values = np.frombuffer(data, dtype="<i8", count=n, offset=off).astype(np.int64)
    return CoeffTable(desc, values)


def save_table(tab: CoeffTable, path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(table_bytes(tab))
    tmp.replace(path)


def load_table(path: str | Path) -> CoeffTable:
    return table_from_bytes(Path(path).read_bytes())


def export_csv(tab: CoeffTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "b"])
        for i, v in enumerate(tab.values, start=1):
            w.writerow([i, int(v)])


def _cache_stem(desc: EtaQuotient) -> str:
    return "eta_" + "_".join(f"{d}-{r}" for d, r in desc.factors)


def cached_table(desc: EtaQuotient, n: int, cache_dir: str | Path | None) -> CoeffTable:
    """Table of length ``n``, reusing (a prefix of) any cached longer table."""
    if cache_dir is None:
        return expand_eta_quotient(desc, n)
    cache = Path(cache_dir)
    stem = _cache_stem(desc)
    best = None
    for f in cache.glob(f"{stem}_N*.etac"):
        try:
            size = int(f.stem.rsplit("_N", 1)[1])
        except ValueError:
            continue
        if size >= n and (best is None or size < best[0]):
            best = (size, f)
    if best is not None:
        try:
            tab = load_table(best[1])
            if tab.descriptor == desc and tab.N >= n:
                return tab if tab.N == n else tab.truncated(n)
        except FormatMismatch:
            pass
    tab = expand_eta_quotient(desc, n)
    cache.mkdir(parents=True, exist_ok=True)
    save_table(tab, cache / f"{stem}_N{n}.etac")
    return tab


def odd_zeros(tab: CoeffTable, bound: int | None = None) -> list[int]:
    bound = tab.N if bound is None else bound
    v = tab.values[:bound]
    return [int(i) + 1 for i in np.flatnonzero(v == 0) if i % 2 == 0]


def support_violations(tab: CoeffTable) -> list[int]:
    """n where b(n) != 0 although the product forces b(n) = 0.

    q^h * F(q^g) with g = gcd of scales is supported on n = h mod g.
    """
    g = math.gcd(*(d for d, _ in tab.descriptor.factors))
    h = tab.descriptor.shift
    idx = np.arange(1, tab.N + 1)
    bad = (idx % g != h % g) & (tab.values != 0)
    return [int(i) for i in idx[bad]]

