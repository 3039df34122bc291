"""Floating-point check of sum_k (1/2)_k^4 / k!^4 = 16 L(f, 2) / pi^2.

The left side is summed directly with a first-order tail correction.  The
right side comes from the completed L-function split at the Fricke fixed
point y0 = 1/sqrt(level): at the central point s = 2 of a weight-4 form
with root number +1,

    int_0^inf f(iy) y dy = 2 * int_{y0}^inf f(iy) y dy
                         = 2 * sum_n b(n) e^{-2 pi n y0} (1 + 2 pi n y0) / (2 pi n)^2,

and the left integral equals Gamma(2) L(f, 2) / (2 pi)^2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from nonord.qseries import CoeffTable
from nonord.report import Report, stopwatch

DEFAULT_TERMS = 10**6
DEFAULT_CUTOFF = 200
DEFAULT_TOL = 1e-5

_PI = np.longdouble(math.pi)


@dataclass
class NumericReport:
    lhs: float
    rhs: float
    rel_diff: float
    terms: int
    cutoff: int
    tail: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.rel_diff <= self.tol

    def to_report(self, runtime_ms: float = 0.0) -> Report:
        d = asdict(self)
        return Report(
            "lvalue",
            {"terms": self.terms, "cutoff": self.cutoff, "tol": self.tol},
            self.passed,
            {k: d[k] for k in ("lhs", "rhs", "rel_diff", "tail")},
            runtime_ms,
        )


def hyper_terms(n: int) -> np.ndarray:
    """t_k = (binom(2k, k) / 4^k)^4 for k < n, in extended precision."""
    k = np.arange(1, n, dtype=np.longdouble)
    ratio = ((2 * k - 1) / (2 * k)) ** 4
    return np.concatenate(([np.longdouble(1)], np.cumprod(ratio)))


def tail_correction(n: int) -> float:
    """sum_{k>=n} t_k to first order, using t_k ~ 1/(pi k)^2."""
    return float(1 / (_PI**2 * n))


def hyper_sum_numeric(n: int, tail: bool = True) -> float:
    if n < 1:
        raise ValueError("need at least one term")
    t = hyper_terms(n)
    s = np.sum(t[::-1])  # small terms first
    if tail:
        s += 1 / (_PI**2 * n)
    return float(s)


def l_value_numeric(tab: CoeffTable, cutoff: int = DEFAULT_CUTOFF) -> float:
    """L(f, 2) from the first ``cutoff`` coefficients of a weight-4 form."""
    tab.require(cutoff)
    level = tab.descriptor.level
    y0 = 1 / np.sqrt(np.longdouble(level))
    n = np.arange(1, cutoff + 1, dtype=np.longdouble)
    b = tab.values[:cutoff].astype(np.longdouble)
    x = 2 * _PI * n
    lam = 2 * np.sum(b * (1 + x * y0) * np.exp(-x * y0) / x**2)
    return float(4 * _PI**2 * lam)


def l_value_abel(tab: CoeffTable, x1: float = 1e3, x2: float = 1e4) -> float:
    """Coarse oracle: Abel-smoothed Dirichlet series at s = 2, Richardson-extrapolated.

    S(X) = sum b(n) n^{-2} e^{-n/X} = L(f, 2) - L(f, 1)/X + O(X^{-2}),
    so (X2 S(X2) - X1 S(X1)) / (X2 - X1) removes the 1/X term.  The table
    must reach ~40 * X2 for the exponential cutoff to be negligible.
    """
    tab.require(int(40 * x2))
    n = np.arange(1, tab.N + 1, dtype=np.float64)
    b = tab.values.astype(np.float64)

    def smoothed(x: float) -> float:
        return float(np.sum(b / n**2 * np.exp(-n / x)))

    s1, s2 = smoothed(x1), smoothed(x2)
    return (x2 * s2 - x1 * s1) / (x2 - x1)


def verify_e03(
    tab: CoeffTable,
    terms: int = DEFAULT_TERMS,
    cutoff: int = DEFAULT_CUTOFF,
    tol: float = DEFAULT_TOL,
) -> NumericReport:
    lhs = hyper_sum_numeric(terms)
    rhs = 16 * l_value_numeric(tab, cutoff) / math.pi**2
    return NumericReport(lhs, rhs, abs(lhs - rhs) / abs(rhs), terms, cutoff, tail_correction(terms), tol)


def lvalue_report(tab: CoeffTable, terms: int = DEFAULT_TERMS, cutoff: int = DEFAULT_CUTOFF,
                  tol: float = DEFAULT_TOL) -> Report:
    with stopwatch() as sw:
        nr = verify_e03(tab, terms, cutoff, tol)
    return nr.to_report(sw["ms"])
