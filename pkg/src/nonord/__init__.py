"""Exact and numerical checks around non-ordinary primes of two weight-4
eta-quotient newforms: coefficient tables, truncated hypergeometric
supercongruences, the polynomial divisibility criterion, the cyclotomic
q-congruence behind it, and the Archimedean L-value identity."""

from nonord.errors import (
    BadPrime,
    CapExceeded,
    ChecksumMismatch,
    FormatMismatch,
    InvalidDescriptor,
    InvalidN,
    LimitTooLarge,
    ModulusMismatch,
    NonInvertible,
    NonordError,
    Overflow,
    TableTooShort,
)
from nonord.report import Report

__version__ = "0.1.0"

__all__ = [
    "BadPrime",
    "CapExceeded",
    "ChecksumMismatch",
    "FormatMismatch",
    "InvalidDescriptor",
    "InvalidN",
    "LimitTooLarge",
    "ModulusMismatch",
    "NonInvertible",
    "NonordError",
    "Overflow",
    "Report",
    "TableTooShort",
]
