from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonord.errors import BadPrime, TableTooShort
from nonord.hypersums import (
    CM_PARAMS,
    HALF,
    HyperParams,
    exact_sum,
    nonordinary_search,
    truncated_sum,
    vanhamme_check,
    vanhamme_sweep,
)
from nonord.modring import odd_primes_up_to, rational_residue
from nonord.qseries import LEVEL8, expand_eta_quotient


def brute_sum(p, params):
    """Exact sum from rising factorials written out as products, no term recursion."""
    total = Fraction(0)
    for k in range(p):
        num = Fraction(1)
        for s in params.quadruple:
            for j in range(k):
                num *= s + j
        fact = 1
        for j in range(1, k + 1):
            fact *= j
        total += num / fact**4
    return total


def test_exact_sum_oracles_agree():
    assert exact_sum(3) == brute_sum(3, HALF) == Fraction(4433, 4096)
    for p in (5, 7, 11, 13):
        assert exact_sum(p, HALF) == brute_sum(p, HALF)
        assert exact_sum(p, CM_PARAMS) == brute_sum(p, CM_PARAMS)


def test_examples():
    assert truncated_sum(3, 1, HALF).value == 2
    assert truncated_sum(5, 1, HALF).value == 3
    assert truncated_sum(3, 3, HALF).value == 23
    assert rational_residue(Fraction(4433, 4096), 27).value == 23
    with pytest.raises(BadPrime):
        truncated_sum(3, 1, CM_PARAMS)


@pytest.mark.parametrize("p", [2, 9, 1, 15])
def test_bad_primes(p):
    with pytest.raises(BadPrime):
        truncated_sum(p, 1, HALF)


SMALL_CASES = [
    (p, params)
    for params in (HALF, CM_PARAMS, HyperParams(Fraction(1, 5), Fraction(1, 6)))
    for p in odd_primes_up_to(13)
    if params.denominator_product % p
]


@pytest.mark.parametrize("p, params", SMALL_CASES)
def test_residue_engine_against_exact_rationals(p, params):
    exact = brute_sum(p, params)
    for r in (1, 2, 3):
        assert truncated_sum(p, r, params) == rational_residue(exact, p**r)


@pytest.mark.parametrize("params", [HALF, CM_PARAMS])
def test_consistency_across_powers(params):
    for p in odd_primes_up_to(199):
        if params.denominator_product % p == 0:
            continue
        s3 = truncated_sum(p, 3, params).value
        assert s3 % p**2 == truncated_sum(p, 2, params).value
        assert s3 % p == truncated_sum(p, 1, params).value


fractions_01 = st.builds(Fraction, st.integers(1, 11), st.integers(2, 12)).filter(lambda x: 0 < x < 1)


@settings(max_examples=40, deadline=None)
@given(fractions_01, fractions_01, st.sampled_from([13, 17, 19, 23, 29, 31, 37, 41, 43, 47]))
def test_parameter_symmetry(s1, s2, p):
    base = truncated_sum(p, 3, HyperParams(s1, s2))
    assert truncated_sum(p, 3, HyperParams(s2, s1)) == base
    assert truncated_sum(p, 3, HyperParams(1 - s1, s2)) == base
    assert truncated_sum(p, 3, HyperParams(1 - s1, 1 - s2)) == base


def test_params_validation():
    with pytest.raises(ValueError):
        HyperParams(Fraction(0), Fraction(1, 2))
    with pytest.raises(ValueError):
        HyperParams(Fraction(3, 2), Fraction(1, 2))
    assert HALF.denominator_product == 16
    assert CM_PARAMS.denominator_product == 4 * 3 * 4 * 3


def test_mod_p_congruence_all_primes(level8):
    for p in odd_primes_up_to(499):
        assert truncated_sum(p, 1, HALF) == rational_residue(level8.b(p), p), p


def test_cm_sum_vanishes_for_p_2_mod_3():
    for p in odd_primes_up_to(499):
        if p % 3 == 2 and p >= 5:
            assert truncated_sum(p, 1, CM_PARAMS).value == 0, p


@pytest.mark.parametrize("p, expected", [(3, 23), (5, -2 % 125), (11, -44 % 1331)])
def test_vanhamme_examples(level8, p, expected):
    rep = vanhamme_check(p, level8)
    assert rep.passed
    assert rep.witness["sum_residue"] == expected
    assert rational_residue(brute_sum(p, HALF), p**3).value == expected


def test_vanhamme_sweep(level8):
    rep = vanhamme_sweep(499, level8)
    assert rep.passed and rep.witness["primes_checked"] == 94


def test_vanhamme_table_too_short():
    short = expand_eta_quotient(LEVEL8, 10)
    with pytest.raises(TableTooShort):
        vanhamme_check(11, short)


def test_search(level8, cm9):
    assert nonordinary_search(level8, 20000)[0] == [11, 3137]
    assert nonordinary_search(level8, 10)[0] == []
    found, info = nonordinary_search(cm9, 30)
    assert found == [5, 11, 17, 23, 29]
    assert info["level_primes_skipped"] == [3]
    _, info8 = nonordinary_search(level8, 20000)
    assert info8["p2_nonordinary"] is True
    assert info8["odd_zero_coefficients"] == []
    with pytest.raises(TableTooShort):
        nonordinary_search(level8, 20001)
