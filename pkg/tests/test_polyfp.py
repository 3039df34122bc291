from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from nonord.errors import BadPrime, CapExceeded
from nonord.hypersums import CM_PARAMS, HALF
from nonord.modring import odd_primes_up_to
from nonord.polyfp import (
    BigPoly,
    PolyModP,
    all_coeffs_divisible,
    build_family_mod_p,
    build_qp_integer,
    build_qp_mod_p,
    companion_check,
    companion_rhs,
    degree_drop_violations,
    dump_csv,
    family_check,
    family_rational,
    p_adic_valuations,
    theorem1_equivalence,
)

a = sp.symbols("a")


def sympy_qp(p):
    """Q_p(a) straight from its definition with sympy rationals."""
    half = sp.Rational(1, 2)
    poch = lambda x, k: sp.prod([x + j for j in range(k)]) if k else sp.Integer(1)
    s = sum(poch(a + half, k) ** 4 / poch(a + 1, k) ** 4 for k in range(p))
    return sp.Poly(sp.cancel(2 ** (4 * (p - 1)) * poch(a + 1, p - 1) ** 4 * s), a)


def coeffs_mod(poly, p):
    return [int(c) % p for c in reversed(poly.all_coeffs())]


def test_q3_against_sympy():
    q3 = sympy_qp(3)
    assert q3.eval(0) == 4433
    assert coeffs_mod(q3, 3) == [2, 1, 0, 1, 2, 0, 0, 0, 0]
    assert build_qp_mod_p(3).tolist() == [2, 1, 0, 1, 2]
    assert build_qp_mod_p(3) == PolyModP(3, [2 * c for c in [1, -4, 6, -4, 1]])  # 2 (1 - a)^4


def test_q3_integer():
    q3 = build_qp_integer(3)
    assert q3[0] == 4433
    assert q3.degree == 8
    assert q3.coeffs[-1] == 768
    assert [int(c) for c in reversed(sympy_qp(3).all_coeffs())] == q3.tolist()


@pytest.mark.parametrize("p", [5, 7])
def test_integer_against_sympy(p):
    assert [int(c) for c in reversed(sympy_qp(p).all_coeffs())] == build_qp_integer(p).tolist()


@pytest.mark.parametrize("p", odd_primes_up_to(13))
def test_integer_reduces_to_native(p):
    big = build_qp_integer(p)
    assert big.degree == 4 * (p - 1)
    assert big.coeffs[-1] == p * 2 ** (4 * (p - 1))
    assert big.reduce_mod(p) == build_qp_mod_p(p)


def test_integer_cap():
    with pytest.raises(CapExceeded):
        build_qp_integer(53)
    assert build_qp_integer(53, cap=60).degree == 208


def test_q11_zero_q7_q13_not(level8):
    assert all_coeffs_divisible(build_qp_mod_p(11))
    q7 = build_qp_mod_p(7)
    assert not q7.is_zero() and q7[0] == 24 % 7 == 3
    assert not all_coeffs_divisible(build_qp_mod_p(13))
    assert level8.b(13) % 13 != 0
    assert all_coeffs_divisible(PolyModP(5))


def test_companion_p5_against_sympy(level8):
    expected = sp.Poly(3 * (1 - a) ** 4 * (2 - a) ** 4, a)
    assert build_qp_mod_p(5).tolist() == coeffs_mod(expected, 5)
    assert companion_rhs(5, level8.b(5)) == build_qp_mod_p(5)
    assert coeffs_mod(sympy_qp(5), 5)[:9] == build_qp_mod_p(5).tolist()


@pytest.mark.parametrize("p", [3, 5, 11])
def test_companion_examples(p, level8):
    rep = companion_check(p, level8)
    assert rep.passed, rep.witness


def test_companion_reports_mismatch(level8):
    wrong = PolyModP(7, [1])
    rep = companion_check(7, level8, wrong)
    assert not rep.passed
    assert rep.witness["first_mismatch_degree"] == 0


@pytest.mark.parametrize("p, table_side", [(11, True), (7, False), (13, False)])
def test_theorem1_examples(p, table_side, level8):
    rep = theorem1_equivalence(p, level8)
    assert rep.passed
    assert rep.witness["p_divides_b_p"] is table_side
    assert rep.witness["qp_zero_mod_p"] is table_side


def test_bad_prime():
    for p in (2, 4, 9):
        with pytest.raises(BadPrime):
            build_qp_mod_p(p)
    with pytest.raises(BadPrime):
        build_family_mod_p(3, CM_PARAMS)


def test_sweep_invariants(level8):
    for p in odd_primes_up_to(199):
        qp = build_qp_mod_p(p)
        assert degree_drop_violations(qp) == [], p
        assert qp[0] == level8.b(p) % p, p
        assert build_family_mod_p(p, HALF) == qp, p
        assert qp.degree <= 4 * (p - 1)


def test_family_cm(cm9):
    assert build_family_mod_p(5, CM_PARAMS).is_zero()
    f7 = build_family_mod_p(7, CM_PARAMS)
    assert not f7.is_zero() and f7[0] == 20 % 7 == 6
    for p in odd_primes_up_to(97):
        if p in (2, 3):
            continue
        f = build_family_mod_p(p, CM_PARAMS)
        assert f[0] == cm9.b(p) % p, p
        assert f.is_zero() == (cm9.b(p) % p == 0), p
        assert family_check(p, CM_PARAMS, cm9).passed


@pytest.mark.parametrize("p", [5, 7, 11])
def test_family_rational_oracle(p):
    scale = 4 ** (2 * (p - 1)) * 3 ** (2 * (p - 1))
    big = family_rational(p, CM_PARAMS, scale)
    assert all(Fraction(c).denominator == 1 for c in big.coeffs)
    assert big.reduce_mod(p) == build_family_mod_p(p, CM_PARAMS)
    if p % 3 == 2:
        assert all(v is None or v >= 1 for v in p_adic_valuations(big, p))


def test_family_rational_matches_qp():
    assert family_rational(7, HALF, 2**24).reduce_mod(7) == build_qp_mod_p(7)
    assert [int(c) for c in family_rational(3, HALF, 2**8).coeffs] == build_qp_integer(3).tolist()


polys = st.lists(st.integers(0, 10**6), min_size=0, max_size=30)


@settings(max_examples=60, deadline=None)
@given(polys, st.integers(0, 96), st.sampled_from([3, 7, 97, 3137, 65537]))
def test_linear_mul_div_round_trip(coeffs, u, p):
    f = PolyModP(p, coeffs)
    g = f.mul_linear(u)
    assert g.div_linear(u) == f
    assert g == f * PolyModP(p, [u, 1])
    assert g(p - u % p) == 0


def test_division_detects_remainder():
    with pytest.raises(AssertionError):
        PolyModP(7, [1, 1, 1]).div_linear(1)  # a^2 + a + 1 at a = -1 is 1


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys, st.sampled_from([5, 101, 3137]))
def test_ring_laws(x, y, z, p):
    f, g, h = PolyModP(p, x), PolyModP(p, y), PolyModP(p, z)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == PolyModP(p)
    ref = sp.Poly(list(reversed(x)) or [0], a, modulus=p) * sp.Poly(list(reversed(y)) or [0], a, modulus=p)
    expected = [int(c) % p for c in reversed(ref.all_coeffs())]
    while expected and expected[-1] == 0:
        expected.pop()
    assert (f * g).tolist() == expected


def test_bigpoly_ops():
    x = BigPoly([1, 1])
    assert (x**3).tolist() == [1, 3, 3, 1]
    assert (x**3)(2) == 27
    assert (x + BigPoly([-1, -1])).tolist() == []
    assert BigPoly([Fraction(1, 2), 3]).reduce_mod(5).tolist() == [3, 3]
    with pytest.raises(ValueError):
        BigPoly([Fraction(1, 5)]).reduce_mod(5)


def test_csv_dump(tmp_path):
    path = tmp_path / "q3.csv"
    dump_csv(build_qp_mod_p(3), path)
    assert path.read_text() == "degree,coefficient\n0,2\n1,1\n2,0\n3,1\n4,2\n"


def test_large_prime_product_path():
    p = 2**31 - 1
    f = PolyModP(p, np.arange(1, 40))
    g = f * f
    assert g[0] == 1 and g[1] == 4
