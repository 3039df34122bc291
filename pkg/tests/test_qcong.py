import random

import numpy as np
import pytest
import sympy as sp

from nonord.errors import CapExceeded, InvalidN
from nonord.qcong import (
    CycRingElem,
    build_sides_e05,
    cleared_f,
    cyclotomic_poly,
    dump_difference_csv,
    euler_phi,
    qpoch,
    remainder_by_phi,
    verify_e05,
    verify_prefactor,
)

q = sp.symbols("q")


def test_cyclotomic_examples():
    assert cyclotomic_poly(3) == (1, 1, 1)
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(9) == (1, 0, 0, 1, 0, 0, 1)


@pytest.mark.parametrize("n", range(1, 31))
def test_cyclotomic_against_sympy(n):
    ref = sp.Poly(sp.cyclotomic_poly(n, q), q).all_coeffs()
    assert cyclotomic_poly(n) == tuple(int(c) for c in reversed(ref))
    assert euler_phi(n) == sp.totient(n)


def test_qpoch_examples():
    # q^{-1} = q^2 and q^2 = -1 - q mod Phi_3: 1 - a q^2 = 1 + a + a q
    assert qpoch(3, 1, 1, -1, 1) == CycRingElem.from_terms(3, [(1, 0, 0), (-1, 1, 2)])
    assert qpoch(3, 1, 1, -1, 1).cells() == [(0, 0, 1), (0, 1, 1), (1, 1, 1)]
    assert qpoch(7, 1, 1, 3, 0) == CycRingElem.one(7)
    assert qpoch(3, 1, 0, 1, 2) == CycRingElem.monomial(3, 3, 0, 0)
    assert qpoch(5, 0, 1, 1, 4) == CycRingElem.one(5)


def random_array(rng, rows, cols):
    return np.array([[rng.randint(-50, 50) for _ in range(cols)] for _ in range(rows)], dtype=object)


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11, 13, 15])
def test_reduction_matches_long_division(n):
    rng = random.Random(n)
    for _ in range(100):
        arr = random_array(rng, rng.randint(1, 3 * n), rng.randint(1, 4))
        fast = CycRingElem(n, arr).data
        slow = remainder_by_phi(arr, n)
        x, y = np.zeros((euler_phi(n), 4), dtype=object), np.zeros((euler_phi(n), 4), dtype=object)
        x[:, : fast.shape[1]] = fast
        y[:, : slow.shape[1]] = slow
        assert (x == y).all()


@pytest.mark.parametrize("n", [3, 7, 15])
def test_ring_laws(n):
    rng = random.Random(100 + n)
    for _ in range(20):
        x, y, z = (CycRingElem(n, random_array(rng, n, 3)) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x
        assert x - x == CycRingElem.zero(n)


def test_mul_terms_agrees_with_general_product():
    rng = random.Random(5)
    x = CycRingElem(7, random_array(rng, 7, 3))
    terms = [(2, 1, 3), (-5, 0, -2)]
    assert x.mul_terms(terms) == x * CycRingElem.from_terms(7, terms)


def _sympy_side_values(n, av):
    """Both sides of the uncleared congruence at a = av in Q[q]/Phi_n."""
    phi = sp.Poly(sp.cyclotomic_poly(n, q), q, domain="QQ")

    def red(expr):
        return sp.Poly(expr, q, domain="QQ").rem(phi)

    def inv(poly):
        return sp.Poly(sp.invert(poly.as_expr(), phi.as_expr(), q), q, domain="QQ")

    qinv = inv(sp.Poly(q, q, domain="QQ"))
    h = (n + 1) // 2

    def qpow(e):
        return red(q**e) if e >= 0 else red(qinv.as_expr() ** (-e))

    def poch(base, k):
        out = sp.Poly(1, q, domain="QQ")
        for j in range(k):
            out = red((out * (sp.Poly(1, q, domain="QQ") - base * qpow(j))).as_expr())
        return out

    def big_f(aval):
        total = sp.Poly(0, q, domain="QQ")
        for k in range(n):
            num = poch(aval * qpow(h), k) ** 2 * poch(aval * qpow(1 - h), k) ** 2 * qpow(k)
            den = poch(aval * qpow(1), k) ** 4
            total = red((total + red(num.as_expr()) * inv(den)).as_expr())
        return total

    c = sp.Integer(1)
    for j in range(1, n):
        c *= (q**j - 1) ** 2
    d = sp.Integer(1)
    for j in range(1, (n - 1) // 2 + 1):
        d *= (1 - av * q**j) ** 2
    for j in range((n + 1) // 2, n):
        d *= (av - q**j) ** 2
    rhs = red((red(av ** (n - 1) * c) * inv(red(d)) * big_f(sp.Integer(1))).as_expr())
    return big_f(av), rhs


@pytest.mark.parametrize("av", [sp.Rational(x) for x in
                                ["2", "3", "-2", "1/2", "-1/3", "5/7", "7", "-11/4", "13/5", "1/9",
                                 "4", "-5", "2/3", "-7/2", "17", "3/11", "-1/8", "9/4", "6", "-13/6"]])
def test_uncleared_congruence_n3_exact_rationals(av):
    lhs, rhs = _sympy_side_values(3, av)
    assert lhs == rhs


@pytest.mark.parametrize("av", [sp.Integer(2), sp.Rational(-3, 5)])
def test_uncleared_congruence_n5(av):
    lhs, rhs = _sympy_side_values(5, av)
    assert lhs == rhs


def test_uncleared_congruence_fails_when_perturbed():
    # the oracle is not vacuous: dropping the a^{n-1} factor breaks equality
    lhs, rhs = _sympy_side_values(3, sp.Integer(2))
    assert lhs != rhs * 2


@pytest.mark.parametrize("n", [3, 5, 7])
def test_cleared_f_at_zero(n):
    # every Pochhammer factor is 1 at a = 0, leaving 1 + q + ... + q^{n-1} = 0
    ft = cleared_f(n)
    assert ft.a_degree <= 4 * (n - 1)
    assert ft.at_a(0).is_zero()


def test_sides_structure():
    lhs, rhs = build_sides_e05(3)
    assert lhs.a_degree == rhs.a_degree
    assert lhs == rhs


@pytest.mark.parametrize("n", [3, 5, 7, 11, 13])
def test_verify_e05_primes(n):
    rep = verify_e05(n)
    assert rep.passed, rep.witness
    assert rep.params["prime"]


@pytest.mark.parametrize("n", [9, 15])
def test_verify_e05_composite_runs(n):
    rep = verify_e05(n)
    assert rep.params["prime"] is False
    assert "nonzero_cells" in rep.witness


@pytest.mark.parametrize("n", range(3, 16, 2))
def test_prefactor(n):
    rep = verify_prefactor(n)
    assert rep.passed, rep.witness
    assert rep.witness["expected_value"] == n


def test_prefactor_n3_by_hand():
    prod = CycRingElem.from_terms(3, [(1, 1, 0), (-1, 0, 1)]) * CycRingElem.from_terms(3, [(1, 1, 0), (-1, 0, 2)])
    assert prod == CycRingElem.from_terms(3, [(1, 0, 0), (1, 1, 0), (1, 2, 0)])
    assert prod.at_a(1) == CycRingElem.monomial(3, 3, 0, 0)


@pytest.mark.parametrize("n", [1, 2, 4, 0, -3])
def test_invalid_n(n):
    with pytest.raises(InvalidN):
        verify_e05(n)
    with pytest.raises(InvalidN):
        verify_prefactor(n)


def test_cap():
    with pytest.raises(CapExceeded):
        verify_e05(17)
    with pytest.raises(CapExceeded):
        verify_e05(9, cap=7)


def test_difference_csv(tmp_path):
    path = tmp_path / "d.csv"
    dump_difference_csv(5, path)
    assert path.read_text() == "q_degree,a_degree,coefficient\n"


def test_failure_witness():
    lhs, rhs = build_sides_e05(3)
    broken = lhs - rhs + CycRingElem.monomial(3, 7, 2, 1)
    assert broken.cells() == [(1, 2, 7)]
