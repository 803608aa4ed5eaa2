"""Factorization, totients, repetition counts and the Fermat and prime-power tables."""
import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from affine_hsp import number_theory as nt
from affine_hsp.errors import DomainError, IndexOutOfRangeError, ScanOverflowError


def brute_totient(n):
    return sum(math.gcd(k, n) == 1 for k in range(1, n + 1))


@given(st.integers(2, 10**12))
def test_factorize_matches_sympy(n):
    assert nt.factorize(n) == sorted(sympy.factorint(n).items())


@pytest.mark.parametrize("n", [2**61 - 1, 2**62 - 1, 2**63 - 1, 2**64 - 1, 2**64 + 1,
                               1000000007 * 998244353, 2**59 * 3])
def test_factorize_large_matches_sympy(n):
    assert nt.factorize(n) == sorted(sympy.factorint(n).items())


@given(st.integers(1, 10**6))
def test_is_prime_matches_sympy(n):
    assert nt.is_prime(n) == sympy.isprime(n)


@pytest.mark.parametrize("n", [2**61 - 1, 2**89 - 1, 3215031751, 3825123056546413051])
def test_is_prime_hard_cases(n):
    assert nt.is_prime(n) == sympy.isprime(n)


def test_factorization_examples():
    assert nt.factorize(2047) == [(23, 1), (89, 1)]
    assert nt.factorize(2**32 - 1) == [(3, 1), (5, 1), (17, 1), (257, 1), (65537, 1)]
    assert nt.format_factorization(nt.factorize(720)) == "2^4*3^2*5"


def test_totient_against_brute_force():
    for n in range(1, 3001):
        assert nt.totient(n) == brute_totient(n)


@given(st.integers(2, 10**9))
def test_totient_against_sympy(n):
    assert nt.totient(n) == sympy.totient(n)


def test_totient_report_255():
    rep = nt.totient_report(255)
    assert rep.phi == 128
    assert Fraction(rep.phi, rep.n) == Fraction(2, 3) * Fraction(4, 5) * Fraction(16, 17)
    assert rep.ratio > 1 / (2 * math.log(math.log(255)))
    assert rep.bound_holds
    assert rep.to_dict()["factorization"] == "3*5*17"


def test_euler_constant():
    assert math.exp(-nt.EULER_GAMMA) > 0.56
    assert abs(nt.EULER_GAMMA - float(sympy.EulerGamma.evalf(30))) < 1e-15


def test_hardy_wright_bound_holds_on_range():
    for n in range(5, 20001):
        assert Fraction(nt.totient(n), n) >= nt.hardy_wright_bound(n) - 1e-15


def test_hardy_wright_bound_does_not_imply_half_lnln_bound_in_range():
    # exp(-gamma)/(L + 3/L) > 1/(2L) only once lnln n exceeds about 4.94
    worst = [n for n in range(16, 2**20, 997)
             if nt.hardy_wright_bound(n) > 1 / (2 * math.log(math.log(n)))]
    assert worst == []
    # and phi(n)/n > 1/(2 lnln n) itself fails at n = 30
    assert 8 / 30 < 1 / (2 * math.log(math.log(30)))


def test_repetition_count():
    assert nt.repetition_count(255, math.exp(-1)) == 4
    with pytest.raises(DomainError):
        nt.repetition_count(15, 0.1)
    with pytest.raises(DomainError):
        nt.repetition_count(100, 1.0)
    assert nt.retry_budget(8, 0.05) == nt.repetition_count(16, 0.05)
    assert nt.retry_budget(257, 0.05) == nt.repetition_count(256, 0.05)


@given(st.integers(16, 2**40), st.floats(1e-6, 0.999))
def test_repetition_count_formula(n, eps):
    want = max(1, math.ceil(2 * math.log(math.log(n)) * -math.log(eps)))
    assert nt.repetition_count(n, eps) == want


def test_failure_bound_below_inverse_e():
    for n in list(range(16, 5000)) + [2**k for k in range(13, 21)]:
        assert nt.failure_bound(n) < 1 / math.e


def test_fermat_products():
    res = nt.fermat_product(5)
    assert res.primes == (3, 5, 17, 257, 641, 65537, 6700417)
    oracle = math.prod(Fraction(l - 1, l) for l in res.primes)
    assert abs(res.product - float(oracle)) < 1e-15
    assert abs(res.product - 0.49922) < 5e-6
    assert not res.matches_quoted
    ideal = nt.fermat_product(4).idealized
    assert abs(ideal - 2**31 / (2**32 - 1)) < 1e-15
    assert abs(nt.fermat_product(6).idealized - 0.5) < 1e-15
    with pytest.raises(IndexOutOfRangeError):
        nt.fermat_product(7)


def test_prime_power_scan_binary():
    scan = nt.prime_power_scan(2, 31)
    assert [r.n for r in scan.rows] == [int(x) for x in sympy.primerange(2, 32)]
    assert scan.min_ratio >= 0.6
    assert all(r.passed for r in scan.rows)
    row11 = next(r for r in scan.rows if r.n == 11)
    assert row11.factorization == ((23, 1), (89, 1))
    assert all(l % 22 == 1 for l, _ in row11.factorization)
    row13 = next(r for r in scan.rows if r.n == 13)
    assert abs(row13.ratio - (1 - 1 / 8191)) < 1e-15


def test_prime_power_scan_ternary_and_limits():
    scan = nt.prime_power_scan(3, 19)
    for r in scan.rows:
        assert abs(r.ratio - float(Fraction(int(sympy.totient(r.q_minus_1)), r.q_minus_1))) < 1e-12
        assert r.structural_ok in (None, True)
    with pytest.raises(ScanOverflowError):
        nt.prime_power_scan(2, 64)
    with pytest.raises(DomainError):
        nt.prime_power_scan(4, 5)
