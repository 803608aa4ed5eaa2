"""Field construction and arithmetic, checked against sympy polynomial arithmetic."""
import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from affine_hsp import finite_field as ff
from affine_hsp.errors import (
    DivisionByZeroError,
    FieldTooLargeError,
    InvalidDegreeError,
    LogOfZeroError,
    NotPrimeError,
)

from conftest import ALL_FIELDS, field

X = sympy.Symbol("x")


def sympy_poly(cs, p):
    """Coefficients low degree first -> sympy Poly over GF(p)."""
    return sympy.Poly(list(reversed(cs)), X, domain=sympy.GF(p))


def sympy_coeffs(poly, p, n):
    cs = [int(c) % p for c in reversed(poly.all_coeffs())]
    return tuple(cs + [0] * (n - len(cs)))


def oracle_mul(spec, x, y):
    prod = sympy_poly(ff.coeffs(spec, x), spec.p) * sympy_poly(ff.coeffs(spec, y), spec.p)
    rem = prod.rem(sympy_poly(spec.modulus, spec.p))
    return ff.element(spec, sympy_coeffs(rem, spec.p, spec.n))


def oracle_first_irreducible(p, n):
    for low in itertools.product(range(p), repeat=n):
        if sympy_poly(list(low) + [1], p).is_irreducible:
            return tuple(low) + (1,)


# -- frozen construction outputs (values from the sympy oracle above) ----------

FROZEN = {
    (5, 1): ((0, 1), (2,)),
    (2, 2): ((1, 1, 1), (0, 1)),
    (2, 3): ((1, 0, 1, 1), (0, 0, 1)),
    (3, 2): ((1, 0, 1), (1, 1)),
    (2, 4): ((1, 0, 0, 1, 1), (0, 0, 1, 0)),
}


@pytest.mark.parametrize("pn", sorted(FROZEN))
def test_construction_is_frozen(pn):
    spec = field(*pn)
    modulus, gen = FROZEN[pn]
    assert spec.modulus == modulus
    assert ff.coeffs(spec, spec.generator) == gen


@pytest.mark.parametrize("pn", [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (5, 2)])
def test_modulus_is_first_irreducible(pn):
    spec = field(*pn)
    assert spec.modulus == oracle_first_irreducible(*pn)
    assert ff.is_irreducible(spec.modulus, spec.p)


@pytest.mark.parametrize("pn", ALL_FIELDS + [(3, 3), (5, 2)])
def test_generator_is_first_in_lex_order(pn):
    spec = field(*pn)
    assert ff.multiplicative_order(spec, spec.generator) == spec.q - 1
    earlier = [x for x in range(1, spec.q)
               if ff.lex_key(spec, x) < ff.lex_key(spec, spec.generator)]
    assert all(ff.multiplicative_order(spec, x) < spec.q - 1 for x in earlier)


def test_prime_field_example():
    spec = field(5)
    assert spec.q == 5 and spec.generator == 2
    assert ff.discrete_log(spec, 4) == 2
    assert [ff.generator_power(spec, j) for j in range(4)] == [1, 2, 4, 3]


def test_gf8_log_of_square():
    spec = field(2, 3)
    u = spec.generator
    assert ff.discrete_log(spec, ff.mul(spec, u, u)) == 2
    assert ff.mul(spec, u, u) == oracle_mul(spec, u, u)


@pytest.mark.parametrize("pn", ALL_FIELDS)
def test_multiplication_matches_polynomial_oracle(pn):
    spec = field(*pn)
    xs = np.arange(spec.q)
    table = ff.mul(spec, xs[:, None], xs[None, :])
    for x, y in itertools.product(range(spec.q), repeat=2):
        assert table[x, y] == oracle_mul(spec, x, y)


@pytest.mark.parametrize("pn", ALL_FIELDS)
def test_addition_is_coefficientwise(pn):
    spec = field(*pn)
    for x, y in itertools.product(range(spec.q), repeat=2):
        want = tuple((a + b) % spec.p for a, b in zip(ff.coeffs(spec, x), ff.coeffs(spec, y)))
        assert ff.coeffs(spec, ff.add(spec, x, y)) == want
        assert ff.sub(spec, ff.add(spec, x, y), y) == x


@given(st.sampled_from(ALL_FIELDS), st.data())
def test_field_axioms(pn, data):
    spec = field(*pn)
    x, y, z = (data.draw(st.integers(0, spec.q - 1)) for _ in range(3))
    assert ff.mul(spec, x, ff.add(spec, y, z)) == ff.add(spec, ff.mul(spec, x, y), ff.mul(spec, x, z))
    assert ff.mul(spec, ff.mul(spec, x, y), z) == ff.mul(spec, x, ff.mul(spec, y, z))
    assert ff.add(spec, x, ff.neg(spec, x)) == 0
    if x:
        assert ff.mul(spec, x, ff.inv(spec, x)) == 1
        assert ff.div(spec, ff.mul(spec, x, y), x) == y


@given(st.sampled_from(ALL_FIELDS), st.data())
def test_power_and_log(pn, data):
    spec = field(*pn)
    x = data.draw(st.integers(1, spec.q - 1))
    e = data.draw(st.integers(-50, 50))
    naive = 1
    base = x if e >= 0 else ff.inv(spec, x)
    for _ in range(abs(e)):
        naive = ff.mul(spec, naive, base)
    assert ff.power(spec, x, e) == naive
    assert ff.generator_power(spec, ff.discrete_log(spec, x)) == x


@pytest.mark.parametrize("pn", ALL_FIELDS)
def test_trace_is_additive_onto_prime_field(pn):
    spec = field(*pn)
    tr = [ff.trace(spec, x) for x in range(spec.q)]
    assert set(tr) == set(range(spec.p))
    for x, y in itertools.product(range(spec.q), repeat=2):
        assert ff.trace(spec, ff.add(spec, x, y)) == (tr[x] + tr[y]) % spec.p


def test_gf4_trace_sums_to_zero():
    spec = field(2, 2)
    assert sum(ff.trace(spec, x) for x in range(4)) % 2 == 0


def test_trace_matches_frobenius_sum_oracle():
    # Tr(x) = x + x^p + ... computed with sympy polynomial powers
    spec = field(3, 2)
    mod = sympy_poly(spec.modulus, 3)
    for x in range(spec.q):
        px = sympy_poly(ff.coeffs(spec, x), 3)
        total = px + (px ** 3).rem(mod)
        assert ff.element(spec, sympy_coeffs(total.rem(mod), 3, 2)) == ff.trace(spec, x)


def test_serialize_roundtrip_fields():
    assert ff.serialize(field(2, 3)) == "p=2 n=3 modulus=1,0,1,1 u=0,0,1"
    assert ff.serialize(field(3, 2)) == "p=3 n=2 modulus=1,0,1 u=1,1"


def test_units_in_generator_order():
    spec = field(3, 2)
    us = ff.units(spec)
    assert sorted(us.tolist()) == list(range(1, spec.q))
    assert all(ff.discrete_log(spec, x) == j for j, x in enumerate(us))


def test_irreducibility_helper_against_sympy():
    for p, n in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3)]:
        for low in itertools.product(range(p), repeat=n):
            cs = tuple(low) + (1,)
            assert ff.is_irreducible(cs, p) == sympy_poly(cs, p).is_irreducible


def test_errors():
    with pytest.raises(NotPrimeError):
        ff.build_field(4)
    with pytest.raises(InvalidDegreeError):
        ff.build_field(3, 0)
    with pytest.raises(FieldTooLargeError):
        ff.build_field(2, 5, max_order=16)
    spec = field(5)
    with pytest.raises(DivisionByZeroError):
        ff.inv(spec, 0)
    with pytest.raises(LogOfZeroError):
        ff.discrete_log(spec, 0)
    with pytest.raises(ValueError):
        ff.element(spec, [7])


def test_construction_is_deterministic():
    a, b = ff.build_field(2, 4), ff.build_field(2, 4)
    assert ff.serialize(a) == ff.serialize(b)
    assert np.array_equal(a.exp_table, b.exp_table)
