"""Exact arithmetic in GF(p^n).

Elements are encoded as integers ``x = c_0 + c_1 p + ... + c_{n-1} p^{n-1}``
where ``c_i`` is the coefficient of ``t^i`` in the polynomial representative.
For ``n = 1`` the encoding is the residue itself.  All arithmetic functions
accept either Python ints or integer numpy arrays and broadcast.

The field is built deterministically: the modulus is the first irreducible
monic polynomial in lexicographic order of ``(c_0, ..., c_{n-1})`` and the
generator is the first element, in the same order on coefficient vectors,
of multiplicative order ``q - 1``.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivisionByZeroError,
    FieldTooLargeError,
    InvalidDegreeError,
    LogOfZeroError,
    NotPrimeError,
)
from .number_theory import factorize, is_prime

FieldElement = int

MAX_ORDER = int(os.environ.get("AFFINE_HSP_MAX_FIELD", 2**16))
# Dense q x q addition/multiplication tables are only kept for small fields.
TABLE_LIMIT = 1024


# -- polynomials over Z/p, coefficient lists low degree first ----------------

def _trim(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def poly_mod(a, m, p):
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    r = [c % p for c in a[:dm]] if dm > 0 else [0]
    return r + [0] * (dm - len(r))


def poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def is_irreducible(modulus, p) -> bool:
    """Exhaustive check that the monic ``modulus`` has no monic factor of
    degree between 1 and deg/2."""
    modulus = list(modulus)
    n = len(modulus) - 1
    if n < 1 or modulus[-1] % p != 1:
        return False
    for d in range(1, n // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            if not any(_trim(poly_mod(modulus, divisor, p))):
                return False
    return True


def first_irreducible(p: int, n: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=n):
        candidate = list(low) + [1]
        if is_irreducible(candidate, p):
            return tuple(candidate)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- the field ---------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class FieldSpec:
    """Immutable description of GF(p^n) with its discrete-log tables.

    ``exp_table[j]`` is ``generator**j`` for ``j`` in ``[0, q-2]``;
    ``dlog_table[x]`` is the discrete log of ``x`` (``-1`` at ``x = 0``).
    """

    p: int
    n: int
    modulus: tuple[int, ...]
    generator: int
    exp_table: np.ndarray
    dlog_table: np.ndarray
    digits: np.ndarray
    trace_table: np.ndarray
    add_table: np.ndarray | None
    neg_table: np.ndarray

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def order(self) -> int:
        """Order ``q - 1`` of the multiplicative group."""
        return self.q - 1

    def __repr__(self):
        return f"FieldSpec({serialize(self)})"


def _encode(digits, p):
    weights = p ** np.arange(digits.shape[-1], dtype=np.int64)
    return (digits * weights).sum(axis=-1)


def _scalar(v):
    return int(v) if np.ndim(v) == 0 else v


def _poly_of(x, p, n):
    return [(x // p**i) % p for i in range(n)]


def _int_of(coeffs, p):
    return sum(int(c) * p**i for i, c in enumerate(coeffs))


def _element_order_is_full(x, modulus, p, n, q, prime_factors):
    def powmod(base, e):
        result = [1] + [0] * (n - 1)
        while e:
            if e & 1:
                result = poly_mod(poly_mul(result, base, p), modulus, p)
            base = poly_mod(poly_mul(base, base, p), modulus, p)
            e >>= 1
        return result

    one = [1] + [0] * (n - 1)
    base = _poly_of(x, p, n)
    return all(powmod(base, (q - 1) // l) != one for l in prime_factors)


def build_field(p: int, n: int = 1, *, max_order: int | None = None) -> FieldSpec:
    """Construct GF(p^n) deterministically from ``(p, n)``."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise NotPrimeError(f"{p} is not prime")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDegreeError(f"extension degree must be >= 1, got {n}")
    p, n = int(p), int(n)
    q = p**n
    cap = MAX_ORDER if max_order is None else max_order
    if q > cap:
        raise FieldTooLargeError(f"q = {q} exceeds the configured maximum {cap}")

    modulus = first_irreducible(p, n)
    prime_factors = [l for l, _ in factorize(q - 1)] if q > 2 else []
    generator = None
    for low in itertools.product(range(p), repeat=n):
        x = _int_of(low, p)
        if x == 0:
            continue
        if _element_order_is_full(x, modulus, p, n, q, prime_factors):
            generator = x
            break
    assert generator is not None

    exp_table = np.empty(q - 1, dtype=np.int64)
    dlog_table = np.full(q, -1, dtype=np.int64)
    gen_poly = _poly_of(generator, p, n)
    cur = [1] + [0] * (n - 1)
    for j in range(q - 1):
        v = _int_of(cur, p)
        exp_table[j] = v
        dlog_table[v] = j
        cur = poly_mod(poly_mul(cur, gen_poly, p), modulus, p)
    assert _int_of(cur, p) == 1

    xs = np.arange(q, dtype=np.int64)
    digits = (xs[:, None] // p ** np.arange(n, dtype=np.int64)) % p
    neg_table = _encode((-digits) % p, p)
    add_table = None
    if q <= TABLE_LIMIT:
        add_table = _encode((digits[:, None, :] + digits[None, :, :]) % p, p)

    for arr in (exp_table, dlog_table, digits, neg_table):
        arr.setflags(write=False)
    if add_table is not None:
        add_table.setflags(write=False)

    spec = FieldSpec(p, n, modulus, generator, exp_table, dlog_table, digits,
                     np.zeros(q, dtype=np.int64), add_table, neg_table)
    # trace(x) = x + x^p + ... + x^(p^(n-1)); lands in the prime subfield.
    tr = xs.copy()
    frob = xs.copy()
    for _ in range(n - 1):
        frob = power(spec, frob, p)
        tr = add(spec, tr, frob)
    if np.any(tr >= p):
        raise AssertionError("trace left the prime subfield")
    tr.setflags(write=False)
    object.__setattr__(spec, "trace_table", tr)
    return spec


def serialize(spec: FieldSpec) -> str:
    mod = ",".join(str(c) for c in spec.modulus)
    gen = ",".join(str(c) for c in coeffs(spec, spec.generator))
    return f"p={spec.p} n={spec.n} modulus={mod} u={gen}"


# -- element conversion -------------------------------------------------------

def coeffs(spec: FieldSpec, x: FieldElement) -> tuple[int, ...]:
    return tuple(int(c) for c in spec.digits[x])


def element(spec: FieldSpec, cs) -> FieldElement:
    cs = list(cs)
    if len(cs) != spec.n or any(not 0 <= c < spec.p for c in cs):
        raise ValueError(f"need {spec.n} residues mod {spec.p}, got {cs}")
    return _int_of(cs, spec.p)


def lex_key(spec: FieldSpec, x: FieldElement) -> tuple[int, ...]:
    """Sort key giving lexicographic order on ``(c_0, ..., c_{n-1})``."""
    return coeffs(spec, x)


def elements(spec: FieldSpec) -> range:
    return range(spec.q)


def units(spec: FieldSpec) -> np.ndarray:
    """Nonzero elements in generator order ``u^0, u^1, ..., u^{q-2}``."""
    return spec.exp_table


# -- arithmetic ---------------------------------------------------------------

def add(spec, x, y):
    if spec.add_table is not None:
        return _scalar(spec.add_table[x, y])
    return _scalar(_encode((spec.digits[x] + spec.digits[y]) % spec.p, spec.p))


def neg(spec, x):
    return _scalar(spec.neg_table[x])


def sub(spec, x, y):
    return add(spec, x, neg(spec, y))


def mul(spec, x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    zero = (x == 0) | (y == 0)
    lx = np.where(zero, 0, spec.dlog_table[x])
    ly = np.where(zero, 0, spec.dlog_table[y])
    out = np.where(zero, 0, spec.exp_table[(lx + ly) % spec.order])
    return _scalar(out)


def inv(spec, x):
    if np.any(np.asarray(x) == 0):
        raise DivisionByZeroError("inverse of zero")
    return _scalar(spec.exp_table[(-spec.dlog_table[x]) % spec.order])


def div(spec, x, y):
    return mul(spec, x, inv(spec, y))


def power(spec, x, e):
    """``x**e`` by square-and-multiply; ``0**0 == 1``."""
    x = np.asarray(x)
    e = int(e)
    if e < 0:
        x = np.asarray(inv(spec, x))
        e = -e
    result = np.ones_like(x)
    base = x
    while e:
        if e & 1:
            result = np.asarray(mul(spec, result, base))
        base = np.asarray(mul(spec, base, base))
        e >>= 1
    return _scalar(result)


def generator_power(spec, j):
    """``u**j`` for any integer ``j`` (reduced mod q-1)."""
    return _scalar(spec.exp_table[np.asarray(j) % spec.order])


def discrete_log(spec, x):
    if np.any(np.asarray(x) == 0):
        raise LogOfZeroError("discrete log of zero")
    return _scalar(spec.dlog_table[x])


def trace(spec, x):
    return _scalar(spec.trace_table[x])


def multiplicative_order(spec, x) -> int:
    if x == 0:
        raise LogOfZeroError("zero has no multiplicative order")
    k, y = 1, x
    while y != 1:
        y = mul(spec, y, x)
        k += 1
    return k
