"""Totients, factorization and the totient-ratio scans.

The success probability of the discrete-log phase subroutine is the
fraction of units in Z/(q-1), i.e. phi(q-1)/(q-1).  This module computes
that ratio exactly from a factorization, the Hardy-Wright style lower bound,
the repetition count needed for a target failure rate, and the two families
of field orders (p^n with n prime, and 2^(2^n)) whose ratio stays bounded
away from zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DomainError, IndexOutOfRangeError, ScanOverflowError

EULER_GAMMA = 0.57721566490153286
TRIAL_DIVISION_LIMIT = 2**20
# Deterministic for n < 3.3e24 with the first 13 primes as witnesses.
FACTOR_LIMIT = 2**65
SCAN_LIMIT = 2**63
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for ``n < FACTOR_LIMIT``."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, seed: int = 1) -> int:
    """Return a nontrivial factor of the odd composite ``n``."""
    c = seed
    while True:
        y, r, q, g = 2, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 2`` as sorted ``(prime, exponent)`` pairs.

    Trial division up to ``TRIAL_DIVISION_LIMIT``, then Brent's variant of
    Pollard rho with a fixed starting constant, so the result and the work
    done are both deterministic.
    """
    if n < 2:
        raise DomainError(f"factorize needs n >= 2, got {n}")
    if n >= FACTOR_LIMIT:
        raise DomainError(f"{n} exceeds the factorization cap {FACTOR_LIMIT}")
    counts: dict[int, int] = {}
    m = n
    d = 2
    while d <= TRIAL_DIVISION_LIMIT and d * d <= m:
        if m % d == 0:
            while m % d == 0:
                counts[d] = counts.get(d, 0) + 1
                m //= d
            if m > 1 and is_prime(m):
                break
        d += 1 if d == 2 else 2
    stack = [m] if m > 1 else []
    while stack:
        x = stack.pop()
        if is_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        f = _pollard_brent(x)
        stack.extend((f, x // f))
    return sorted(counts.items())


def format_factorization(factors: list[tuple[int, int]]) -> str:
    return "*".join(f"{l}^{e}" if e > 1 else str(l) for l, e in factors)


def totient(n: int) -> int:
    if n == 1:
        return 1
    result = n
    for l, _ in factorize(n):
        result -= result // l
    return result


def hardy_wright_bound(n: int) -> float:
    """Lower bound exp(-gamma) / (lnln n + 3 / lnln n) for phi(n)/n, n >= 5."""
    if n < 5:
        raise DomainError("bound requires n >= 5")
    ll = math.log(math.log(n))
    return math.exp(-EULER_GAMMA) / (ll + 3.0 / ll)


@dataclass(frozen=True)
class TotientReport:
    n: int
    factorization: tuple[tuple[int, int], ...]
    phi: int
    ratio: float
    bound: Optional[float]

    @property
    def bound_holds(self) -> Optional[bool]:
        return None if self.bound is None else self.ratio >= self.bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "factorization": format_factorization(list(self.factorization)),
            "phi": self.phi,
            "ratio": self.ratio,
            "bound": self.bound,
            "bound_holds": self.bound_holds,
        }


def totient_report(n: int) -> TotientReport:
    if n < 2:
        raise DomainError("totient_report needs n >= 2")
    facs = factorize(n)
    phi = n
    for l, _ in facs:
        phi -= phi // l
    bound = hardy_wright_bound(n) if n >= 5 else None
    return TotientReport(n, tuple(facs), phi, phi / n, bound)


def repetition_count(n: int, epsilon: float) -> int:
    """Number of independent runs giving failure probability at most ``epsilon``.

    ``ceil(2 lnln n * (-ln epsilon))``, never less than one.  Requires
    ``n >= 16`` so that lnln n > 1.
    """
    if n < 16:
        raise DomainError(f"repetition_count needs n >= 16, got {n}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    return max(1, math.ceil(2.0 * math.log(math.log(n)) * -math.log(epsilon)))


def retry_budget(q: int, epsilon: float) -> int:
    """Whole-trial retry budget for a field of order ``q``.

    Small fields fall outside the domain of :func:`repetition_count`, so the
    modulus is clamped up to 16 there; this only ever increases the budget.
    """
    return repetition_count(max(q - 1, 16), epsilon)


def failure_bound(n: int) -> float:
    """(1 - 1/x)^x with x = 2 lnln n: failure probability after x runs."""
    x = 2.0 * math.log(math.log(n))
    return (1.0 - 1.0 / x) ** x


def fermat_number(i: int) -> int:
    return 2 ** (2**i) + 1


MAX_FERMAT_INDEX = 6
# commonly quoted value of the prime-divisor product; direct computation disagrees
QUOTED_FERMAT_PRODUCT = 0.4997


@dataclass(frozen=True)
class FermatProduct:
    max_index: int
    primes: tuple[int, ...]
    product: float
    idealized: float

    def to_dict(self) -> dict:
        return {
            "max_index": self.max_index,
            "primes": list(self.primes),
            "product": self.product,
            "idealized": self.idealized,
            "note": (
                f"finite truncation: only primes dividing F_0..F_{self.max_index}"
                " contribute"
            ),
            "quoted_value": QUOTED_FERMAT_PRODUCT,
            "matches_quoted_value": self.matches_quoted,
        }

    @property
    def matches_quoted(self) -> bool:
        """Whether the product agrees with the quoted .4997 to four places."""
        return round(self.product, 4) == QUOTED_FERMAT_PRODUCT


def fermat_product(max_index: int) -> FermatProduct:
    """Products of (1 - 1/l) over the primes dividing F_0..F_max_index.

    ``idealized`` is the product of (1 - 1/F_i) itself, the value the
    prime-divisor product would take if every Fermat number were prime.
    """
    if not 0 <= max_index <= MAX_FERMAT_INDEX:
        raise IndexOutOfRangeError(
            f"Fermat index must lie in [0, {MAX_FERMAT_INDEX}], got {max_index}"
        )
    primes: set[int] = set()
    ideal_log = 0.0
    for i in range(max_index + 1):
        f = fermat_number(i)
        primes.update(l for l, _ in factorize(f))
        ideal_log += math.log1p(-1.0 / f)
    ordered = tuple(sorted(primes))
    log_prod = math.fsum(math.log1p(-1.0 / l) for l in ordered)
    return FermatProduct(max_index, ordered, math.exp(log_prod), math.exp(ideal_log))


def primes_below(limit: int) -> list[int]:
    return [l for l in range(2, limit) if is_prime(l)]


def scan_constant(p: int) -> float:
    """exp(-1/2) times the product of (1 - 1/l) over primes l < p."""
    prod = math.exp(math.fsum(math.log1p(-1.0 / l) for l in primes_below(p)))
    return math.exp(-0.5) * prod


@dataclass(frozen=True)
class ScanRow:
    n: int
    q_minus_1: int
    factorization: tuple[tuple[int, int], ...]
    ratio: float
    bound: float
    structural_ok: Optional[bool]

    @property
    def passed(self) -> bool:
        return self.ratio >= self.bound and self.structural_ok is not False

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q_minus_1": self.q_minus_1,
            "factorization": format_factorization(list(self.factorization)),
            "ratio": self.ratio,
            "bound": self.bound,
            "structural_ok": self.structural_ok,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ScanResult:
    p: int
    max_n: int
    rows: tuple[ScanRow, ...] = field(default_factory=tuple)

    @property
    def min_ratio(self) -> float:
        return min(r.ratio for r in self.rows)

    @property
    def finite_constant(self) -> Optional[float]:
        """min of (1 - 1/(2n+1))^n over the scanned primes n > p."""
        vals = [(1 - 1 / (2 * r.n + 1)) ** r.n for r in self.rows if r.n > self.p]
        return min(vals) if vals else None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "max_n": self.max_n,
            "min_ratio": self.min_ratio,
            "finite_constant": self.finite_constant,
            "rows": [r.to_dict() for r in self.rows],
        }


def prime_power_scan(p: int, max_n: int) -> ScanResult:
    """phi(p^n - 1)/(p^n - 1) for every prime n <= max_n.

    Each row also checks that every prime l > p dividing p^n - 1 is
    1 mod 2n (odd prime n only; ``None`` for n = 2).
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p**max_n > SCAN_LIMIT:
        raise ScanOverflowError(f"{p}^{max_n} exceeds {SCAN_LIMIT}")
    bound = scan_constant(p)
    rows = []
    for n in range(2, max_n + 1):
        if not is_prime(n):
            continue
        m = p**n - 1
        facs = factorize(m) if m >= 2 else []
        ratio = math.exp(math.fsum(math.log1p(-1.0 / l) for l, _ in facs))
        if n == 2:
            structural = None
        else:
            structural = all(l % (2 * n) == 1 for l, _ in facs if l > p)
        rows.append(ScanRow(n, m, tuple(facs), ratio, bound, structural))
    return ScanResult(p, max_n, tuple(rows))
