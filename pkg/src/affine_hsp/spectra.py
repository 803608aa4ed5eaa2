"""Characters, the two Fourier transforms, Gauss sums and the wavelet states.

Conventions
-----------
* zeta = exp(2 pi i / (q-1)); the multiplicative character chi_j sends
  u^l to zeta^(j l).
* eta(x) = exp(2 pi i Tr(x) / p) is the additive character.  ``twist=c``
  selects eta_c(x) = eta(c x) instead; every probability computed by the
  pipeline is independent of that choice.
* Vectors over L^2(F) are indexed by the integer encoding of field elements,
  vectors over L^2(F^x) by the exponent j of u^j.

The Gauss sum satisfies G(u^j, t) = chi_j(t)^{-1} G(u^j, 1) for t != 0,
so G(u^j, z) conj(G(u^j, t)) = chi_j(t / z).  Consequently the additive
transform of phi_{-k, v} carries the phase chi_k(t)^{-1} on |t>, and the
diagonal that removes it is ``t_k_diagonal(-k)``; :func:`correction_index`
derives that sign from the Gauss sums instead of assuming it.
"""
from __future__ import annotations

import functools

import numpy as np

from . import finite_field as ff
from .affine_group import rep_pi, AffineElement
from .finite_field import FieldSpec
from .statevector import StateVector, field_basis


def zeta(spec: FieldSpec) -> complex:
    return np.exp(2j * np.pi / spec.order)


def mult_character(spec: FieldSpec, j: int, x):
    """chi_j(x) = zeta^(j L(x)) for nonzero x (scalar or array)."""
    lx = np.asarray(ff.discrete_log(spec, x))
    val = np.exp(2j * np.pi * ((j * lx) % spec.order) / spec.order)
    return complex(val) if val.ndim == 0 else val


def add_character(spec: FieldSpec, x, twist: int = 1):
    """eta(twist * x) with eta(x) = exp(2 pi i Tr(x) / p)."""
    tr = np.asarray(ff.trace(spec, ff.mul(spec, twist, x)))
    val = np.exp(2j * np.pi * tr / spec.p)
    return complex(val) if val.ndim == 0 else val


def _frozen(a):
    a.setflags(write=False)
    return a


@functools.lru_cache(maxsize=64)
def mult_qft(spec: FieldSpec) -> np.ndarray:
    """(q-1) x (q-1) matrix with entry (k, j) = zeta^(k j) / sqrt(q-1)."""
    m = spec.order
    k = np.arange(m)
    return _frozen(np.exp(2j * np.pi * (np.outer(k, k) % m) / m) / np.sqrt(m))


@functools.lru_cache(maxsize=64)
def add_qft(spec: FieldSpec, twist: int = 1) -> np.ndarray:
    """q x q matrix with entry (t, z) = eta(t z) / sqrt(q)."""
    xs = np.arange(spec.q)
    prod = ff.mul(spec, xs[:, None], xs[None, :])
    return _frozen(add_character(spec, prod, twist) / np.sqrt(spec.q))


@functools.lru_cache(maxsize=64)
def add_qft_inverse(spec: FieldSpec, twist: int = 1) -> np.ndarray:
    return _frozen(add_qft(spec, twist).conj().T.copy())


def gauss_sum(spec: FieldSpec, j: int, t: int, twist: int = 1) -> complex:
    """G(u^j, t) = (1/sqrt q) sum over y != 0 of chi_j(y) eta(t y)."""
    ys = spec.exp_table
    terms = mult_character(spec, j, ys) * add_character(spec, ff.mul(spec, t, ys), twist)
    return complex(terms.sum() / np.sqrt(spec.q))


def wavelet_phi_amplitudes(spec: FieldSpec, k: int, v: int) -> np.ndarray:
    """phi_{k,v}(v + u^j) = zeta^(-k j) / sqrt(q-1); zero at x = v."""
    m = spec.order
    out = np.zeros(spec.q, dtype=complex)
    j = np.arange(m)
    out[ff.add(spec, spec.exp_table, v)] = np.exp(-2j * np.pi * (k * j % m) / m) / np.sqrt(m)
    return out


def wavelet_phi(spec: FieldSpec, k: int, v: int) -> StateVector:
    return StateVector((field_basis(spec),), wavelet_phi_amplitudes(spec, k, v))


def wavelet_psi_amplitudes(spec: FieldSpec, v: int) -> np.ndarray:
    """psi_0 = (phi_{0,0} - sqrt(q-1)|0>) / sqrt(q), translated to v."""
    q = spec.q
    psi0 = (wavelet_phi_amplitudes(spec, 0, 0) - np.sqrt(q - 1) * np.eye(q)[0]) / np.sqrt(q)
    out = np.zeros(q, dtype=complex)
    out[rep_pi(spec, AffineElement(1, v))] = psi0
    return out


def wavelet_psi(spec: FieldSpec, v: int) -> StateVector:
    return StateVector((field_basis(spec),), wavelet_psi_amplitudes(spec, v))


def t_k_phases(spec: FieldSpec, k: int) -> np.ndarray:
    """Diagonal of T_k: 1 at 0 and zeta^(-k L(t)) at t != 0."""
    m = spec.order
    d = np.ones(spec.q, dtype=complex)
    lt = spec.dlog_table[spec.exp_table]
    d[spec.exp_table] = np.exp(-2j * np.pi * ((k * lt) % m) / m)
    return d


def t_k_diagonal(spec: FieldSpec, k: int) -> np.ndarray:
    return np.diag(t_k_phases(spec, k))


@functools.lru_cache(maxsize=64)
def _correction_sign(spec: FieldSpec) -> int:
    """+1 or -1 such that G(u, t) / G(u, 1) = chi_1(t)^(-sign)."""
    if spec.q <= 3:
        # zeta is real here, both signs act identically.
        return 1
    u = spec.generator
    ratio = gauss_sum(spec, 1, u) / gauss_sum(spec, 1, 1)
    chi = mult_character(spec, 1, u)
    return 1 if abs(ratio - 1 / chi) < abs(ratio - chi) else -1


def correction_index(spec: FieldSpec, k: int) -> int:
    """Index j such that T_j flattens F_A phi_{-k, v} onto sum eta(t v)|t>.

    F_A phi_{-k,v} has amplitude G(u^k, t) eta(t v) / sqrt(q-1) at t; T_j
    must cancel the t-dependence of G(u^k, t).
    """
    return (-_correction_sign(spec) * k) % spec.order
