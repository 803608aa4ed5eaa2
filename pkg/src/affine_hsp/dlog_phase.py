"""The phase operator T_k built from a discrete-log style register circuit.

Registers, in order: ``R = Z/(q-1)``, ``X = F^x`` (holding the input),
``S = Z/(q-1)``, ``Z = F``.  Starting from

    1/(q-1) sum_{r,s} sum_x a_x |r>|x>|s>|0>

the circuit applies V (|z> -> |z + x^r u^s>), the multiplicative transform
on R and S, and measures S and Z.  The surviving state is
sum_x a_x |m L(x)>|x> for the measured m.  If m is a unit mod q-1 the
first register is relabelled by m^{-1}, the phase zeta^(-k j) is applied
on |j>|x>, and T|j, x> = |u^j, u^{-j} x> moves everything onto
|x>|1>; discarding |1> leaves sum_x zeta^(-k L(x)) a_x |x>.

After the transforms the register order is (l, x, m, u^z), with l = m L(x)
in the first slot and the input element x in the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from . import finite_field as ff
from .errors import NotInvertibleError, PhaseOracleFailed
from .spectra import mult_qft
from .statevector import (
    StateVector,
    apply_diagonal,
    apply_on_factor,
    apply_permutation,
    cyclic_basis,
    enumerate_branches,
    field_basis,
    from_amplitudes,
    measure_factor,
    units_basis,
)

INPUT_SUPPORT_TOL = 1e-9


def mod_inverse(m: int, modulus: int) -> int:
    """Inverse of ``m`` in Z/modulus by the extended Euclidean algorithm."""
    r0, r1 = m % modulus, modulus
    s0, s1 = 1, 0
    while r1:
        quot = r0 // r1
        r0, r1 = r1, r0 - quot * r1
        s0, s1 = s1, s0 - quot * s1
    if r0 != 1:
        raise NotInvertibleError(f"{m} is not invertible mod {modulus}")
    result = s0 % modulus
    return result if modulus > 1 else 0


@dataclass(frozen=True)
class PhaseSubroutineTrace:
    m: int
    z: int
    gcd: int
    invertible: bool
    m_inverse: Optional[int]
    mult_qft_count: int
    probability: float

    def to_dict(self) -> dict:
        return asdict(self)


def register_factors(spec):
    m = spec.order
    return (cyclic_basis(m, "R"), units_basis(spec), cyclic_basis(m, "S"), field_basis(spec))


def _input_amplitudes(spec, state: StateVector) -> np.ndarray:
    amps = np.asarray(state.amps)
    if len(state.factors) != 1 or amps.size != spec.q:
        raise ValueError("input must be a single state over L^2(F)")
    if abs(amps[0]) > INPUT_SUPPORT_TOL:
        raise ValueError("input must be supported on F^x")
    return amps[spec.exp_table]


def initial_registers(spec, state: StateVector) -> StateVector:
    a = _input_amplitudes(spec, state)
    m = spec.order
    r = np.full(m, 1 / np.sqrt(m))
    z = np.zeros(spec.q)
    z[0] = 1.0
    amps = np.kron(np.kron(np.kron(r, a), r), z)
    return from_amplitudes(register_factors(spec), amps, normalize=True)


def apply_v(spec, state: StateVector) -> StateVector:
    """|r>|x>|s>|z> -> |r>|x>|s>|z + x^r u^s> (a basis permutation)."""
    m = spec.order

    def update(idx):
        r, j, s, z = idx
        # x = u^j, so x^r u^s = u^(j r + s)
        return ff.add(spec, z, spec.exp_table[(j * r + s) % m])

    return apply_on_factor(state, 3, update)


def fourier_registers(spec, state: StateVector) -> StateVector:
    fm = mult_qft(spec)
    return apply_on_factor(apply_on_factor(state, 0, fm), 2, fm)


def prepare_measurement(spec, state: StateVector) -> StateVector:
    """Initial registers, V, then F_M on R and S: ready for measuring S, Z."""
    return fourier_registers(spec, apply_v(spec, initial_registers(spec, state)))


def _finish(spec, k: int, residual: StateVector, m_value: int) -> StateVector:
    """From sum a_x |m L(x)>|x> (up to phase) to sum zeta^(-k L(x)) a_x |x>."""
    order = spec.order
    minv = mod_inverse(m_value, order)
    relabel = (np.arange(order) * minv) % order
    st = apply_on_factor(residual, 0, relabel)
    # U_k h: one diagonal phase zeta^(-k j) on |j>|x>.
    st = apply_diagonal(st, lambda idx: np.exp(-2j * np.pi * ((k * idx[0]) % order) / order))
    # T|j, x> = |u^j, u^{-j} x>
    st = apply_permutation(
        st,
        lambda idx: (idx[0], (idx[1] - idx[0]) % order),
        new_factors=(units_basis(spec), units_basis(spec)),
    )
    branches = enumerate_branches(st, 1)
    if len(branches) != 1 or branches[0][0].label != 1:
        raise AssertionError("second register did not end in |1>")
    out = branches[0][1]
    amps = np.zeros(spec.q, dtype=complex)
    amps[spec.exp_table] = out.amps
    return StateVector((field_basis(spec),), amps, out.tol)


def _trace(spec, m_value, z_value, probability):
    g = math.gcd(m_value, spec.order)
    inv = g == 1
    return PhaseSubroutineTrace(
        m=m_value,
        z=z_value,
        gcd=g,
        invertible=inv,
        m_inverse=mod_inverse(m_value, spec.order) if inv else None,
        mult_qft_count=2,
        probability=probability,
    )


def t_k_subroutine(spec, k: int, state: StateVector, rng: np.random.Generator):
    """Apply T_k to ``state`` (over L^2(F), supported on F^x).

    Returns ``(output, trace)``; raises :class:`PhaseOracleFailed` when the
    measured m is not a unit mod q-1.
    """
    if not 0 <= k < spec.order:
        raise ValueError(f"k must lie in [0, {spec.order - 1}]")
    st = prepare_measurement(spec, state)
    rec_m, st = measure_factor(st, 2, rng)
    rec_z, st = measure_factor(st, 2, rng)
    m_value = rec_m.index
    z_value = spec.dlog_table[rec_z.label] if rec_z.label != 0 else -1
    trace = _trace(spec, m_value, int(z_value), rec_m.probability * rec_z.probability)
    if not trace.invertible:
        raise PhaseOracleFailed(
            f"measured m = {m_value} shares a factor with {spec.order}", trace, st
        )
    return _finish(spec, k, st, m_value), trace


def t_k_branches(spec, k: int, state: StateVector):
    """Exact mode: every (m, z) outcome as (trace, output or None)."""
    st = prepare_measurement(spec, state)
    out = []
    for rec_m, st_m in enumerate_branches(st, 2):
        for rec_z, st_mz in enumerate_branches(st_m, 2):
            z_value = int(spec.dlog_table[rec_z.label]) if rec_z.label != 0 else -1
            trace = _trace(spec, rec_m.index, z_value, rec_m.probability * rec_z.probability)
            result = _finish(spec, k, st_mz, rec_m.index) if trace.invertible else None
            out.append((trace, result))
    return out
