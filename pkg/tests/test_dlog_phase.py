"""The register-level phase subroutine compared with the diagonal phase operator."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from affine_hsp import dlog_phase as dp
from affine_hsp import finite_field as ff
from affine_hsp import spectra as sp
from affine_hsp.errors import NotInvertibleError, PhaseOracleFailed
from affine_hsp.statevector import StateVector, enumerate_branches, field_basis, prepare_basis

from conftest import field

TOL = 1e-9


def basis_input(spec, x):
    a = np.zeros(spec.q, dtype=complex)
    a[x] = 1
    return StateVector((field_basis(spec),), a)


def random_input(spec, rng):
    a = np.zeros(spec.q, dtype=complex)
    a[1:] = rng.normal(size=spec.q - 1) + 1j * rng.normal(size=spec.q - 1)
    return StateVector((field_basis(spec),), a / np.linalg.norm(a))


def test_mod_inverse_example():
    assert dp.mod_inverse(3, 7) == 5


@given(st.integers(1, 500), st.integers(2, 500))
def test_mod_inverse_matches_builtin(m, n):
    if math.gcd(m, n) == 1:
        assert dp.mod_inverse(m, n) == pow(m, -1, n)
    else:
        with pytest.raises(NotInvertibleError):
            dp.mod_inverse(m, n)


def test_v_acts_on_basis_states():
    spec = field(7)
    factors = dp.register_factors(spec)
    for r, x, s in [(0, 3, 2), (4, 5, 1), (2, 1, 0)]:
        st_ = prepare_basis(factors, (r, x, s, 0))
        out = dp.apply_v(spec, st_)
        target = ff.mul(spec, ff.power(spec, x, r), ff.power(spec, spec.generator, s))
        assert abs(out.amplitude(r, x, s, target) - 1) < TOL


@pytest.mark.parametrize("pn", [(2, 2), (5, 1), (7, 1), (2, 3)])
def test_branches_on_random_inputs(pn, rng):
    spec = field(*pn)
    m = spec.order
    for k in range(m):
        inp = random_input(spec, rng)
        want = sp.t_k_phases(spec, k) * inp.amps
        p_ok = 0.0
        for trace, out in dp.t_k_branches(spec, k, inp):
            assert trace.invertible == (math.gcd(trace.m, m) == 1)
            if out is None:
                continue
            p_ok += trace.probability
            assert abs(abs(np.vdot(want, out.amps)) - 1) < TOL
        assert abs(p_ok - sum(math.gcd(j, m) == 1 for j in range(m)) / m) < TOL


def test_residual_register_order():
    # after measuring S and Z the first register holds m L(x) and the second x
    spec = field(7)
    m = spec.order
    inp = random_input(spec, np.random.default_rng(0))
    st_ = dp.prepare_measurement(spec, inp)
    for rec_m, st_m in enumerate_branches(st_, 2):
        for _, rest in enumerate_branches(st_m, 2):
            t = rest.tensor()
            for j, x in enumerate(spec.exp_table):
                l = (rec_m.index * j) % m
                col = np.abs(t[:, j])
                assert np.all(col[np.arange(m) != l] < 1e-9)
                assert abs(col[l] - abs(inp.amps[x])) < 1e-9


def test_sampled_subroutine_success_and_failure():
    spec = field(2, 3)  # q - 1 = 7 is prime: only m = 0 fails
    rng = np.random.default_rng(11)
    outcomes = {"ok": 0, "fail": 0}
    for _ in range(300):
        inp = random_input(spec, rng)
        try:
            out, trace = dp.t_k_subroutine(spec, 3, inp, rng)
        except PhaseOracleFailed as exc:
            assert exc.trace.m == 0 and not exc.trace.invertible
            outcomes["fail"] += 1
            continue
        assert trace.m_inverse * trace.m % 7 == 1
        assert abs(abs(np.vdot(sp.t_k_phases(spec, 3) * inp.amps, out.amps)) - 1) < TOL
        outcomes["ok"] += 1
    assert outcomes["fail"] > 0
    assert abs(outcomes["ok"] / 300 - 6 / 7) < 0.07


def test_input_must_avoid_zero():
    spec = field(5)
    with pytest.raises(ValueError):
        dp.t_k_branches(spec, 1, basis_input(spec, 0))
    with pytest.raises(ValueError):
        dp.t_k_subroutine(spec, 9, basis_input(spec, 1), np.random.default_rng(0))


def test_trace_records_two_transforms():
    spec = field(5)
    trace, _ = dp.t_k_branches(spec, 1, basis_input(spec, 2))[0]
    assert trace.mult_qft_count == 2
    assert set(trace.to_dict()) == {"m", "z", "gcd", "invertible", "m_inverse",
                                    "mult_qft_count", "probability"}


@pytest.mark.parametrize("pn", [(2, 2), (5, 1), (7, 1), (2, 3)])
def test_registers_before_measurement_closed_form(pn, rng):
    # (1/(q-1)) sum_x a_x sum_{z,m} zeta^(m z) |m L(x)>|x>|m>|u^z>
    spec = field(*pn)
    m = spec.order
    inp = random_input(spec, rng)
    want = np.zeros((m, m, m, spec.q), dtype=complex)
    for j, x in enumerate(spec.exp_table):
        for mm, z in np.ndindex(m, m):
            want[(mm * j) % m, j, mm, spec.exp_table[z]] += (
                inp.amps[x] * np.exp(2j * np.pi * (mm * z % m) / m) / m)
    got = dp.prepare_measurement(spec, inp).tensor()
    assert np.allclose(got, want, atol=TOL)


def test_m_uniform_and_z_irrelevant(rng):
    spec = field(2, 3)
    m = spec.order
    inp = random_input(spec, rng)
    branches = dp.t_k_branches(spec, 2, inp)
    by_m = {}
    for trace, out in branches:
        by_m.setdefault(trace.m, []).append((trace, out))
    assert sorted(by_m) == list(range(m))
    for mm, group in by_m.items():
        assert abs(sum(t.probability for t, _ in group) - 1 / m) < TOL
        outs = [o for _, o in group if o is not None]
        for o in outs[1:]:
            assert abs(abs(np.vdot(outs[0].amps, o.amps)) - 1) < TOL
