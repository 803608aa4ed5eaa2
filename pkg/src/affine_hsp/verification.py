"""Invariant suites run by ``affine-hsp verify``.

Each check returns a :class:`Check`; a suite is a list of them.  Checks are
exhaustive over the field, so the driver restricts them to q <= 16.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import affine_group as ag
from . import finite_field as ff
from . import hsp_pipeline as hp
from . import spectra as sp
from .dlog_phase import t_k_branches
from .number_theory import totient
from .statevector import StateVector, field_basis

EXHAUSTIVE_LIMIT = 16
TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def field_checks(spec, modulus=None):
    modulus = spec.modulus if modulus is None else tuple(modulus)
    irreducible = ff.is_irreducible(modulus, spec.p)
    out = [Check("modulus_irreducible", irreducible, ",".join(map(str, modulus)))]
    if not irreducible:
        return out
    q = spec.q
    out.append(Check("generator_order",
                     ff.multiplicative_order(spec, spec.generator) == q - 1))
    logs = spec.dlog_table[1:]
    bij = sorted(logs.tolist()) == list(range(q - 1)) and all(
        ff.generator_power(spec, spec.dlog_table[x]) == x for x in range(1, q))
    out.append(Check("dlog_bijection", bij))
    xs = np.arange(q)
    tr = spec.trace_table
    add_ok = np.array_equal(
        tr[ff.add(spec, xs[:, None], xs[None, :])], (tr[:, None] + tr[None, :]) % spec.p)
    out.append(Check("trace_additive", bool(add_ok)))
    out.append(Check("trace_frobenius",
                     bool(np.array_equal(tr[ff.power(spec, xs, spec.p)], tr))))
    return out


def group_checks(spec):
    q, u = spec.q, spec.generator
    out = []
    inj = True
    for b in range(1, q):
        seconds = [c.b for c in ag.cyclic_subgroup(spec, b)]
        inj &= len(set(seconds)) == len(seconds)
    out.append(Check("translation_parts_distinct", inj))

    conj_ok = True
    for b in range(q):
        h = ag.AffineElement(1, ag.fixed_point(spec, b))
        conj = {ag.conjugate(spec, h, c) for c in ag.cyclic_subgroup(spec, 0)}
        conj_ok &= conj == set(ag.cyclic_subgroup(spec, b))
    out.append(Check("subgroups_conjugate_to_diagonal", conj_ok, "h = (1, b/(1-u))"))

    found = ag.enumerate_maximal_nonnormal_cyclic(spec)
    expected = {frozenset(ag.cyclic_subgroup(spec, b)) for b in range(q)}
    out.append(Check("maximal_nonnormal_cyclic_are_c_b", found == expected,
                     f"{len(found)} subgroups found"))

    norm = sum((ag.fixed_point_count(spec, g) - 1) ** 2 for g in ag.all_elements(spec))
    out.append(Check("pi0_irreducible_character_norm", norm == ag.group_order(spec)))

    lr_ok = True
    for g in ag.all_elements(spec):
        perm = ag.left_regular_permutation(spec, g)
        pi1 = np.array([(j + ff.discrete_log(spec, g.a)) % spec.order
                        for j in range(spec.order)])
        pi = ag.rep_pi(spec, g)
        lr_ok &= np.array_equal(perm, (pi1[:, None] * q + pi[None, :]).reshape(-1))
    out.append(Check("left_regular_factorization", bool(lr_ok)))
    return out


def spectra_checks(spec):
    q, m = spec.q, spec.order
    out = []
    fm, fa = sp.mult_qft(spec), sp.add_qft(spec)
    out.append(Check("mult_qft_unitary", np.allclose(fm.conj().T @ fm, np.eye(m), atol=TOL)))
    out.append(Check("add_qft_unitary", np.allclose(fa.conj().T @ fa, np.eye(q), atol=TOL)))

    eig_ok = True
    basis0 = _sum_zero_basis(q)
    for b in range(q):
        v = ag.fixed_point(spec, b)
        perm_mat = ag.permutation_matrix(ag.rep_pi(spec, ag.AffineElement(spec.generator, b)))
        psi = sp.wavelet_psi_amplitudes(spec, v)
        eig_ok &= np.allclose(perm_mat @ psi, psi, atol=TOL)
        eig_ok &= abs(abs(psi[v]) ** 2 - (q - 1) / q) < TOL
        restricted = basis0.conj().T @ perm_mat @ basis0
        sv = np.linalg.svd(restricted - np.eye(q - 1), compute_uv=False)
        eig_ok &= int(np.sum(sv < 1e-8)) == 1
        for k in range(1, m):
            phi = sp.wavelet_phi_amplitudes(spec, k, v)
            eig_ok &= np.allclose(perm_mat @ phi, sp.zeta(spec) ** k * phi, atol=TOL)
    out.append(Check("wavelet_eigenvectors", bool(eig_ok)))

    gauss_ok = True
    for j in range(1, m):
        gs = {t: sp.gauss_sum(spec, j, t) for t in range(1, q)}
        for z, t in itertools.product(range(1, q), repeat=2):
            rhs = sp.mult_character(spec, j, ff.div(spec, t, z))
            gauss_ok &= abs(gs[z] * np.conj(gs[t]) - rhs) < TOL
    out.append(Check("gauss_sum_product", bool(gauss_ok), "G(j,z) conj G(j,t) = chi_j(t/z)"))

    g0 = all(abs(sp.gauss_sum(spec, 0, z) * np.conj(sp.gauss_sum(spec, 0, t)) - 1 / q) < TOL
             for z in range(1, q) for t in range(1, q))
    out.append(Check("gauss_sum_trivial_character", g0, "product is 1/q for j = 0"))

    chain = True
    for k in range(1, m):
        gs = np.array([sp.gauss_sum(spec, k, t) for t in range(q)])
        for b in range(q):
            lhs = fa @ sp.wavelet_phi_amplitudes(spec, -k, b)
            rhs = gs * sp.add_character(spec, ff.mul(spec, np.arange(q), b)) / np.sqrt(m)
            rhs[0] = 0
            chain &= np.allclose(lhs, rhs, atol=TOL)
    out.append(Check("additive_transform_of_wavelet", bool(chain)))
    return out


def _sum_zero_basis(q):
    """Orthonormal basis (columns) of the sum-zero subspace of C^q."""
    m = np.eye(q) - np.full((q, q), 1 / q)
    uu, s, _ = np.linalg.svd(m)
    return uu[:, : q - 1]


def pipeline_checks(spec, oracle_seed=0):
    q = spec.q
    out = []
    closed = orth = True
    for b in range(q):
        for g in ag.all_elements(spec):
            got = hp.mult_fourier_stage(spec, hp.coset_state_of(spec, b, g)).amps
            want = hp.mult_stage_closed_form(spec, b, g)
            closed &= np.allclose(got, want, atol=TOL)
            w = want.reshape(spec.order, q)
            first = np.zeros_like(w)
            first[0] = w[0]
            orth &= abs(np.vdot(first.reshape(-1), (w - first).reshape(-1))) < TOL
    out.append(Check("mult_transform_closed_form", bool(closed)))
    out.append(Check("closed_form_terms_orthogonal", bool(orth)))

    oracle = ag.make_coset_oracle(spec, q - 1, oracle_seed)
    exact = hp.exact_success_probability(spec, oracle)
    bound = hp.assumed_branch_bound(q)
    out.append(Check("success_probability_bound", exact >= bound - TOL,
                     f"exact {exact:.6f} >= {bound:.6f}"))

    sound = all(hp.verify_candidate(spec, oracle, b)[0] == (b == oracle.hidden_b)
                for b in range(q))
    out.append(Check("verifier_sound", sound))
    return out


def dlog_checks(spec, seed=0):
    q, m = spec.q, spec.order
    rng = np.random.default_rng(seed)
    ok = prob_ok = True
    for k in range(m):
        a = np.zeros(q, dtype=complex)
        a[spec.exp_table] = rng.normal(size=m) + 1j * rng.normal(size=m)
        a /= np.linalg.norm(a)
        inp = StateVector((field_basis(spec),), a)
        want = sp.t_k_phases(spec, k) * a
        p_inv = 0.0
        for trace, result in t_k_branches(spec, k, inp):
            if result is None:
                continue
            p_inv += trace.probability
            ok &= abs(abs(np.vdot(want, result.amps)) - 1) < TOL
        prob_ok &= abs(p_inv - totient(m) / m) < TOL if m > 1 else True
    out = [
        Check("phase_subroutine_matches_diagonal", bool(ok)),
        Check("phase_subroutine_success_probability", bool(prob_ok),
              f"phi({m})/{m} = {totient(m) / m:.6f}" if m > 1 else ""),
    ]
    return out


SUITES = {
    "field": field_checks,
    "group": group_checks,
    "spectra": spectra_checks,
    "pipeline": pipeline_checks,
    "dlog": dlog_checks,
}


def run_all(spec, modulus=None) -> dict[str, list[Check]]:
    results = {"field": field_checks(spec, modulus)}
    if not all(c.passed for c in results["field"]):
        return results
    for name, fn in SUITES.items():
        if name != "field":
            results[name] = fn(spec)
    return results
