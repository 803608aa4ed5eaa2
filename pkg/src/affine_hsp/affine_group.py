"""The affine group G = {x -> ax + b} of a finite field.

A group element ``(a, b)`` stands for the matrix [[a, b], [0, 1]].  The
computational basis of L^2(G) is ordered ``|u^j> (x) |x>``, so the element
``(u^j, x)`` has flat index ``j * q + x`` (see :func:`element_index`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import finite_field as ff
from .errors import FieldTooLargeError
from .finite_field import FieldSpec

ENUMERATION_LIMIT = 64


class AffineElement(NamedTuple):
    a: int
    b: int

    def describe(self, spec: FieldSpec) -> str:
        fmt = lambda x: ",".join(map(str, ff.coeffs(spec, x)))  # noqa: E731
        return f"(a={fmt(self.a)}, b={fmt(self.b)})"


IDENTITY = AffineElement(1, 0)


def group_mul(spec: FieldSpec, g: AffineElement, h: AffineElement) -> AffineElement:
    a1, b1 = g
    a2, b2 = h
    return AffineElement(ff.mul(spec, a1, a2), ff.add(spec, ff.mul(spec, a1, b2), b1))


def group_inv(spec: FieldSpec, g: AffineElement) -> AffineElement:
    ai = ff.inv(spec, g.a)
    return AffineElement(ai, ff.neg(spec, ff.mul(spec, ai, g.b)))


def group_power(spec: FieldSpec, g: AffineElement, k: int) -> AffineElement:
    if k < 0:
        g, k = group_inv(spec, g), -k
    out = IDENTITY
    while k:
        if k & 1:
            out = group_mul(spec, out, g)
        g = group_mul(spec, g, g)
        k >>= 1
    return out


def conjugate(spec, h, g):
    """h g h^{-1}."""
    return group_mul(spec, group_mul(spec, h, g), group_inv(spec, h))


def group_order(spec: FieldSpec) -> int:
    return spec.q * spec.order


def all_elements(spec: FieldSpec) -> list[AffineElement]:
    """Every element, in flat-index order."""
    return [AffineElement(int(a), x) for a in spec.exp_table for x in range(spec.q)]


def element_index(spec: FieldSpec, g: AffineElement) -> int:
    return ff.discrete_log(spec, g.a) * spec.q + g.b


def element_at(spec: FieldSpec, index: int) -> AffineElement:
    j, x = divmod(index, spec.q)
    return AffineElement(int(spec.exp_table[j]), x)


def cyclic_subgroup(spec: FieldSpec, b: int) -> list[AffineElement]:
    """Powers k = 0..q-2 of (u, b): the k-th is (u^k, (1 + u + ... + u^{k-1}) b).

    The geometric sum equals (1 - u^k)/(1 - u) b whenever u != 1.
    """
    out = []
    s = 0
    for k in range(spec.order):
        uk = int(spec.exp_table[k])
        out.append(AffineElement(uk, ff.mul(spec, s, b)))
        s = ff.add(spec, s, uk)
    return out


def fixed_point(spec: FieldSpec, b: int) -> int:
    """b/(1-u): the unique point fixed by every element of C_b (q > 2)."""
    return ff.div(spec, b, ff.sub(spec, 1, spec.generator))


def subgroup_from_fixed_point(spec: FieldSpec, v: int) -> int:
    """Inverse of :func:`fixed_point`: b = (1-u) v."""
    return ff.mul(spec, ff.sub(spec, 1, spec.generator), v)


def generated_subgroup(spec: FieldSpec, gens) -> frozenset:
    """Closure of ``gens`` under multiplication (finite, so a subgroup)."""
    gens = list(gens)
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group_mul(spec, x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def is_normal(spec: FieldSpec, subgroup, generator=None) -> bool:
    """Normal iff conjugating a generating set by generators of G stays inside."""
    gens = [generator] if generator is not None else list(subgroup)
    g_gens = [AffineElement(spec.generator, 0), AffineElement(1, 1)]
    return all(conjugate(spec, h, c) in subgroup for h in g_gens for c in gens)


def is_maximal(spec: FieldSpec, subgroup, generator) -> bool:
    """No proper subgroup of G strictly contains ``subgroup``.

    Equivalent to <H, g> = G for every g outside H; one g per right coset
    H g suffices.
    """
    total = group_order(spec)
    if len(subgroup) == total:
        return False
    covered = set(subgroup)
    for g in all_elements(spec):
        if g in covered:
            continue
        if len(generated_subgroup(spec, [generator, g])) != total:
            return False
        covered.update(group_mul(spec, c, g) for c in subgroup)
    return True


def enumerate_maximal_nonnormal_cyclic(spec: FieldSpec) -> set[frozenset]:
    """Brute force: every cyclic subgroup of G that is maximal and not normal."""
    if spec.q > ENUMERATION_LIMIT:
        raise FieldTooLargeError(
            f"subgroup enumeration is limited to q <= {ENUMERATION_LIMIT}"
        )
    cyclic: dict[frozenset, AffineElement] = {}
    for g in all_elements(spec):
        h = generated_subgroup(spec, [g])
        cyclic.setdefault(h, g)
    return {
        h for h, g in cyclic.items()
        if not is_normal(spec, h, g) and is_maximal(spec, h, g)
    }


def canonical_key(spec: FieldSpec, g: AffineElement):
    return (ff.discrete_log(spec, g.a), ff.lex_key(spec, g.b))


@dataclass(frozen=True, eq=False)
class HiddenOracle:
    """Classical function on G constant exactly on the right cosets C_b g.

    ``labels[element_index(g)]`` is the value at ``g``.
    """

    hidden_b: int
    labels: np.ndarray

    def __call__(self, spec: FieldSpec, g: AffineElement) -> int:
        return int(self.labels[element_index(spec, g)])


def right_cosets(spec: FieldSpec, b: int) -> list[list[AffineElement]]:
    """Right cosets C_b g in canonical order (by their minimal element)."""
    sub = cyclic_subgroup(spec, b)
    seen: set[AffineElement] = set()
    cosets = []
    for g in all_elements(spec):
        if g in seen:
            continue
        coset = [group_mul(spec, c, g) for c in sub]
        seen.update(coset)
        cosets.append(coset)
    cosets.sort(key=lambda cs: min(canonical_key(spec, x) for x in cs))
    return cosets


def make_coset_oracle(spec: FieldSpec, hidden_b: int, seed: int) -> HiddenOracle:
    """Label the q right cosets of C_{hidden_b} by a seeded permutation of 0..q-1."""
    perm = np.random.default_rng(seed).permutation(spec.q)
    labels = np.empty(group_order(spec), dtype=np.int64)
    for i, coset in enumerate(right_cosets(spec, hidden_b)):
        for g in coset:
            labels[element_index(spec, g)] = perm[i]
    labels.setflags(write=False)
    return HiddenOracle(int(hidden_b), labels)


def rep_pi(spec: FieldSpec, g: AffineElement) -> np.ndarray:
    """Basis permutation of L^2(F): entry x holds a x + b."""
    xs = np.arange(spec.q)
    return np.asarray(ff.add(spec, ff.mul(spec, g.a, xs), g.b))


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    """Matrix sending basis vector |i> to |perm[i]>."""
    m = np.zeros((len(perm), len(perm)))
    m[perm, np.arange(len(perm))] = 1.0
    return m


def fixed_point_count(spec: FieldSpec, g: AffineElement) -> int:
    return int(np.count_nonzero(rep_pi(spec, g) == np.arange(spec.q)))


def left_regular_permutation(spec: FieldSpec, g: AffineElement) -> np.ndarray:
    """Entry i holds the flat index of g * element_at(i)."""
    out = np.empty(group_order(spec), dtype=np.int64)
    for i, h in enumerate(all_elements(spec)):
        out[i] = element_index(spec, group_mul(spec, g, h))
    return out
