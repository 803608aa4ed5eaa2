"""Dense state vectors over labelled tensor products of finite bases.

A :class:`StateVector` is a tuple of :class:`Basis` factors and a flat
complex amplitude array in row-major factor order.  Every operation returns
a new state; measurement removes the measured factor (measure-and-discard).

Operations accepted by :func:`apply_on_factor`:

* a 2-D array: a unitary on that factor;
* a 1-D integer array ``perm``: the basis permutation |i> -> |perm[i]>;
* a callable ``fn(idx)``: a classical reversible update of the factor,
  where ``idx`` is the tuple of index grids of *all* factors (as from
  ``np.indices``) and the return value is the new index of the target
  factor.  This is how controlled updates such as |g>|x> -> |g>|x+f(g)>
  are expressed.

Seeding: trial ``i`` of a run with master seed ``s`` draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))`` (see :func:`trial_rng`).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    DimensionTooLargeError,
    NonUnitaryError,
    NormalizationError,
    UnknownLabelError,
)

DEFAULT_TOL = 1e-9
UNITARY_TOL = 1e-6
PROB_CUTOFF = 1e-12
DEFAULT_MAX_DIM = 2**24


def max_dimension() -> int:
    return int(os.environ.get("AFFINE_HSP_MAX_DIM", DEFAULT_MAX_DIM))


@dataclass(frozen=True)
class Basis:
    """A named finite basis with a fixed ordering of its labels."""

    name: str
    labels: tuple
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_lookup", {lab: i for i, lab in enumerate(self.labels)})

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._lookup[label]
        except KeyError:
            raise UnknownLabelError(f"{label!r} is not a label of basis {self.name}") from None


def field_basis(spec) -> Basis:
    return Basis("F", tuple(range(spec.q)))


def units_basis(spec) -> Basis:
    """F^x ordered u^0, ..., u^{q-2}; labels are the field elements."""
    return Basis("F*", tuple(int(x) for x in spec.exp_table))


def cyclic_basis(m: int, name: str | None = None) -> Basis:
    return Basis(name or f"Z/{m}", tuple(range(m)))


@dataclass(frozen=True, eq=False)
class StateVector:
    factors: tuple[Basis, ...]
    amps: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        factors = tuple(self.factors)
        amps = np.ascontiguousarray(self.amps, dtype=complex).reshape(-1)
        dim = math.prod(len(f) for f in factors)
        if dim > max_dimension():
            raise DimensionTooLargeError(f"{dim} amplitudes exceed cap {max_dimension()}")
        if amps.size != dim:
            raise DimensionMismatchError(f"{amps.size} amplitudes for dimension {dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > self.tol:
            raise NormalizationError(f"state norm {norm!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "amps", amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def inner(self, other: "StateVector") -> complex:
        _check_same_structure(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def marginal(self, factor: int) -> np.ndarray:
        t = np.abs(self.tensor()) ** 2
        axes = tuple(i for i in range(len(self.factors)) if i != factor)
        return t.sum(axis=axes)

    def amplitude(self, *labels) -> complex:
        idx = tuple(f.index(lab) for f, lab in zip(self.factors, labels))
        return complex(self.tensor()[idx])

    def kron(self, other: "StateVector") -> "StateVector":
        return StateVector(self.factors + other.factors, np.kron(self.amps, other.amps), self.tol)


@dataclass(frozen=True)
class MeasurementRecord:
    factor: int
    index: int
    label: object
    probability: float


def _check_same_structure(s1, s2):
    if s1.dims != s2.dims:
        raise DimensionMismatchError(f"factor structure {s1.dims} vs {s2.dims}")


def _renormalize(amps):
    return amps / np.linalg.norm(amps)


# -- preparation ----------------------------------------------------------------

def prepare_basis(factors: Sequence[Basis], labels: Sequence) -> StateVector:
    """The product basis state |labels[0]> (x) |labels[1]> (x) ..."""
    factors = tuple(factors)
    if len(labels) != len(factors):
        raise DimensionMismatchError("one label per factor required")
    dims = tuple(len(f) for f in factors)
    amps = np.zeros(dims, dtype=complex)
    amps[tuple(f.index(lab) for f, lab in zip(factors, labels))] = 1.0
    return StateVector(factors, amps)


def prepare_uniform(factors: Sequence[Basis], pinned: dict | None = None) -> StateVector:
    """Product state, uniform on each factor except those in ``pinned``
    (factor index -> label), which are delta states."""
    pinned = pinned or {}
    vecs = []
    for i, f in enumerate(factors):
        if i in pinned:
            v = np.zeros(len(f), dtype=complex)
            v[f.index(pinned[i])] = 1.0
        else:
            v = np.full(len(f), 1 / np.sqrt(len(f)), dtype=complex)
        vecs.append(v)
    amps = np.ones(1, dtype=complex)
    for v in vecs:
        amps = np.kron(amps, v)
    return StateVector(tuple(factors), amps)


def from_amplitudes(factors: Sequence[Basis], amps, normalize: bool = False) -> StateVector:
    amps = np.asarray(amps, dtype=complex).reshape(-1)
    if normalize:
        amps = _renormalize(amps)
    return StateVector(tuple(factors), amps)


# -- evolution ---------------------------------------------------------------

def _apply_matrix(state, i, u):
    d = state.dims[i]
    if u.shape != (d, d):
        raise DimensionMismatchError(f"operator {u.shape} on factor of size {d}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(d))) if d else 0.0
    if err > UNITARY_TOL:
        raise NonUnitaryError(f"||U^dag U - I||_inf = {err:.3g}")
    t = np.moveaxis(state.tensor(), i, 0)
    t = np.tensordot(u, t, axes=(1, 0))
    return np.moveaxis(t, 0, i)


def apply_permutation(
    state: StateVector,
    fn: Callable[[tuple], tuple],
    new_factors: Sequence[Basis] | None = None,
) -> StateVector:
    """Joint classical reversible map on all factors.

    ``fn(idx)`` gets the index grids of the current factors and returns the
    index grids of the image in ``new_factors`` (default: unchanged factors,
    which must have identical dimensions).  Raises if the map is not a
    bijection of the basis.
    """
    new_factors = tuple(new_factors) if new_factors is not None else state.factors
    new_dims = tuple(len(f) for f in new_factors)
    if math.prod(new_dims) != state.amps.size:
        raise DimensionMismatchError("relabelling must preserve the dimension")
    idx = np.indices(state.dims)
    image = tuple(np.broadcast_to(np.asarray(a), state.dims) for a in fn(tuple(idx)))
    if len(image) != len(new_dims):
        raise DimensionMismatchError("map must return one index grid per new factor")
    flat = np.ravel_multi_index(image, new_dims, mode="raise").reshape(-1)
    if np.unique(flat).size != flat.size:
        raise NonUnitaryError("classical map is not reversible")
    out = np.zeros(state.amps.size, dtype=complex)
    out[flat] = state.amps
    return StateVector(new_factors, out, state.tol)


def apply_on_factor(state: StateVector, i: int, op) -> StateVector:
    if callable(op):
        def joint(idx):
            new = list(idx)
            new[i] = op(idx)
            return tuple(new)
        return apply_permutation(state, joint)
    op = np.asarray(op)
    if op.ndim == 1:
        perm = op.astype(np.int64)
        if perm.size != state.dims[i]:
            raise DimensionMismatchError(f"permutation of size {perm.size} on factor {state.dims[i]}")
        return apply_on_factor(state, i, lambda idx: perm[idx[i]])
    return StateVector(state.factors, _apply_matrix(state, i, op), state.tol)


def apply_diagonal(state: StateVector, phases) -> StateVector:
    """Multiply by unit-modulus ``phases`` (broadcast to the full tensor shape).

    ``phases`` may be a callable receiving the index grids.
    """
    if callable(phases):
        phases = phases(tuple(np.indices(state.dims)))
    phases = np.broadcast_to(np.asarray(phases, dtype=complex), state.dims)
    if np.max(np.abs(np.abs(phases) - 1.0)) > UNITARY_TOL:
        raise NonUnitaryError("diagonal entries must have unit modulus")
    return StateVector(state.factors, state.tensor() * phases, state.tol)


# -- measurement -------------------------------------------------------------

def _collapse(state, i, k):
    t = np.take(state.tensor(), k, axis=i)
    factors = state.factors[:i] + state.factors[i + 1:]
    return StateVector(factors, _renormalize(t.reshape(-1)), state.tol)


def measure_factor(state: StateVector, i: int, rng: np.random.Generator):
    """Sample factor ``i``, discard it, return (record, collapsed state)."""
    probs = state.marginal(i)
    probs = probs / probs.sum()
    k = int(rng.choice(probs.size, p=probs))
    rec = MeasurementRecord(i, k, state.factors[i].labels[k], float(probs[k]))
    return rec, _collapse(state, i, k)


def enumerate_branches(state: StateVector, i: int):
    """Every outcome of measuring factor ``i``: list of (record, collapsed state)."""
    probs = state.marginal(i)
    out = []
    for k in np.flatnonzero(probs > PROB_CUTOFF):
        k = int(k)
        rec = MeasurementRecord(i, k, state.factors[i].labels[k], float(probs[k]))
        out.append((rec, _collapse(state, i, k)))
    return out


def equal_up_to_phase(s1: StateVector, s2: StateVector, tol: float = DEFAULT_TOL) -> bool:
    _check_same_structure(s1, s2)
    return abs(np.vdot(s1.amps, s2.amps)) >= 1.0 - tol


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Private 64-bit stream for one trial, split from the master seed."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(trial_index,)))
    )
