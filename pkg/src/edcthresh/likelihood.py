"""Stabilizer states augmented with syndrome-likelihood arrays.

A noisy stabilizer state is a generator matrix Q together with an array of
2^r likelihoods, one per syndrome value, index packed little-endian with row 0
at bit 0. The four core operations are adding a qubit, applying an error-free
Clifford gate, convolving an error-location model into the syndrome array, and
projecting a qubit onto |0> or |+> with postselection. Row transforms permute
the syndrome array alongside the generator matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from .symplectic import (
    GeneratorMatrix,
    PauliProduct,
    commutes,
    conjugate_by_gate,
    flip_pattern,
    multiply,
    multiply_many,
    solve_product,
)

Z0 = "Z0"
XPLUS = "Xplus"


class ZeroAcceptanceError(RuntimeError):
    """Raised when postselection removes all likelihood mass."""


class StructuralProjectionError(ValueError):
    """Raised when a commuting projection operator is not in the row span."""


@dataclass(frozen=True)
class NoisyStabilizerState:
    Q: GeneratorMatrix
    dist: Any
    backend: Any

    def __post_init__(self):
        if len(self.dist) != 1 << self.Q.r:
            raise ValueError("distribution length must be 2^rows")

    @property
    def n(self) -> int:
        return self.Q.n

    def dump(self) -> str:
        """Deterministic debug dump: rows plus nonzero (bits, scalar) pairs."""
        lines = [" ".join(self.Q.to_strings()) or "(no rows)"]
        r = self.Q.r
        for s in range(len(self.dist)):
            v = self.dist[s]
            if not self.backend.is_zero(v):
                bits = format(s, f"0{max(r, 1)}b")[::-1]
                lines.append(f"{bits} {v}")
        return "\n".join(lines)


def empty_state(backend) -> NoisyStabilizerState:
    return NoisyStabilizerState(GeneratorMatrix(0, ()), backend.delta(0), backend)


_IDX_CACHE: dict = {}


def _indices(n: int) -> np.ndarray:
    idx = _IDX_CACHE.get(n)
    if idx is None:
        idx = np.arange(n, dtype=np.intp)
        _IDX_CACHE[n] = idx
    return idx


def _basis_pauli(basis: str, n: int, qubit: int) -> PauliProduct:
    if basis == Z0:
        return PauliProduct.single(n, qubit, "Z")
    if basis == XPLUS:
        return PauliProduct.single(n, qubit, "X")
    raise ValueError(f"unknown basis {basis!r}")


def add_qubit(state: NoisyStabilizerState, basis: str) -> NoisyStabilizerState:
    """Append a fresh qubit in |0> or |+>; the new row is its Z or X operator."""
    n = state.n
    rows = [PauliProduct(n + 1, p.x_bits, p.z_bits) for p in state.Q.rows]
    rows.append(_basis_pauli(basis, n + 1, n))
    dist = state.backend.extend_double(state.dist)
    return NoisyStabilizerState(GeneratorMatrix(n + 1, tuple(rows)), dist, state.backend)


def apply_gate(state: NoisyStabilizerState, gate: tuple) -> NoisyStabilizerState:
    """Conjugate every row by an error-free gate.

    A -1 conjugation sign on row i complements syndrome bit i, realized as the
    index remap new[s] = old[s ^ e]; the array is otherwise untouched.
    """
    rows = []
    flips = 0
    for i, row in enumerate(state.Q.rows):
        new_row, sign = conjugate_by_gate(row, gate)
        rows.append(new_row)
        flips |= sign << i
    dist = state.dist
    if flips:
        dist = dist[_indices(len(dist)) ^ flips]
    return NoisyStabilizerState(GeneratorMatrix(state.n, tuple(rows)), dist, state.backend)


def apply_pauli_likelihoods(
    state: NoisyStabilizerState, entries: Sequence
) -> NoisyStabilizerState:
    """Convolve a list of (PauliProduct, likelihood) insertions into the array.

    The identity insertion with likelihood 1 is implicit:
    new[s] = old[s] + sum_p e_p * old[s ^ flip_pattern(Q, p)].
    """
    backend = state.backend
    dist = state.dist
    idx = _indices(len(dist))
    new = dist.copy()
    for pauli, value in entries:
        scalar = backend.scalar(value)
        if backend.is_zero(scalar):
            continue
        pattern = flip_pattern(state.Q, pauli)
        new = new + scalar * dist[idx ^ pattern]
    return NoisyStabilizerState(state.Q, new, backend)


def apply_error_location(
    state: NoisyStabilizerState, model, qubits: Sequence[int]
) -> NoisyStabilizerState:
    """Apply a one- or two-qubit error-location model on the given qubits."""
    if model.arity != len(qubits):
        raise ValueError(f"model arity {model.arity} != {len(qubits)} qubits")
    entries = [
        (p.embed(state.n, qubits), value) for p, value in model.pauli_entries()
    ]
    return apply_pauli_likelihoods(state, entries)


def row_transform(state: NoisyStabilizerState, op: tuple) -> NoisyStabilizerState:
    """Apply add_row(i, j) (row i <- row i * row j) or swap_rows(i, j)."""
    kind = op[0]
    if kind == "add_row":
        return _add_row(state, op[1], op[2])
    if kind == "swap_rows":
        return _swap_rows(state, op[1], op[2])
    raise ValueError(f"unknown row transform {op!r}")


def _add_row(state: NoisyStabilizerState, i: int, j: int) -> NoisyStabilizerState:
    if i == j:
        raise ValueError("add_row requires distinct rows")
    r = state.Q.r
    if not (0 <= i < r and 0 <= j < r):
        raise ValueError("row index out of range")
    product, sign = multiply(state.Q.rows[i], state.Q.rows[j])
    rows = list(state.Q.rows)
    rows[i] = product
    idx = _indices(len(state.dist))
    src = idx ^ ((((idx >> j) & 1) ^ sign) << i)
    dist = state.dist[src]
    return NoisyStabilizerState(GeneratorMatrix(state.n, tuple(rows)), dist, state.backend)


def _swap_rows(state: NoisyStabilizerState, i: int, j: int) -> NoisyStabilizerState:
    if i == j:
        raise ValueError("swap_rows requires distinct rows")
    rows = list(state.Q.rows)
    rows[i], rows[j] = rows[j], rows[i]
    idx = _indices(len(state.dist))
    diff = ((idx >> i) ^ (idx >> j)) & 1
    src = idx ^ (diff << i) ^ (diff << j)
    dist = state.dist[src]
    return NoisyStabilizerState(GeneratorMatrix(state.n, tuple(rows)), dist, state.backend)


def _delete_qubit_columns(rows: Sequence[PauliProduct], qubit: int) -> tuple:
    out = []
    low = (1 << qubit) - 1
    for p in rows:
        x = (p.x_bits & low) | ((p.x_bits >> (qubit + 1)) << qubit)
        z = (p.z_bits & low) | ((p.z_bits >> (qubit + 1)) << qubit)
        out.append(PauliProduct(p.n - 1, x, z))
    return tuple(out)


def project_qubit(
    state: NoisyStabilizerState, qubit: int, basis: str
) -> NoisyStabilizerState:
    """Project a qubit onto |0> or |+> and delete it.

    Case 1 (some row anticommutes with the projector): row-transform so only
    the last row anticommutes, then sum the two likelihoods of its eigenvalues.
    Case 2 (all rows commute): row-transform so the last row is exactly the
    projector and keep only its +1-eigenvalue entries (postselection).
    Either way the last row and the qubit's columns are removed, after the
    remaining rows' components on the qubit are cleared with the +1 projector.
    """
    if not 0 <= qubit < state.n:
        raise ValueError(f"qubit {qubit} out of range")
    m = _basis_pauli(basis, state.n, qubit)
    anti = [i for i, row in enumerate(state.Q.rows) if not commutes(row, m)]
    if anti:
        pivot = anti[0]
        for i in anti[1:]:
            state = _add_row(state, i, pivot)
        r = state.Q.r
        if pivot != r - 1:
            state = _swap_rows(state, pivot, r - 1)
        half = len(state.dist) >> 1
        dist = state.dist[:half] + state.dist[half:]
    else:
        subset = solve_product(state.Q.rows, m)
        if subset is None:
            raise StructuralProjectionError(
                f"projector {m} on qubit {qubit} is not in the row span"
            )
        pivot = max(subset)
        for i in subset:
            if i != pivot:
                state = _add_row(state, pivot, i)
        if state.Q.rows[pivot].key() != m.key():
            raise StructuralProjectionError("row reduction failed to isolate projector")
        # Clear the projected qubit from every other row that touches it.
        for i in range(state.Q.r):
            if i == pivot:
                continue
            row = state.Q.rows[i]
            if (row.x_bits | row.z_bits) >> qubit & 1:
                state = _add_row(state, i, pivot)
        r = state.Q.r
        if pivot != r - 1:
            state = _swap_rows(state, pivot, r - 1)
        half = len(state.dist) >> 1
        dist = state.dist[:half]
        if state.backend.all_zero(dist):
            raise ZeroAcceptanceError(
                f"postselection on qubit {qubit} left no likelihood mass"
            )
    rows = list(state.Q.rows[:-1])
    # Remaining commuting components on the qubit are cleared by multiplying
    # with the +1-eigenvalue projector; this is sign-free and leaves syndromes
    # unchanged, so no index remap accompanies it.
    for i, row in enumerate(rows):
        if (row.x_bits | row.z_bits) >> qubit & 1:
            cleared, sign = multiply(row, m)
            assert sign == 0 and not (cleared.x_bits | cleared.z_bits) >> qubit & 1
            rows[i] = cleared
    rows = _delete_qubit_columns(rows, qubit)
    return NoisyStabilizerState(
        GeneratorMatrix(state.n - 1, rows), dist, state.backend
    )


def normalize(state: NoisyStabilizerState) -> NoisyStabilizerState:
    """Divide every entry by the zero-syndrome likelihood."""
    d0 = state.dist[0]
    if state.backend.is_zero(d0):
        raise ZeroAcceptanceError("zero identity-syndrome mass; cannot normalize")
    return NoisyStabilizerState(state.Q, state.dist / d0, state.backend)


def total_mass(state: NoisyStabilizerState):
    return state.dist.sum()


def canonicalize(
    state: NoisyStabilizerState, target_rows: Sequence[PauliProduct]
) -> NoisyStabilizerState:
    """Rewrite the state in terms of an ordered target generating set.

    Each target row must be a product of current rows; the syndrome array is
    permuted accordingly, with multiplication signs complementing bits.
    """
    r = state.Q.r
    if len(target_rows) != r:
        raise ValueError("target generating set must have the same rank")
    masks = np.zeros(r, dtype=np.int64)
    signs = 0
    for i, target in enumerate(target_rows):
        subset = solve_product(state.Q.rows, target)
        if subset is None:
            raise ValueError(f"target row {target} not in the current row span")
        prod, sign = multiply_many([state.Q.rows[j] for j in subset])
        assert prod.key() == target.key()
        mask = 0
        for j in subset:
            mask |= 1 << j
        masks[i] = mask
        signs |= sign << i
    idx = _indices(len(state.dist))
    new_idx = np.zeros_like(idx)
    for i in range(r):
        parity = np.bitwise_count(idx & masks[i]) & 1
        new_idx |= parity.astype(np.intp) << i
    new_idx ^= signs
    dist = state.backend.scatter(state.dist, new_idx)
    return NoisyStabilizerState(
        GeneratorMatrix(state.n, tuple(target_rows)), dist, state.backend
    )


def join_states(
    a: NoisyStabilizerState, b: NoisyStabilizerState
) -> NoisyStabilizerState:
    """Tensor two independent states; b's qubits and rows follow a's."""
    if a.backend is not b.backend:
        same = a.backend.name == b.backend.name and getattr(
            a.backend, "cap", None
        ) == getattr(b.backend, "cap", None) and getattr(
            a.backend, "emax", None
        ) == getattr(b.backend, "emax", None)
        if not same:
            raise ValueError("states must share a backend")
    n = a.n + b.n
    rows = [PauliProduct(n, p.x_bits, p.z_bits) for p in a.Q.rows]
    rows += [
        PauliProduct(n, p.x_bits << a.n, p.z_bits << a.n) for p in b.Q.rows
    ]
    dist = a.backend.kron(b.dist, a.dist)
    return NoisyStabilizerState(GeneratorMatrix(n, tuple(rows)), dist, a.backend)
