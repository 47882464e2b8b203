"""Exact binary symplectic algebra for Pauli products and stabilizer generators.

Pauli operators are stored phase-free in X^x Z^z normal form: a tensor product
over qubits of X^{x_i} Z^{z_i} with Y meaning the product XZ. Every +-1 sign
produced by multiplication or Clifford conjugation is returned as an explicit
sign bit; callers fold these into syndrome bookkeeping. Bit packing puts qubit
0 at bit 0 of the x/z masks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_CHAR = {v: k for k, v in _CHAR_TO_BITS.items()}


@dataclass(frozen=True)
class PauliProduct:
    """Phase-free n-qubit Pauli product with bit-packed X and Z components."""

    n: int
    x_bits: int
    z_bits: int

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError(f"bit masks exceed {self.n} qubits")
        if self.x_bits < 0 or self.z_bits < 0:
            raise ValueError("bit masks must be nonnegative")

    @classmethod
    def identity(cls, n: int) -> "PauliProduct":
        return cls(n, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliProduct":
        """One non-identity Pauli on `qubit`, identity elsewhere."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        x, z = _CHAR_TO_BITS[kind]
        return cls(n, x << qubit, z << qubit)

    @classmethod
    def from_string(cls, s: str) -> "PauliProduct":
        """Parse strings like "XXII"; character i addresses qubit i."""
        x = z = 0
        for i, ch in enumerate(s):
            xb, zb = _CHAR_TO_BITS[ch]
            x |= xb << i
            z |= zb << i
        return cls(len(s), x, z)

    def char_at(self, qubit: int) -> str:
        return _BITS_TO_CHAR[(self.x_bits >> qubit) & 1, (self.z_bits >> qubit) & 1]

    def __str__(self) -> str:
        return "".join(self.char_at(q) for q in range(self.n))

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def support(self) -> tuple:
        return tuple(
            q for q in range(self.n) if (self.x_bits | self.z_bits) >> q & 1
        )

    def weight(self) -> int:
        return ((self.x_bits | self.z_bits)).bit_count()

    def embed(self, n: int, qubits: Sequence[int]) -> "PauliProduct":
        """Place this product onto the listed qubits of a larger register."""
        if len(qubits) != self.n:
            raise ValueError("qubit tuple length must equal operator size")
        x = z = 0
        for local, q in enumerate(qubits):
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            x |= ((self.x_bits >> local) & 1) << q
            z |= ((self.z_bits >> local) & 1) << q
        return PauliProduct(n, x, z)

    def key(self) -> tuple:
        """Deterministic sort key: (x_bits, z_bits) lexicographic."""
        return (self.x_bits, self.z_bits)


def commutes(p: PauliProduct, q: PauliProduct) -> bool:
    """True iff the symplectic product x_p.z_q + z_p.x_q vanishes mod 2."""
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {q.n}")
    return ((p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()) % 2 == 0


def multiply(p: PauliProduct, q: PauliProduct) -> tuple:
    """Product p*q in X^x Z^z normal form.

    Returns (product, sign_bit) where sign_bit = z_p . x_q mod 2, the sign
    picked up by commuting the Z part of p past the X part of q.
    """
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {q.n}")
    sign = (p.z_bits & q.x_bits).bit_count() & 1
    return PauliProduct(p.n, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits), sign


def multiply_many(rows: Sequence[PauliProduct]) -> tuple:
    """Left-to-right product of several commuting rows; accumulated sign bit."""
    if not rows:
        raise ValueError("empty product")
    acc, sign = rows[0], 0
    for r in rows[1:]:
        acc, s = multiply(acc, r)
        sign ^= s
    return acc, sign


def conjugate_cnot(p: PauliProduct, control: int, target: int) -> tuple:
    """Conjugate by cnot: X_c -> X_c X_t and Z_t -> Z_c Z_t; sign is always 0."""
    if control == target:
        raise ValueError("cnot requires distinct qubits")
    for q in (control, target):
        if not 0 <= q < p.n:
            raise ValueError(f"qubit {q} out of range")
    x, z = p.x_bits, p.z_bits
    if (x >> control) & 1:
        x ^= 1 << target
    if (z >> target) & 1:
        z ^= 1 << control
    return PauliProduct(p.n, x, z), 0


def conjugate_hadamard(p: PauliProduct, qubit: int) -> tuple:
    """Conjugate by H on one qubit: swaps the x/z bits; Y picks up a sign."""
    if not 0 <= qubit < p.n:
        raise ValueError(f"qubit {qubit} out of range")
    xb = (p.x_bits >> qubit) & 1
    zb = (p.z_bits >> qubit) & 1
    sign = xb & zb
    x = p.x_bits & ~(1 << qubit) | (zb << qubit)
    z = p.z_bits & ~(1 << qubit) | (xb << qubit)
    return PauliProduct(p.n, x, z), sign


def conjugate_swap(p: PauliProduct, i: int, j: int) -> tuple:
    if i == j:
        raise ValueError("swap requires distinct qubits")
    for q in (i, j):
        if not 0 <= q < p.n:
            raise ValueError(f"qubit {q} out of range")
    x, z = p.x_bits, p.z_bits
    xi, xj = (x >> i) & 1, (x >> j) & 1
    zi, zj = (z >> i) & 1, (z >> j) & 1
    x = x & ~((1 << i) | (1 << j)) | (xj << i) | (xi << j)
    z = z & ~((1 << i) | (1 << j)) | (zj << i) | (zi << j)
    return PauliProduct(p.n, x, z), 0


def conjugate_by_gate(p: PauliProduct, gate: tuple) -> tuple:
    """Dispatch on gate tuples ("cnot", c, t), ("hadamard", q), ("swap", i, j)."""
    kind = gate[0]
    if kind == "cnot":
        return conjugate_cnot(p, gate[1], gate[2])
    if kind == "hadamard":
        return conjugate_hadamard(p, gate[1])
    if kind == "swap":
        return conjugate_swap(p, gate[1], gate[2])
    raise ValueError(f"unknown gate {gate!r}")


@dataclass(frozen=True)
class GeneratorMatrix:
    """Ordered generating set of a stabilizer group, rows phase-positive."""

    n: int
    rows: tuple

    def __post_init__(self):
        for r in self.rows:
            if r.n != self.n:
                raise ValueError("row size mismatch")
        if len(self.rows) > self.n:
            raise ValueError("more rows than qubits")
        for i in range(len(self.rows)):
            for j in range(i + 1, len(self.rows)):
                if not commutes(self.rows[i], self.rows[j]):
                    raise ValueError(f"rows {i} and {j} anticommute")
        if not _independent([_sympvec(r) for r in self.rows], 2 * self.n):
            raise ValueError("rows are linearly dependent over GF(2)")

    @property
    def r(self) -> int:
        return len(self.rows)

    @classmethod
    def from_strings(cls, strings: Iterable[str]) -> "GeneratorMatrix":
        rows = tuple(PauliProduct.from_string(s) for s in strings)
        if not rows:
            raise ValueError("need at least one row")
        return cls(rows[0].n, rows)

    def to_strings(self) -> list:
        return [str(r) for r in self.rows]


def _sympvec(p: PauliProduct) -> int:
    return p.x_bits | (p.z_bits << p.n)


def _independent(vecs: list, nbits: int) -> bool:
    basis = []
    for v in vecs:
        for b in basis:
            v = min(v, v ^ b)
        if v == 0:
            return False
        basis.append(v)
        basis.sort(reverse=True)
    return True


def flip_pattern(Q: GeneratorMatrix, p: PauliProduct) -> int:
    """Bit i is set iff p anticommutes with row i (p flips syndrome bit i)."""
    if p.n != Q.n:
        raise ValueError(f"dimension mismatch: {p.n} != {Q.n}")
    pattern = 0
    for i, row in enumerate(Q.rows):
        if not commutes(p, row):
            pattern |= 1 << i
    return pattern


def solve_product(rows: Sequence[PauliProduct], target: PauliProduct) -> Optional[tuple]:
    """Indices of rows whose bitwise product equals target, or None.

    Solves over GF(2) on the 2n-bit symplectic vectors; the solution subset is
    unique when the rows are independent.
    """
    n = target.n
    tv = _sympvec(target)
    # Gaussian elimination tracking combination masks.
    pool = [(_sympvec(r), 1 << i) for i, r in enumerate(rows)]
    basis = []  # (pivot_bit, vec, comb)
    for vec, comb in pool:
        for pb, bv, bc in basis:
            if (vec >> pb) & 1:
                vec ^= bv
                comb ^= bc
        if vec:
            pivot = vec.bit_length() - 1
            basis.append((pivot, vec, comb))
            basis.sort(reverse=True)
    # reduce target
    comb = 0
    for pb, bv, bc in basis:
        if (tv >> pb) & 1:
            tv ^= bv
            comb ^= bc
    if tv != 0:
        return None
    return tuple(i for i in range(len(rows)) if (comb >> i) & 1)
