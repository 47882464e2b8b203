"""Independent dense-matrix oracles for the likelihood engine.

Everything here works on explicit state vectors and density matrices and
shares no code with the package's symplectic or likelihood machinery. Error
insertion is exhaustive: a location with likelihood entries contributes the
identity term plus one weighted Pauli-conjugated term per entry, applied as a
linear map on the (unnormalized) density matrix, which is exactly the sum
over all Pauli-insertion combinations.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

I2 = np.array([[1, 0], [0, 1]], dtype=object)
X2 = np.array([[0, 1], [1, 0]], dtype=object)
Z2 = np.array([[1, 0], [0, -1]], dtype=object)
Y2 = X2 @ Z2  # phase-free convention: Y means the product XZ
H2 = np.array([[1, 1], [1, -1]], dtype=object)  # unnormalized Hadamard

CHAR_MATS = {"I": I2, "X": X2, "Z": Z2, "Y": Y2}


def _promote(mat, dtype):
    if dtype is object:
        return np.array(
            [[Fraction(int(v)) for v in row] for row in mat], dtype=object
        )
    return mat.astype(np.float64)


def pauli_matrix(chars: str, dtype=object) -> np.ndarray:
    """Matrix of a Pauli string; qubit 0 (first character) is the least
    significant bit of the matrix index."""
    out = np.array([[1]], dtype=object)
    for ch in reversed(chars):
        out = np.kron(out, CHAR_MATS[ch])
    return _promote(out, dtype)


def _embed_single(mat2, qubit: int, n: int, dtype) -> np.ndarray:
    out = np.array([[1]], dtype=object)
    for q in reversed(range(n)):
        out = np.kron(out, mat2 if q == qubit else I2)
    return _promote(out, dtype)


def cnot_matrix(control: int, target: int, n: int, dtype=object) -> np.ndarray:
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=object)
    for b in range(dim):
        out = b ^ (1 << target) if (b >> control) & 1 else b
        mat[out, b] = 1
    return _promote(mat, dtype)


def hadamard_matrix(qubit: int, n: int, dtype=object) -> np.ndarray:
    # Unnormalized (factor sqrt(2) per application); likelihood ratios are
    # unaffected because every branch picks up the same factor.
    return _embed_single(H2, qubit, n, dtype)


class DenseOracle:
    """Simulates a network on an unnormalized density matrix.

    Measurement handling: a noise-free pure reference determines whether a
    projection outcome is deterministic (case 2: postselect on +1) or
    intrinsically random (case 1: both branches kept). Qubits are never
    deleted; projected qubits simply stay in their post-measurement state.
    """

    def __init__(self, n: int, exact: bool = True):
        self.n = n
        self.dtype = object if exact else np.float64
        self.exact = exact
        dim = 1 << n
        one = Fraction(1) if exact else 1.0
        self.rho = np.zeros((dim, dim), dtype=self.dtype)
        self.ref = np.zeros(dim, dtype=self.dtype)
        self.added: list = []

    def _scalar(self, x):
        return Fraction(x) if self.exact else float(x)

    def add_qubit(self, qubit: int, basis: str):
        """Initialize qubit (must be tracked in ascending order) in |0> or |+>."""
        self.added.append(qubit)
        if len(self.added) == 1:
            dim = 1 << self.n
            vec = np.zeros(dim, dtype=self.dtype)
            if basis == "Z0":
                vec[0] = self._scalar(1)
                self.ref = vec.copy()
                self.rho = np.outer(vec, vec)
            else:
                # |+> unnormalized on this qubit, |0> elsewhere
                vec[0] = self._scalar(1)
                vec[1 << qubit] = self._scalar(1)
                self.ref = vec.copy()
                self.rho = np.outer(vec, vec)
            return
        if basis == "Z0":
            return  # already |0>
        # apply unnormalized Hadamard to turn |0> into |+>
        h = hadamard_matrix(qubit, self.n, self.dtype)
        self.rho = h @ self.rho @ h
        self.ref = h @ self.ref

    def apply_unitary(self, mat: np.ndarray):
        self.rho = mat @ self.rho @ mat.T
        self.ref = mat @ self.ref

    def cnot(self, control: int, target: int):
        self.apply_unitary(cnot_matrix(control, target, self.n, self.dtype))

    def hadamard(self, qubit: int):
        self.apply_unitary(hadamard_matrix(qubit, self.n, self.dtype))

    def error_location(self, entries):
        """entries: list of (pauli string over all n qubits, likelihood)."""
        rho = self.rho.copy()
        for chars, value in entries:
            p = pauli_matrix(chars, self.dtype)
            rho = rho + self._scalar(value) * (p @ self.rho @ p.T)
        self.rho = rho

    def project(self, qubit: int, basis: str):
        """Measure qubit in Z or X, postselecting the +1 (neutral) outcome.

        Intrinsically random outcomes have expectation zero in every
        Pauli-inserted branch, so keeping only the +1 projection scales all
        error classes uniformly by one half; normalized syndrome
        distributions therefore agree with outcome-marginalized bookkeeping.
        """
        m = _embed_single(Z2 if basis == "Z0" else X2, qubit, self.n, self.dtype)
        dim = 1 << self.n
        if self.exact:
            ident = np.array(
                [[Fraction(1) if i == j else Fraction(0) for j in range(dim)] for i in range(dim)],
                dtype=object,
            )
            half = Fraction(1, 2)
        else:
            ident = np.eye(dim)
            half = 0.5
        p_plus = (ident + m) * half
        ref_plus = p_plus @ self.ref
        if ref_plus @ ref_plus == 0:
            raise AssertionError("noise-free reference rejects the +1 outcome")
        self.rho = p_plus @ self.rho @ p_plus
        self.ref = ref_plus

    def syndrome_distribution(self, rows, row_signs=None):
        """Likelihoods of each syndrome of the given stabilizer rows.

        rows: list of Pauli strings over all n qubits (identity on measured
        qubits). Returns a list of 2^r values, little-endian in the row index.
        """
        r = len(rows)
        mats = [pauli_matrix(s, self.dtype) for s in rows]
        dim = 1 << self.n
        out = []
        half = Fraction(1, 2) if self.exact else 0.5
        for syndrome in range(1 << r):
            proj = None
            for i, mat in enumerate(mats):
                sign = -1 if (syndrome >> i) & 1 else 1
                if self.exact:
                    ident = np.array(
                        [[Fraction(1) if a == b else Fraction(0) for b in range(dim)] for a in range(dim)],
                        dtype=object,
                    )
                else:
                    ident = np.eye(dim)
                term = (ident + sign * mat) * half
                proj = term if proj is None else proj @ term
            val = np.trace(proj @ self.rho)
            out.append(val)
        return out
