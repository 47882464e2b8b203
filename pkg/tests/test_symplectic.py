"""Binary symplectic algebra against brute-force matrix oracles."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edcthresh.symplectic import (
    GeneratorMatrix,
    PauliProduct,
    commutes,
    conjugate_by_gate,
    flip_pattern,
    multiply,
    solve_product,
)

from oracles import cnot_matrix, hadamard_matrix, pauli_matrix

ALL_1Q = [PauliProduct(1, x, z) for x in (0, 1) for z in (0, 1)]
ALL_2Q = [PauliProduct(2, x, z) for x in range(4) for z in range(4)]


def test_commutes_canonical_cases():
    x0 = PauliProduct.single(1, 0, "X")
    z0 = PauliProduct.single(1, 0, "Z")
    assert not commutes(x0, z0)
    assert commutes(x0, x0)
    assert commutes(PauliProduct.from_string("XXXX"), PauliProduct.from_string("ZZZZ"))


def test_commutes_dimension_mismatch():
    with pytest.raises(ValueError):
        commutes(PauliProduct.single(1, 0, "X"), PauliProduct.single(2, 0, "X"))


def test_multiply_identity_and_zx():
    p = PauliProduct.from_string("XZ")
    prod, sign = multiply(PauliProduct.identity(2), p)
    assert prod == p and sign == 0
    z0 = PauliProduct.single(1, 0, "Z")
    x0 = PauliProduct.single(1, 0, "X")
    prod, sign = multiply(z0, x0)
    assert str(prod) == "Y" and sign == 1


def test_multiply_spec_example():
    p = PauliProduct.from_string("XXII")
    q = PauliProduct.from_string("ZIZI")
    prod, sign = multiply(p, q)
    assert prod.x_bits == 0b0011 and prod.z_bits == 0b0101
    assert str(prod) == "YXZI"
    assert sign == 0


def test_multiply_against_exhaustive_2q_table():
    """Brute-force oracle: matrix product equals (-1)^sign times normal form."""
    for p in ALL_2Q:
        for q in ALL_2Q:
            prod, sign = multiply(p, q)
            lhs = pauli_matrix(str(p)) @ pauli_matrix(str(q))
            rhs = (-1) ** sign * pauli_matrix(str(prod))
            assert np.array_equal(lhs, rhs), (str(p), str(q))


def test_commutes_against_matrices():
    for p in ALL_2Q:
        for q in ALL_2Q:
            a = pauli_matrix(str(p)) @ pauli_matrix(str(q))
            b = pauli_matrix(str(q)) @ pauli_matrix(str(p))
            assert commutes(p, q) == np.array_equal(a, b)


@pytest.mark.parametrize(
    "gate,mat_fn",
    [
        (("cnot", 0, 1), lambda: cnot_matrix(0, 1, 2)),
        (("cnot", 1, 0), lambda: cnot_matrix(1, 0, 2)),
        (("hadamard", 0), lambda: hadamard_matrix(0, 2)),
        (("hadamard", 1), lambda: hadamard_matrix(1, 2)),
    ],
)
def test_conjugation_against_unitary_oracle(gate, mat_fn):
    u = mat_fn()
    scale = 2 if gate[0] == "hadamard" else 1  # unnormalized H: U P U^T = 2 P'
    for p in ALL_2Q:
        out, sign = conjugate_by_gate(p, gate)
        lhs = u @ pauli_matrix(str(p)) @ u.T
        rhs = scale * (-1) ** sign * pauli_matrix(str(out))
        assert np.array_equal(lhs, rhs), str(p)


def test_conjugation_textbook_cases():
    out, sign = conjugate_by_gate(PauliProduct.from_string("XI"), ("cnot", 0, 1))
    assert str(out) == "XX" and sign == 0
    out, sign = conjugate_by_gate(PauliProduct.from_string("Y"), ("hadamard", 0))
    assert str(out) == "Y" and sign == 1
    out, sign = conjugate_by_gate(PauliProduct.from_string("ZZ"), ("cnot", 0, 1))
    assert str(out) == "IZ" and sign == 0


def test_swap_conjugation():
    out, sign = conjugate_by_gate(PauliProduct.from_string("XZ"), ("swap", 0, 1))
    assert str(out) == "ZX" and sign == 0


def test_flip_pattern_examples():
    q = GeneratorMatrix.from_strings(["XXXX", "ZZZZ", "IIZZ"])
    assert flip_pattern(q, PauliProduct.identity(4)) == 0
    assert flip_pattern(q, PauliProduct.single(4, 0, "X")) == 0b010
    # brute-force commutation check for Z_2
    z2 = PauliProduct.single(4, 2, "Z")
    expected = 0
    for i, row in enumerate(q.rows):
        if not commutes(z2, row):
            expected |= 1 << i
    assert flip_pattern(q, z2) == expected == 0b001


def test_generator_matrix_validation():
    with pytest.raises(ValueError):
        GeneratorMatrix.from_strings(["XI", "ZI"])  # anticommuting rows
    with pytest.raises(ValueError):
        GeneratorMatrix.from_strings(["XX", "XX"])  # dependent rows


def test_commutes_symmetry_exhaustive():
    for p in ALL_2Q:
        for q in ALL_2Q:
            assert commutes(p, q) == commutes(q, p)


def test_multiply_associative_n2_exhaustive():
    """Signs compose additively mod 2 under associativity."""
    for p in ALL_2Q:
        for q in ALL_2Q:
            pq, s1 = multiply(p, q)
            for r in ALL_1Q:
                r2 = PauliProduct(2, r.x_bits, r.z_bits)
                left, s2 = multiply(pq, r2)
                qr, s3 = multiply(q, r2)
                right, s4 = multiply(p, qr)
                assert left == right
                assert (s1 + s2) % 2 == (s3 + s4) % 2


@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
@settings(max_examples=200)
def test_conjugation_preserves_commutation(xp, zp, xq, zq):
    p = PauliProduct(3, xp, zp)
    q = PauliProduct(3, xq, zq)
    for gate in (("cnot", 0, 1), ("cnot", 2, 0), ("hadamard", 1), ("swap", 0, 2)):
        p2, _ = conjugate_by_gate(p, gate)
        q2, _ = conjugate_by_gate(q, gate)
        assert commutes(p, q) == commutes(p2, q2)


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
@settings(max_examples=200)
def test_flip_pattern_is_homomorphism(xp, zp, xq, zq):
    frame = GeneratorMatrix.from_strings(["XXXX", "ZZZZ", "IIZZ", "ZIZI"])
    p = PauliProduct(4, xp, zp)
    q = PauliProduct(4, xq, zq)
    prod, _ = multiply(p, q)
    assert flip_pattern(frame, prod) == flip_pattern(frame, p) ^ flip_pattern(frame, q)


def test_solve_product_roundtrip():
    rows = GeneratorMatrix.from_strings(["XXXX", "ZZZZ", "IIZZ"]).rows
    from edcthresh.symplectic import multiply_many

    for mask in range(1, 8):
        subset = [rows[i] for i in range(3) if mask >> i & 1]
        target, _ = multiply_many(subset)
        solved = solve_product(rows, target)
        assert solved == tuple(i for i in range(3) if mask >> i & 1)
    assert solve_product(rows, PauliProduct.single(4, 0, "X")) is None


def test_embed_and_strings():
    p = PauliProduct.from_string("XY")
    emb = p.embed(4, (1, 3))
    assert str(emb) == "IXIY"
    assert PauliProduct.from_string(str(emb)) == emb
