"""Error model construction, conversions, marginals, weights, cosets."""
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edcthresh.error_models import (
    ONE_QUBIT_PAULIS,
    TWO_QUBIT_PAULIS,
    CosetErrorModel,
    LocationErrorModel,
    PauliWeights,
    PhysicalErrorParams,
    block_stabilizer_group,
    cnot_marginals,
    enumerate_cosets,
    likelihood_of,
    model_probabilities,
    model_total_probability,
    probability_of,
    uniform_physical_set,
    weights_from_marginals,
)
from edcthresh.symplectic import PauliProduct, multiply


def test_uniform_set_example_values():
    g = uniform_physical_set(PhysicalErrorParams(0.01, 0.03))
    assert g.prep.entries["X"] == pytest.approx(0.01 / 0.99, rel=1e-15)
    assert g.cnot.entries["XI"] == pytest.approx(0.03 / 0.97 / 15, rel=1e-15)
    # Hadamard probability defaults to 1.5x prep: e_h/3 = 0.00507614...
    assert g.hadamard.entries["X"] == pytest.approx(0.015 / 0.985 / 3, rel=1e-15)
    assert g.hadamard.entries["X"] == pytest.approx(0.0050761421319797, rel=1e-10)
    # total cnot probability round-trips to 0.03
    assert model_total_probability(g.cnot.entries) == pytest.approx(0.03, rel=1e-12)


def test_uniform_set_zero():
    g = uniform_physical_set(PhysicalErrorParams(0.0, 0.0))
    for model in (g.prep, g.meas, g.cnot, g.hadamard, g.special):
        assert model.is_zero()


def test_uniform_set_validation():
    with pytest.raises(ValueError):
        uniform_physical_set(PhysicalErrorParams(1.0, 0.0))
    with pytest.raises(ValueError):
        uniform_physical_set(PhysicalErrorParams(0.9, 0.0))  # p_hadamard = 1.35 >= 1


def test_probability_conversions():
    assert probability_of(0.0) == 0.0
    assert likelihood_of(0.03) == pytest.approx(0.030927835051546393, rel=1e-15)
    assert probability_of(0.03 / 0.97) == pytest.approx(0.03, rel=1e-14)


@given(st.floats(0.0, 0.99))
@settings(max_examples=100)
def test_conversion_involution(p):
    assert probability_of(likelihood_of(p)) == pytest.approx(p, abs=1e-12)


def test_cnot_marginals_uniform():
    g = uniform_physical_set(PhysicalErrorParams(0.01, 0.03))
    marg = cnot_marginals(g.cnot)
    expected = 4 * (0.03 / 0.97) / 15
    for pauli in ONE_QUBIT_PAULIS:
        assert marg[pauli] == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.008247422680412371, rel=1e-12)


def test_cnot_marginals_zero_and_asymmetric():
    assert cnot_marginals(LocationErrorModel(2, {})) == {"X": 0, "Z": 0, "Y": 0}
    m = cnot_marginals(LocationErrorModel(2, {"XI": 0.25}))
    assert m["X"] == 0.25 and m["Z"] == 0 and m["Y"] == 0


def test_marginal_consistency_bound():
    g = uniform_physical_set(PhysicalErrorParams(0.004, 0.02))
    marg = cnot_marginals(g.cnot)
    assert sum(marg.values()) <= sum(g.cnot.entries.values()) + 1e-15


def test_weights_from_marginals():
    w = weights_from_marginals({"X": math.exp(-1), "Z": math.exp(-1), "Y": math.exp(-1)})
    assert w.w_x == pytest.approx(1.0) and w.w_y == pytest.approx(1.0)
    w = weights_from_marginals({"X": 0.01, "Z": 0.0001, "Y": 0.0})
    assert w.w_z == pytest.approx(2 * w.w_x, rel=1e-12)
    assert math.isinf(w.w_y)


def test_weight_additivity_disjoint_support():
    w = PauliWeights(1.0, 2.0, 2.5)
    p = PauliProduct.from_string("XIII")
    q = PauliProduct.from_string("IZYI")
    prod, _ = multiply(p, q)
    assert w.of_pauli(prod) == pytest.approx(w.of_pauli(p) + w.of_pauli(q))


def test_block_stabilizer_group_sizes():
    for spectator in ("zero", "plus"):
        group = block_stabilizer_group(spectator)
        assert len(group) == 8
        keys = {g.key() for g in group}
        assert len(keys) == 8
        assert PauliProduct.identity(4).key() in keys


@pytest.mark.parametrize("spectator", ["zero", "plus"])
def test_coset_partition(spectator):
    table = enumerate_cosets(spectator)
    assert len(table.members) == 32
    seen = set()
    for coset in table.members:
        assert len(coset) == 8
        seen |= {m.key() for m in coset}
    assert len(seen) == 256
    assert table.coset_of(PauliProduct.identity(4)) == 0


@pytest.mark.parametrize("spectator", ["zero", "plus"])
def test_coset_membership_invariance(spectator):
    table = enumerate_cosets(spectator)
    group = block_stabilizer_group(spectator)
    for x in (3, 7, 12):
        for z in (0, 5, 9):
            p = PauliProduct(4, x, z)
            c = table.coset_of(p)
            for g in group:
                prod, _ = multiply(p, g)
                assert table.coset_of(prod) == c


def test_min_weight_representative():
    table = enumerate_cosets("zero")
    w = PauliWeights.unit()
    c = table.coset_of(PauliProduct.single(4, 0, "X"))
    rep, weight = table.min_weight_member(c, w)
    assert weight == 1.0 and str(rep) == "XIII"
    # exhaustive check against all members
    assert min(w.of_pauli(m) for m in table.members[c]) == weight


def test_location_model_validation_and_entries():
    with pytest.raises(ValueError):
        LocationErrorModel(1, {"XX": 0.1})
    with pytest.raises(ValueError):
        LocationErrorModel(3, {})
    m = LocationErrorModel(2, {"IX": 0.1, "ZI": 0.2})
    labels = [str(p) for p, _ in m.pauli_entries()]
    assert labels == ["IX", "ZI"]
    assert m.restricted(("IX",)).entries == {"IX": 0.1}
    assert m.total_likelihood() == pytest.approx(0.3)


def test_gate_error_set_serialization_deterministic():
    g = uniform_physical_set(PhysicalErrorParams(0.01, 0.03))
    assert g.to_text() == g.to_text()
    assert "cnot XI" in g.to_text()


def test_coset_error_model_rows():
    model = CosetErrorModel.zero("plus")
    rows = model.to_rows(PauliWeights.unit())
    assert len(rows) == 32
    assert rows[0] == ("IIII", 1.0)
