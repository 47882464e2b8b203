"""Encoding network synthesis, noisy Bell preparation, purification."""
from fractions import Fraction

import numpy as np
import pytest

from edcthresh.backends import DoubleBackend, PolyBackend, RationalBackend
from edcthresh.bellprep import (
    UNDETECTED_SYNDROMES,
    X_TYPE,
    Z_TYPE,
    ComputedBellModel,
    bell_frame_rows,
    bell_network_ops,
    compute_bell_model,
    prepare_noisy_bell,
    purify_once,
    run_network,
    synthesize_encoding_network,
    validate_encoding_network,
)
from edcthresh.error_models import (
    GateErrorSet,
    LocationErrorModel,
    PhysicalErrorParams,
    uniform_physical_set,
    zero_gate_set,
)
from edcthresh.likelihood import (
    NoisyStabilizerState,
    canonicalize,
    join_states,
    normalize,
    total_mass,
)
from edcthresh.symplectic import (
    GeneratorMatrix,
    PauliProduct,
    conjugate_by_gate,
    flip_pattern,
    solve_product,
)

DOUBLE = DoubleBackend()
EX1 = uniform_physical_set(PhysicalErrorParams(0.01, 0.03))


@pytest.mark.parametrize("spectator", ["zero", "plus"])
def test_synthesized_network_matches_caption_stabilizers(spectator):
    net = synthesize_encoding_network(spectator)
    validate_encoding_network(net)
    state = run_network(bell_network_ops(net), None, DOUBLE)
    target = bell_frame_rows(spectator)
    # row span must contain every caption generator, including spectator rows
    for row in target:
        assert solve_product(state.Q.rows, row) is not None
    state = canonicalize(state, target)
    assert state.dist[0] == 1.0 and state.dist.sum() == 1.0


def test_spectator_rows_present():
    plus = bell_frame_rows("plus")
    assert str(plus[2]) == "IXIXIIII" and str(plus[5]) == "IIIIIXIX"
    zero = bell_frame_rows("zero")
    assert str(zero[2]) == "IIZZIIII" and str(zero[5]) == "IIIIIIZZ"


def test_network_is_minimal_and_deterministic():
    n1 = synthesize_encoding_network("plus")
    n2 = synthesize_encoding_network("plus")
    assert n1 == n2
    assert len(n1.cnots) == 3  # three fresh qubits each need one entangling gate
    assert n1.gate_hash() == n2.gate_hash()


def test_prepare_noisy_bell_zero_error_is_delta():
    for spectator in ("zero", "plus"):
        st = prepare_noisy_bell(zero_gate_set(), spectator, DOUBLE)
        assert st.dist[0] == 1.0 and st.dist.sum() == 1.0


def test_prepare_mass_is_product_of_location_factors():
    st = prepare_noisy_bell(EX1, "plus", DOUBLE)
    net = synthesize_encoding_network("plus")
    n_cnots = len(bell_network_ops(net)) - 8
    e_p, e_c = 0.01 / 0.99, 0.03 / 0.97
    expected = (1 + e_p) ** 8 * (1 + e_c) ** n_cnots
    assert total_mass(st) == pytest.approx(expected, rel=1e-12)


def test_single_cnot_error_propagates_by_hand():
    """One XI entry on the physical Bell cnot: only syndromes reachable by
    X on that wire, conjugated through the downstream gates, carry mass e."""
    net = synthesize_encoding_network("plus")
    g0 = zero_gate_set()
    e = 0.125
    ops = bell_network_ops(net)
    gates = GateErrorSet(
        0, g0.prep, g0.meas, LocationErrorModel(2, {"XI": e}), g0.hadamard, g0.special
    )
    # run with the error only on the Bell cnot: zero out others by splitting
    state = run_network(ops[: ops.index(("cnot", 0, 4)) + 1], gates, DOUBLE)
    state = run_network(ops[ops.index(("cnot", 0, 4)) + 1 :], g0, DOUBLE, state)
    state = canonicalize(state, bell_frame_rows("plus"))
    # hand propagation: X on wire 0 through the remaining gates
    pauli = PauliProduct.single(8, 0, "X")
    for op in ops[ops.index(("cnot", 0, 4)) + 1 :]:
        if op[0] == "cnot":
            pauli, _ = conjugate_by_gate(pauli, op)
    frame = GeneratorMatrix(8, bell_frame_rows("plus"))
    s = flip_pattern(frame, pauli)
    expected = np.zeros(256)
    expected[0] = 1.0
    expected[s] = e
    assert np.allclose(np.asarray(state.dist), expected)


def test_purify_zero_error_round_trip():
    st = prepare_noisy_bell(zero_gate_set(), "plus", DOUBLE)
    for kind in (Z_TYPE, X_TYPE):
        out = purify_once(st, st, kind, zero_gate_set())
        assert out.dist[0] == 1.0 and out.dist.sum() == 1.0


def test_purify_detects_planted_x_class():
    """A detectable X-class syndrome on the kept pair is removed by the
    Z-type step with an ideal sacrifice and zero gate error."""
    ideal = prepare_noisy_bell(zero_gate_set(), "plus", RationalBackend())
    frame = GeneratorMatrix(8, bell_frame_rows("plus"))
    s = flip_pattern(frame, PauliProduct.single(8, 0, "X"))
    assert s != 0
    a = Fraction(1, 5)
    dist = ideal.dist.copy()
    dist[s] = a
    kept = NoisyStabilizerState(ideal.Q, dist, RationalBackend())
    out = purify_once(kept, ideal, Z_TYPE, zero_gate_set())
    assert out.dist[s] == 0
    assert total_mass(out) == 1  # planted mass rejected
    assert total_mass(out) / total_mass(kept) == Fraction(1, 1) / (1 + a)


def test_purify_acceptance_never_exceeds_one():
    raw = prepare_noisy_bell(EX1, "plus", DOUBLE)
    for kind in (Z_TYPE, X_TYPE):
        out = purify_once(raw, raw, kind, EX1)
        joint_in = total_mass(raw) ** 2
        e_c, e_p = 0.03 / 0.97, 0.01 / 0.99
        budget = (1 + e_c) ** 8 * (1 + e_p) ** 8  # step cnots and meas errors
        assert total_mass(out) <= joint_in * budget + 1e-12


def test_purify_spectator_mismatch():
    a = prepare_noisy_bell(zero_gate_set(), "plus", DOUBLE)
    b = prepare_noisy_bell(zero_gate_set(), "zero", DOUBLE)
    with pytest.raises(ValueError):
        purify_once(a, b, Z_TYPE, zero_gate_set())


def test_purification_needs_at_most_sixteen_qubits():
    raw = prepare_noisy_bell(zero_gate_set(), "plus", DOUBLE)
    joint = join_states(raw, raw)
    assert joint.n == 16 and len(joint.dist) == 65536


def test_compute_bell_model_zero_error_delta():
    model = compute_bell_model(zero_gate_set(), "plus", DOUBLE)
    d = np.asarray(model.dist)
    assert d[0] == 1.0 and d.sum() == 1.0


def test_compute_bell_model_symmetrized():
    model = compute_bell_model(EX1, "plus", DOUBLE)
    d = np.asarray(model.dist)
    idx = np.arange(256)
    low = idx & 0b111
    mid = (idx >> 3) & 0b111
    swapped = (idx & ~np.intp(63)) | (low << 3) | mid
    assert np.allclose(d, d[swapped])
    # origin and destination marginal coset distributions agree
    assert d[0] == 1.0


def test_order_mismatch_recorded_and_second_order():
    m1 = compute_bell_model(EX1, "plus", DOUBLE, order_check=True)
    assert 0 < m1.order_mass_rel_diff < 0.05
    weak = uniform_physical_set(PhysicalErrorParams(0.001, 0.003))
    m2 = compute_bell_model(weak, "plus", DOUBLE, order_check=True)
    # first-order equality: the mismatch shrinks about quadratically
    assert m2.order_mass_rel_diff < m1.order_mass_rel_diff / 20


def test_undetected_syndromes_second_order():
    p = 1e-6
    g = uniform_physical_set(PhysicalErrorParams(p, p))
    model = compute_bell_model(g, "plus", DOUBLE)
    d = np.asarray(model.dist)
    e = p / (1 - p)
    for s in UNDETECTED_SYNDROMES:
        assert d[s] / e < 1e-3  # no first-order contribution


def test_raw_sacrifices_leak_first_order_logical():
    p = 1e-6
    g = uniform_physical_set(PhysicalErrorParams(p, p))
    model = compute_bell_model(g, "plus", DOUBLE, purified_sacrifices=False)
    d = np.asarray(model.dist)
    e = p / (1 - p)
    assert max(d[s] / e for s in UNDETECTED_SYNDROMES) > 0.1


def test_serialize_records():
    model = compute_bell_model(zero_gate_set(), "zero", DOUBLE)
    records = model.serialize_records()
    assert len(records) == 256
    assert records[0][0] == "00000000" and records[0][1] == 1.0
