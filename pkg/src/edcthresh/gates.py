"""Per-level logical gate error computations and the level-step orchestrator.

Every logical gate is a teleportation step: the acting blocks carry the
destination coset model of the fitted Bell error model, fresh encoded Bell
pairs contribute their origin coset model explicitly and their destination
halves as ideal reference qubits, and every Bell-measurement outcome is
postselected. At the first level the Bell measurements carry physical cnot
and measurement errors; at higher levels they are error-free because the
transversal gates already carry the previously computed logical errors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .bellprep import ComputedBellModel, compute_bell_model
from .error_models import (
    BLOCK_GENERATORS,
    LOGICAL_X,
    LOGICAL_Z,
    TWO_QUBIT_PAULIS,
    CosetErrorModel,
    GateErrorSet,
    LocationErrorModel,
    PauliWeights,
    cnot_marginals,
    model_probabilities,
    model_total_probability,
    weights_from_marginals,
)
from .indfit import BellErrorModel, fit_bell_model
from .likelihood import (
    XPLUS,
    Z0,
    NoisyStabilizerState,
    apply_error_location,
    apply_gate,
    apply_pauli_likelihoods,
    join_states,
    project_qubit,
)
from .symplectic import GeneratorMatrix, PauliProduct, flip_pattern


@dataclass(frozen=True)
class LocalQubitError:
    """Logical one-qubit error likelihoods relative to identity = 1."""

    e_x: float
    e_z: float
    e_y: float

    def total_probability(self) -> float:
        s = self.e_x + self.e_z + self.e_y
        return s / (1 + s)

    def probabilities(self) -> dict:
        s = 1 + self.e_x + self.e_z + self.e_y
        return {"X": self.e_x / s, "Z": self.e_z / s, "Y": self.e_y / s}

    def as_model(self) -> LocationErrorModel:
        entries = {}
        for label, value in (("X", self.e_x), ("Z", self.e_z), ("Y", self.e_y)):
            if value != 0:
                entries[label] = value
        return LocationErrorModel(1, entries)

    def is_zero(self) -> bool:
        return self.e_x == 0 and self.e_z == 0 and self.e_y == 0

    @classmethod
    def zero(cls) -> "LocalQubitError":
        return cls(0.0, 0.0, 0.0)


class _Wires:
    """A noisy state together with wire labels, so projections that delete
    qubits never invalidate the caller's indices."""

    def __init__(self, state: NoisyStabilizerState, labels: Sequence[str]):
        self.state = state
        self.labels = list(labels)

    def q(self, label: str) -> int:
        return self.labels.index(label)

    def join(self, other: NoisyStabilizerState, labels: Sequence[str]):
        self.state = join_states(self.state, other)
        self.labels += list(labels)

    def cnot(self, control: str, target: str, model: Optional[LocationErrorModel]):
        c, t = self.q(control), self.q(target)
        self.state = apply_gate(self.state, ("cnot", c, t))
        if model is not None and not model.is_zero():
            self.state = apply_error_location(self.state, model, (c, t))

    def hadamard(self, label: str, model: Optional[LocationErrorModel]):
        q = self.q(label)
        self.state = apply_gate(self.state, ("hadamard", q))
        if model is not None and not model.is_zero():
            self.state = apply_error_location(self.state, model, (q,))

    def local_error(self, label: str, model: Optional[LocationErrorModel]):
        if model is not None and not model.is_zero():
            self.state = apply_error_location(self.state, model, (self.q(label),))

    def measure(self, label: str, basis: str, model: Optional[LocationErrorModel]):
        relevant = None
        if model is not None:
            relevant = model.restricted(("X",) if basis == Z0 else ("Z",))
        self.local_error(label, relevant)
        q = self.q(label)
        self.state = project_qubit(self.state, q, basis)
        self.labels.pop(q)

    @property
    def n(self) -> int:
        return self.state.n


def apply_coset_model(
    state: NoisyStabilizerState,
    model: CosetErrorModel,
    qubits: Sequence[int],
    weights: PauliWeights,
) -> NoisyStabilizerState:
    """Apply a 31-entry coset error model as one error location on a block.

    Any coset member gives the same flip pattern because the block stabilizer
    commutes with every row of the frames used here; the minimum-weight
    representative is used.
    """
    entries = [
        (rep.embed(state.n, tuple(qubits)), value)
        for rep, value in model.error_entries(weights)
        if not state.backend.is_zero(state.backend.scalar(value))
    ]
    return apply_pauli_likelihoods(state, entries)


def _block_with_reference(
    spectator: str,
    backend,
    coset_model: Optional[CosetErrorModel],
    weights: Optional[PauliWeights],
) -> NoisyStabilizerState:
    """Five-qubit state: encoded block 0..3 Bell-entangled with qubit 4, with
    an optional coset error model applied to the block as one location."""
    g1, g2, spec = BLOCK_GENERATORS[spectator]
    rows = GeneratorMatrix.from_strings(
        [g1 + "I", g2 + "I", spec + "I", LOGICAL_X + "X", LOGICAL_Z + "Z"]
    )
    state = NoisyStabilizerState(rows, backend.delta(5), backend)
    if coset_model is not None:
        state = apply_coset_model(state, coset_model, (0, 1, 2, 3), weights)
    return state


def _bell_measure(wires: _Wires, source: str, target: str, phys: Optional[GateErrorSet]):
    """Postselected Bell-measurement element on one qubit pair: cnot from
    source to target, X measurement on source, Z measurement on target."""
    wires.cnot(source, target, phys.cnot if phys is not None else None)
    wires.measure(source, XPLUS, phys.meas if phys is not None else None)
    wires.measure(target, Z0, phys.meas if phys is not None else None)


def _extract_pauli_likelihoods(
    state: NoisyStabilizerState, ideal_rows, qubits: Sequence[int]
) -> dict:
    """Likelihoods of the Pauli error classes on the listed output qubits,
    normalized to the identity class."""
    if tuple(r.key() for r in state.Q.rows) != tuple(r.key() for r in ideal_rows):
        raise AssertionError("noisy and ideal generator matrices diverged")
    backend = state.backend
    d0 = backend.as_float(state.dist[0])
    if d0 == 0.0:
        raise ZeroDivisionError("zero acceptance mass")
    if len(qubits) == 1:
        labels = [(k, PauliProduct.single(1, 0, k)) for k in ("X", "Z", "Y")]
    else:
        labels = [(s, PauliProduct.from_string(s)) for s in TWO_QUBIT_PAULIS]
    out = {}
    seen = {0}
    for label, pauli in labels:
        pattern = flip_pattern(state.Q, pauli.embed(state.n, qubits))
        if pattern in seen:
            raise AssertionError("output error classes are not distinguished")
        seen.add(pattern)
        out[label] = backend.as_float(state.dist[pattern]) / d0
    return out


def _single_block_flip(
    coset_model: CosetErrorModel,
    meas_model: Optional[LocationErrorModel],
    basis: str,
    weights: PauliWeights,
    backend,
) -> float:
    """Measure out a block entangled with a reference; likelihood of a flipped
    reference, normalized. Shared by logical preparation and measurement."""
    state = _block_with_reference(coset_model.spectator, backend, coset_model, weights)
    wires = _Wires(state, ["b0", "b1", "b2", "b3", "ref"])
    for q in range(4):
        wires.measure(f"b{3 - q}", basis, meas_model)
    d0 = backend.as_float(wires.state.dist[0])
    d1 = backend.as_float(wires.state.dist[1])
    if d0 == 0.0:
        raise ZeroDivisionError("zero acceptance mass in block measurement")
    return d1 / d0


def logical_prep_error(
    bell: BellErrorModel,
    meas_model: LocationErrorModel,
    basis: str,
    weights: PauliWeights,
    backend,
) -> float:
    """Flip likelihood of a logical state preparation: the origin block of an
    encoded Bell pair is measured out with postselection (Z for |0>_L, X for
    |+>_L) and the abstract destination qubit's flip likelihood is returned."""
    return _single_block_flip(bell.origin, meas_model, basis, weights, backend)


def logical_meas_error(
    bell: BellErrorModel,
    meas_model: LocationErrorModel,
    basis: str,
    weights: PauliWeights,
    backend,
) -> float:
    """Mirror of logical_prep_error on the destination block."""
    return _single_block_flip(bell.destination, meas_model, basis, weights, backend)


def _cnot_pipeline(
    spectator: str,
    dest_model: Optional[CosetErrorModel],
    origin_model: Optional[CosetErrorModel],
    trans_model: Optional[LocationErrorModel],
    bm_phys: Optional[GateErrorSet],
    weights: Optional[PauliWeights],
    backend,
    stats: Optional[dict] = None,
) -> NoisyStabilizerState:
    b1 = _block_with_reference(spectator, backend, dest_model, weights)
    wires = _Wires(b1, ["B1_0", "B1_1", "B1_2", "B1_3", "R1"])
    b2 = _block_with_reference(spectator, backend, dest_model, weights)
    wires.join(b2, ["B2_0", "B2_1", "B2_2", "B2_3", "R2"])
    for i in range(4):
        wires.cnot(f"B1_{i}", f"B2_{i}", trans_model)
    for block in ("B1", "B2"):
        fresh = _block_with_reference(spectator, backend, origin_model, weights)
        wires.join(fresh, [f"O{block}_0", f"O{block}_1", f"O{block}_2", f"O{block}_3", f"D{block}"])
        if stats is not None:
            stats["peak_qubits"] = max(stats.get("peak_qubits", 0), wires.n)
        for i in range(3, -1, -1):
            _bell_measure(wires, f"{block}_{i}", f"O{block}_{i}", bm_phys)
    assert wires.labels == ["R1", "R2", "DB1", "DB2"]
    return wires.state


def logical_cnot_error(
    bell: BellErrorModel,
    trans_cnot_model: LocationErrorModel,
    level: int,
    weights: PauliWeights,
    backend,
    phys: Optional[GateErrorSet] = None,
    stats: Optional[dict] = None,
) -> LocationErrorModel:
    """Fifteen-entry logical error model of the teleported transversal cnot.

    Slot 1 of each Pauli label is the control (first logical qubit).
    """
    spectator = bell.origin.spectator
    bm_phys = phys if level == 1 else None
    ideal = _ideal_frame(spectator, "cnot", backend)
    state = _cnot_pipeline(
        spectator,
        bell.destination,
        bell.origin,
        trans_cnot_model,
        bm_phys,
        weights,
        backend,
        stats,
    )
    entries = _extract_pauli_likelihoods(state, ideal, (2, 3))
    entries = {k: v for k, v in entries.items() if v != 0.0}
    return LocationErrorModel(2, entries)


HADAMARD_PAIRING = (0, 2, 1, 3)  # middle two Bell measurements crossed


def _hadamard_pipeline(
    spectator: str,
    dest_model: Optional[CosetErrorModel],
    origin_model: Optional[CosetErrorModel],
    had_model: Optional[LocationErrorModel],
    bm_phys: Optional[GateErrorSet],
    weights: Optional[PauliWeights],
    backend,
) -> NoisyStabilizerState:
    b = _block_with_reference(spectator, backend, dest_model, weights)
    wires = _Wires(b, ["B_0", "B_1", "B_2", "B_3", "R"])
    for i in range(4):
        wires.hadamard(f"B_{i}", had_model)
    fresh = _block_with_reference(spectator, backend, origin_model, weights)
    wires.join(fresh, ["O_0", "O_1", "O_2", "O_3", "D"])
    for i in range(3, -1, -1):
        _bell_measure(wires, f"B_{i}", f"O_{HADAMARD_PAIRING[i]}", bm_phys)
    assert wires.labels == ["R", "D"]
    return wires.state


def logical_hadamard_error(
    bell: BellErrorModel,
    hadamard_model: LocationErrorModel,
    level: int,
    weights: PauliWeights,
    backend,
    phys: Optional[GateErrorSet] = None,
) -> LocalQubitError:
    """Logical one-qubit error of the teleported transversal Hadamard.

    The code requires the middle two qubits swapped after the transversal
    Hadamard, realized by crossing the middle two Bell measurements.
    """
    spectator = bell.origin.spectator
    bm_phys = phys if level == 1 else None
    ideal = _ideal_frame(spectator, "hadamard", backend)
    state = _hadamard_pipeline(
        spectator, bell.destination, bell.origin, hadamard_model, bm_phys, weights, backend
    )
    entries = _extract_pauli_likelihoods(state, ideal, (1,))
    return LocalQubitError(entries["X"], entries["Z"], entries["Y"])


_IDEAL_FRAME_CACHE: dict = {}


def _ideal_frame(spectator: str, kind: str, backend):
    key = (spectator, kind)
    rows = _IDEAL_FRAME_CACHE.get(key)
    if rows is None:
        if kind == "cnot":
            state = _cnot_pipeline(spectator, None, None, None, None, None, backend)
        else:
            state = _hadamard_pipeline(spectator, None, None, None, None, None, backend)
        d0 = backend.as_float(state.dist[0])
        total = backend.as_float(state.dist.sum())
        if d0 != 1.0 or total != 1.0:
            raise AssertionError(f"noise-free {kind} teleportation is not clean")
        rows = state.Q.rows
        _IDEAL_FRAME_CACHE[key] = rows
    return rows


@dataclass(frozen=True)
class LevelReport:
    """Everything computed at one concatenation level."""

    level: int
    spectator: str
    gate_errors: GateErrorSet
    terminal: CosetErrorModel
    quality_min: float
    quality_max: float
    bell_order_mismatch: float

    def prep_probabilities(self) -> dict:
        return model_probabilities(self.gate_errors.prep.entries)

    def meas_probabilities(self) -> dict:
        return model_probabilities(self.gate_errors.meas.entries)

    def cnot_marginal_probabilities(self) -> dict:
        marginals = cnot_marginals(self.gate_errors.cnot)
        return model_probabilities(marginals)

    def cnot_total_probability(self) -> float:
        return model_total_probability(self.gate_errors.cnot.entries)

    def hadamard_probabilities(self) -> dict:
        return model_probabilities(self.gate_errors.hadamard.entries)

    def hadamard_total_probability(self) -> float:
        return model_total_probability(self.gate_errors.hadamard.entries)

    def max_gate_error_probability(self) -> float:
        """Maximum over encoded prep/meas, cnot, and Hadamard probabilities."""
        candidates = [
            max(self.prep_probabilities().values(), default=0.0),
            max(self.meas_probabilities().values(), default=0.0),
            self.cnot_total_probability(),
            self.hadamard_total_probability(),
        ]
        return max(candidates)

    def summary(self) -> dict:
        prep = self.prep_probabilities()
        cnot = self.cnot_marginal_probabilities()
        had = self.hadamard_probabilities()
        return {
            "level": self.level,
            "spectator": self.spectator,
            "quality_min": self.quality_min,
            "quality_max": self.quality_max,
            "prep_meas": {**prep, "max": max(prep.values(), default=0.0)},
            "cnot": {**cnot, "total": self.cnot_total_probability()},
            "hadamard": {**had, "total": self.hadamard_total_probability()},
            "max_gate_error_probability": self.max_gate_error_probability(),
        }


def level_step(
    prev: GateErrorSet, spectator: str, backend, level: Optional[int] = None
) -> LevelReport:
    """One level of the recursion: Bell model, independent fit, and the four
    logical gate computations, producing the next level's gate error set."""
    if level is None:
        level = prev.level + 1
    computed = compute_bell_model(prev, spectator, backend)
    weights = weights_from_marginals(cnot_marginals(prev.cnot))
    bell = fit_bell_model(computed, weights)
    e_prep_x = logical_prep_error(bell, prev.meas, Z0, weights, backend)
    e_prep_z = logical_prep_error(bell, prev.meas, XPLUS, weights, backend)
    e_meas_x = logical_meas_error(bell, prev.meas, Z0, weights, backend)
    e_meas_z = logical_meas_error(bell, prev.meas, XPLUS, weights, backend)
    prep = LocationErrorModel(1, {"X": e_prep_x, "Z": e_prep_z})
    meas = LocationErrorModel(1, {"X": e_meas_x, "Z": e_meas_z})
    cnot = logical_cnot_error(bell, prev.cnot, level, weights, backend, phys=prev)
    hadamard = logical_hadamard_error(
        bell, prev.hadamard, level, weights, backend, phys=prev
    )
    gates = GateErrorSet(level, prep, meas, cnot, hadamard.as_model(), prev.special)
    return LevelReport(
        level,
        spectator,
        gates,
        bell.destination,
        bell.quality_min,
        bell.quality_max,
        computed.order_mass_rel_diff,
    )
