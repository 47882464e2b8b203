"""Encoded-Bell-pair preparation networks and randomized two-cycle purification.

The preparation circuits are synthesized, not transcribed: a bounded
breadth-first search over |0>/|+> preparations and cnot sequences finds the
shortest block encoder whose output matches the required stabilizer lists,
and the full network feeds a physical Bell pair into one encoder per block.
Purification is the standard bilateral-cnot protocol applied transversally,
with every sacrificial qubit measured out and postselected through the
projection machinery.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .error_models import (
    BLOCK_GENERATORS,
    LOGICAL_X,
    LOGICAL_Z,
    GateErrorSet,
    LocationErrorModel,
    block_stabilizer_group,
)
from .likelihood import (
    XPLUS,
    Z0,
    NoisyStabilizerState,
    add_qubit,
    apply_error_location,
    apply_gate,
    canonicalize,
    empty_state,
    join_states,
    normalize,
    project_qubit,
    total_mass,
)
from .symplectic import GeneratorMatrix, PauliProduct, conjugate_cnot

Z_TYPE = "Ztype"
X_TYPE = "Xtype"


class NormalizationMismatchError(RuntimeError):
    """The two purification orders disagreed on total mass; both orders use the
    same gate multiset, so this indicates a bug."""


class SynthesisError(RuntimeError):
    pass


def bell_frame_rows(spectator: str) -> tuple:
    """Canonical generator ordering for the encoded Bell pair.

    Three rows per block with the spectator operator third, then the two
    encoded-Bell stabilizers XXIIXXII and ZIZIZIZI.
    """
    g1, g2, spec = BLOCK_GENERATORS[spectator]
    strings = [
        g1 + "IIII",
        g2 + "IIII",
        spec + "IIII",
        "IIII" + g1,
        "IIII" + g2,
        "IIII" + spec,
        "XXIIXXII",
        "ZIZIZIZI",
    ]
    return tuple(PauliProduct.from_string(s) for s in strings)


UNDETECTED_SYNDROMES = (64, 128, 192)  # flip only the encoded-Bell rows


@dataclass(frozen=True)
class EncodingNetwork:
    """Gate list producing one encoded block from logical input qubit 0.

    `preps` lists the bases of ancilla qubits 1..3; `cnots` is the ordered
    cnot sequence on block-local qubits.
    """

    spectator: str
    preps: tuple  # bases for qubits 1, 2, 3
    cnots: tuple  # (control, target) pairs

    def block_ops(self, offset: int = 0) -> list:
        ops = [("add", offset + q, basis) for q, basis in zip((1, 2, 3), self.preps)]
        ops += [("cnot", offset + c, offset + t) for c, t in self.cnots]
        return ops

    def gate_hash(self) -> str:
        text = f"{self.spectator};{self.preps};{self.cnots}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def _cnot_images(paulis: tuple, control: int, target: int) -> tuple:
    return tuple(conjugate_cnot(p, control, target)[0] for p in paulis)


_ALL_CNOTS = tuple(
    (c, t) for c in range(4) for t in range(4) if c != t
)


def _search_block_encoder(spectator: str) -> EncodingNetwork:
    """Bounded breadth-first search for the shortest valid block encoder."""
    group_keys = {g.key() for g in block_stabilizer_group(spectator)}
    xl = PauliProduct.from_string(LOGICAL_X)
    zl = PauliProduct.from_string(LOGICAL_Z)

    def is_goal(images: tuple) -> bool:
        x_in, z_in, s1, s2, s3 = images
        for s in (s1, s2, s3):
            if s.key() not in group_keys:
                return False
        from .symplectic import multiply

        for img, logical in ((x_in, xl), (z_in, zl)):
            prod, _ = multiply(img, logical)
            if prod.key() not in group_keys:
                return False
        return True

    prep_choices = list(itertools.product((Z0, XPLUS), repeat=3))
    frontiers = []
    for preps in prep_choices:
        start = (
            PauliProduct.single(4, 0, "X"),
            PauliProduct.single(4, 0, "Z"),
            PauliProduct.single(4, 1, "Z" if preps[0] == Z0 else "X"),
            PauliProduct.single(4, 2, "Z" if preps[1] == Z0 else "X"),
            PauliProduct.single(4, 3, "Z" if preps[2] == Z0 else "X"),
        )
        frontiers.append({tuple(p.key() for p in start): (start, ())})
    for depth in range(0, 7):
        for preps, frontier in zip(prep_choices, frontiers):
            goals = [
                seq for key, (imgs, seq) in sorted(frontier.items()) if is_goal(imgs)
            ]
            if goals:
                return EncodingNetwork(spectator, tuple(preps), min(goals))
        for i, frontier in enumerate(frontiers):
            new_frontier = {}
            for key, (imgs, seq) in sorted(frontier.items()):
                for c, t in _ALL_CNOTS:
                    nxt = _cnot_images(imgs, c, t)
                    nkey = tuple(p.key() for p in nxt)
                    nseq = seq + ((c, t),)
                    if nkey not in new_frontier or nseq < new_frontier[nkey][1]:
                        new_frontier[nkey] = (nxt, nseq)
            frontiers[i] = new_frontier
    raise SynthesisError(f"no block encoder found for spectator {spectator!r}")


_NETWORK_CACHE: dict = {}


def synthesize_encoding_network(spectator: str) -> EncodingNetwork:
    """Deterministic minimal-cnot block encoder, validated on construction."""
    net = _NETWORK_CACHE.get(spectator)
    if net is None:
        net = _search_block_encoder(spectator)
        validate_encoding_network(net)
        _NETWORK_CACHE[spectator] = net
    return net


def validate_encoding_network(net: EncodingNetwork) -> None:
    """Noise-free output of the full Bell network must match the canonical
    stabilizer frame exactly (delta distribution at zero syndrome)."""
    from .backends import DoubleBackend

    backend = DoubleBackend()
    state = run_network(bell_network_ops(net), None, backend)
    state = canonicalize(state, bell_frame_rows(net.spectator))
    dist = state.dist
    if dist[0] != 1.0 or dist.sum() != 1.0:
        raise SynthesisError("synthesized network does not produce the target state")


def bell_network_ops(net: EncodingNetwork) -> list:
    """Full 8-qubit preparation: physical Bell pair into two block encoders."""
    adds = [("add", 0, XPLUS), ("add", 4, Z0)]
    adds += [op for op in net.block_ops(0) if op[0] == "add"]
    adds += [op for op in net.block_ops(4) if op[0] == "add"]
    adds.sort(key=lambda op: op[1])
    ops = adds + [("cnot", 0, 4)]
    ops += [op for op in net.block_ops(0) if op[0] != "add"]
    ops += [op for op in net.block_ops(4) if op[0] != "add"]
    return ops


def _prep_error(gates: GateErrorSet, basis: str) -> Optional[LocationErrorModel]:
    if gates is None:
        return None
    label = "X" if basis == Z0 else "Z"
    return gates.prep.restricted((label,))


def _meas_error(gates: GateErrorSet, basis: str) -> Optional[LocationErrorModel]:
    if gates is None:
        return None
    label = "X" if basis == Z0 else "Z"
    return gates.meas.restricted((label,))


def run_network(
    ops: Sequence[tuple],
    gates: Optional[GateErrorSet],
    backend,
    state: Optional[NoisyStabilizerState] = None,
) -> NoisyStabilizerState:
    """Interpret a network, inserting each element's error location after it
    (before it, for measurements). Wire indices of adds must arrive in order.
    """
    if state is None:
        state = empty_state(backend)
    for op in ops:
        kind = op[0]
        if kind == "add":
            wire, basis = op[1], op[2]
            if wire != state.n:
                raise ValueError(f"add for wire {wire} arrived out of order")
            state = add_qubit(state, basis)
            model = _prep_error(gates, basis)
            if model is not None and not model.is_zero():
                state = apply_error_location(state, model, (wire,))
        elif kind == "cnot":
            state = apply_gate(state, op)
            if gates is not None and not gates.cnot.is_zero():
                state = apply_error_location(state, gates.cnot, (op[1], op[2]))
        elif kind == "hadamard":
            state = apply_gate(state, op)
            if gates is not None and not gates.hadamard.is_zero():
                state = apply_error_location(state, gates.hadamard, (op[1],))
        elif kind == "measure":
            qubit, basis = op[1], op[2]
            model = _meas_error(gates, basis)
            if model is not None and not model.is_zero():
                state = apply_error_location(state, model, (qubit,))
            state = project_qubit(state, qubit, basis)
        else:
            raise ValueError(f"unknown op {op!r}")
    return state


def prepare_noisy_bell(
    gates: GateErrorSet, spectator: str, backend
) -> NoisyStabilizerState:
    """Noisy encoded Bell pair in the canonical frame (unnormalized)."""
    net = synthesize_encoding_network(spectator)
    state = run_network(bell_network_ops(net), gates, backend)
    return canonicalize(state, bell_frame_rows(spectator))


def _infer_spectator(state: NoisyStabilizerState) -> str:
    row2 = str(state.Q.rows[2])[:4]
    for spectator, gens in BLOCK_GENERATORS.items():
        if gens[2] == row2:
            return spectator
    raise ValueError("state is not in a recognized Bell frame")


def purify_once(
    kept: NoisyStabilizerState,
    sacrifice: NoisyStabilizerState,
    kind: str,
    gates: GateErrorSet,
) -> NoisyStabilizerState:
    """One purification step; Z-type detects X errors, X-type detects Z errors.

    Z-type: transversal cnots kept -> sacrifice on both halves, sacrifice
    measured in Z. X-type: cnot direction reversed, X-basis measurement.
    All sixteen qubits are live between the cnots and the projections.
    """
    if kept.n != 8 or sacrifice.n != 8:
        raise ValueError("purification needs two 8-qubit encoded Bell pairs")
    spectator = _infer_spectator(kept)
    if _infer_spectator(sacrifice) != spectator:
        raise ValueError("spectator mismatch between kept and sacrificial pairs")
    state = join_states(kept, sacrifice)
    if kind == Z_TYPE:
        pairs = [(i, i + 8) for i in range(8)]
        meas_basis = Z0
    elif kind == X_TYPE:
        pairs = [(i + 8, i) for i in range(8)]
        meas_basis = XPLUS
    else:
        raise ValueError(f"unknown purification kind {kind!r}")
    for c, t in pairs:
        state = apply_gate(state, ("cnot", c, t))
        if not gates.cnot.is_zero():
            state = apply_error_location(state, gates.cnot, (c, t))
    meas_model = _meas_error(gates, meas_basis)
    if meas_model is not None and not meas_model.is_zero():
        for q in range(8, 16):
            state = apply_error_location(state, meas_model, (q,))
    for q in range(15, 7, -1):
        state = project_qubit(state, q, meas_basis)
    return canonicalize(state, bell_frame_rows(spectator))


@dataclass(frozen=True)
class ComputedBellModel:
    """Normalized 256-entry syndrome distribution of the purified Bell pair.

    `order_mass_rel_diff` records the relative disagreement of the two
    purification orders' total masses (the largest over the cycles).
    """

    spectator: str
    dist: object
    backend: object
    network_hash: str
    order_mass_rel_diff: float = 0.0

    def serialize_records(self) -> list:
        return [
            (format(s, "08b")[::-1], self.dist[s]) for s in range(256)
        ]


def _rel_diff(backend, a, b) -> float:
    from .backends import Poly

    if isinstance(a, Poly):
        fa, fb = a.upper(), b.upper()
    else:
        fa, fb = backend.as_float(a), backend.as_float(b)
    return abs(fa - fb) / max(abs(fa), abs(fb), 1e-300)


def purification_cycle(
    kept: NoisyStabilizerState,
    raw: NoisyStabilizerState,
    gates: GateErrorSet,
    first: str = Z_TYPE,
    purified_sacrifices: bool = True,
) -> NoisyStabilizerState:
    """One purification cycle: a first-type step with a fresh unpurified
    sacrifice, then the opposite-type step.

    With `purified_sacrifices` the second step's sacrifice is itself purified
    by one first-type step, which scrubs exactly the error components the
    second step's transversal cnots would otherwise leak unchecked onto the
    kept pair; this is what suppresses undetected logical errors to second
    order. With raw second sacrifices (the plain recurrence protocol) the
    leak keeps first-order logical mass, which the formal check exposes.
    """
    second = X_TYPE if first == Z_TYPE else Z_TYPE
    kept = purify_once(kept, raw, first, gates)
    sac = purify_once(raw, raw, first, gates) if purified_sacrifices else raw
    return purify_once(kept, sac, second, gates)


def compute_bell_model(
    gates: GateErrorSet,
    spectator: str,
    backend,
    cycles: int = 2,
    purified_sacrifices: bool = True,
    order_check: bool = False,
) -> ComputedBellModel:
    """Purified encoded-Bell-pair error model.

    Each cycle applies one Z-type and one X-type purification step; the
    canonical order is Z-type first. The reversed order agrees with the
    canonical one exactly at first order in the error likelihoods (their
    total masses differ only at second order, recorded on the model when
    `order_check` is set), so the canonical order stands in for the
    randomized order. The result is normalized to 1 at the zero syndrome and
    symmetrized by block swap so origin and destination marginals agree,
    which realizes the randomized orientation of the pair.
    """
    net = synthesize_encoding_network(spectator)
    raw = prepare_noisy_bell(gates, spectator, backend)
    half = backend.scalar(Fraction(1, 2))
    kept = raw
    mismatch = 0.0
    for _ in range(cycles):
        nxt = purification_cycle(kept, raw, gates, Z_TYPE, purified_sacrifices)
        if order_check:
            rev = purification_cycle(kept, raw, gates, X_TYPE, purified_sacrifices)
            mismatch = max(
                mismatch, _rel_diff(backend, total_mass(nxt), total_mass(rev))
            )
        kept = nxt
    kept = normalize(kept)
    swapped = _block_swap(kept)
    dist = (kept.dist + swapped) * half
    return ComputedBellModel(spectator, dist, backend, net.gate_hash(), mismatch)


def _block_swap(state: NoisyStabilizerState):
    """Distribution relabeled under exchanging origin and destination blocks.

    Swapping the blocks permutes syndrome bits (0,1,2) <-> (3,4,5); the two
    encoded-Bell rows are swap-invariant.
    """
    idx = np.arange(len(state.dist), dtype=np.intp)
    low = idx & 0b000111
    mid = (idx >> 3) & 0b000111
    rest = idx & ~np.intp(0b111111)
    src = rest | (low << 3) | mid
    return state.dist[src]
