"""Error-location models, the uniform physical parameterization, and the
32-coset block error models of the four-qubit error-detecting code.

Likelihoods are ratios of error probabilities to the no-error probability;
probability p converts to likelihood e = p / (1 - p) and back via
p = e / (1 + e). A one-qubit gate model holds up to three non-identity Pauli
entries, a cnot model up to fifteen two-qubit entries; the identity always has
implicit likelihood 1. Preparation and measurement models store an X entry
(flip of |0> preparation / Z measurement) and a Z entry (flip of |+>
preparation / X measurement); only the component relevant to a location's
basis is ever applied, so the spectator component never biases normalization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .symplectic import GeneratorMatrix, PauliProduct, multiply

PAULI_CHARS = ("I", "X", "Z", "Y")

ONE_QUBIT_PAULIS = ("X", "Z", "Y")
TWO_QUBIT_PAULIS = tuple(
    a + b for a in PAULI_CHARS for b in PAULI_CHARS if a + b != "II"
)


@dataclass(frozen=True)
class LocationErrorModel:
    """Likelihoods of non-identity Pauli products at one error location."""

    arity: int
    entries: dict  # Pauli label ("X", "ZI", ...) -> likelihood

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError("arity must be 1 or 2")
        labels = ONE_QUBIT_PAULIS if self.arity == 1 else TWO_QUBIT_PAULIS
        for label in self.entries:
            if label not in labels:
                raise ValueError(f"bad Pauli label {label!r} for arity {self.arity}")

    def pauli_entries(self) -> list:
        """Entries as (PauliProduct, likelihood), canonically ordered."""
        labels = ONE_QUBIT_PAULIS if self.arity == 1 else TWO_QUBIT_PAULIS
        return [
            (PauliProduct.from_string(label), self.entries[label])
            for label in labels
            if label in self.entries
        ]

    def restricted(self, labels: Sequence[str]) -> "LocationErrorModel":
        """Sub-model keeping only the listed Pauli entries."""
        kept = {k: v for k, v in self.entries.items() if k in labels}
        return LocationErrorModel(self.arity, kept)

    def total_likelihood(self):
        return sum(self.entries.values())

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries.values())

    def scaled(self, factor) -> "LocationErrorModel":
        return LocationErrorModel(
            self.arity, {k: v * factor for k, v in self.entries.items()}
        )


def probability_of(likelihood):
    """p = e / (1 + e)."""
    if likelihood < 0:
        raise ValueError("likelihood must be nonnegative")
    return likelihood / (1 + likelihood)


def likelihood_of(probability):
    """e = p / (1 - p)."""
    if not 0 <= probability < 1:
        raise ValueError("probability must lie in [0, 1)")
    return probability / (1 - probability)


def model_probabilities(entries: dict) -> dict:
    """Convert a jointly normalized likelihood model to per-Pauli probabilities."""
    total = sum(entries.values())
    return {k: v / (1 + total) for k, v in entries.items()}


def model_total_probability(entries: dict):
    total = sum(entries.values())
    return total / (1 + total)


@dataclass(frozen=True)
class PhysicalErrorParams:
    """Physical per-gate error probabilities.

    Defaults tie the one-qubit gates together: special-state preparation and
    measurement share p_prep, and the Hadamard probability is 1.5x p_prep.
    """

    p_prep: float
    p_cnot: float
    p_meas: Optional[float] = None
    p_hadamard: Optional[float] = None
    p_special: Optional[float] = None

    def resolved(self) -> tuple:
        p_meas = self.p_prep if self.p_meas is None else self.p_meas
        p_had = 1.5 * self.p_prep if self.p_hadamard is None else self.p_hadamard
        p_spec = self.p_prep if self.p_special is None else self.p_special
        for name, p in (
            ("p_prep", self.p_prep),
            ("p_cnot", self.p_cnot),
            ("p_meas", p_meas),
            ("p_hadamard", p_had),
            ("p_special", p_spec),
        ):
            if not 0 <= p < 1:
                raise ValueError(f"{name}={p} outside [0, 1)")
        return self.p_prep, self.p_cnot, p_meas, p_had, p_spec


@dataclass(frozen=True)
class GateErrorSet:
    """Per-level error-location models for every gate type."""

    level: int
    prep: LocationErrorModel
    meas: LocationErrorModel
    cnot: LocationErrorModel
    hadamard: LocationErrorModel
    special: LocationErrorModel

    def to_text(self) -> str:
        lines = [f"level {self.level}"]
        for name in ("prep", "meas", "cnot", "hadamard", "special"):
            model: LocationErrorModel = getattr(self, name)
            for label in sorted(model.entries):
                lines.append(f"{name} {label} {_fmt(model.entries[label])}")
        return "\n".join(lines)


def _fmt(value) -> str:
    return format(float(value), ".16e")


def uniform_physical_set(params: PhysicalErrorParams, backend=None) -> GateErrorSet:
    """Level-0 gate error models from the uniform physical parameterization.

    Each probability p becomes the likelihood e = p/(1-p); the cnot splits e_c
    evenly over the fifteen two-qubit Pauli products and the Hadamard splits
    e_h over X, Z, Y. Preparation and measurement models assign the full
    likelihood to the single Pauli relevant to each basis.
    """
    p_prep, p_cnot, p_meas, p_had, p_spec = params.resolved()

    def conv(p):
        if backend is None:
            return p / (1 - p)
        bp = backend.scalar(p)
        return bp / (backend.one - bp)

    e_p, e_c, e_m, e_h, e_s = (conv(p) for p in (p_prep, p_cnot, p_meas, p_had, p_spec))
    fifteen = backend.scalar(15) if backend is not None else 15
    three = backend.scalar(3) if backend is not None else 3
    prep = LocationErrorModel(1, {"X": e_p, "Z": e_p})
    meas = LocationErrorModel(1, {"X": e_m, "Z": e_m})
    cnot = LocationErrorModel(2, {label: e_c / fifteen for label in TWO_QUBIT_PAULIS})
    hadamard = LocationErrorModel(1, {label: e_h / three for label in ONE_QUBIT_PAULIS})
    special = LocationErrorModel(1, {"Z": e_s})
    return GateErrorSet(0, prep, meas, cnot, hadamard, special)


def zero_gate_set() -> GateErrorSet:
    return uniform_physical_set(PhysicalErrorParams(0.0, 0.0))


def cnot_marginals(cnot: LocationErrorModel) -> dict:
    """Per-Pauli single-qubit marginal likelihoods, maximized over the slots."""
    if cnot.arity != 2:
        raise ValueError("cnot model must have arity 2")
    out = {}
    for p in ONE_QUBIT_PAULIS:
        slot0 = sum(v for label, v in cnot.entries.items() if label[0] == p)
        slot1 = sum(v for label, v in cnot.entries.items() if label[1] == p)
        out[p] = max(slot0, slot1)
    return out


@dataclass(frozen=True)
class PauliWeights:
    """Negative-log likelihood weights for X, Z, Y; identity weighs nothing."""

    w_x: float
    w_z: float
    w_y: float

    def of_char(self, ch: str) -> float:
        if ch == "I":
            return 0.0
        return {"X": self.w_x, "Z": self.w_z, "Y": self.w_y}[ch]

    def of_pauli(self, p: PauliProduct) -> float:
        total = 0.0
        for q in range(p.n):
            total += self.of_char(p.char_at(q))
        return total

    @classmethod
    def unit(cls) -> "PauliWeights":
        return cls(1.0, 1.0, 1.0)


def weights_from_marginals(marginals: dict) -> PauliWeights:
    """Weights are -log of the marginal likelihoods; zero marginals weigh inf."""

    def w(p):
        m = float(marginals.get(p, 0.0))
        if m == 0.0:
            return math.inf
        return -math.log(m)

    return PauliWeights(w("X"), w("Z"), w("Y"))


SPECTATOR_ZERO = "zero"  # spectator qubit in |0>_S, stabilizer row IIZZ
SPECTATOR_PLUS = "plus"  # spectator qubit in |+>_S, stabilizer row IXIX

BLOCK_GENERATORS = {
    SPECTATOR_ZERO: ("XXXX", "ZZZZ", "IIZZ"),
    SPECTATOR_PLUS: ("XXXX", "ZZZZ", "IXIX"),
}
LOGICAL_X = "XXII"
LOGICAL_Z = "ZIZI"


def block_stabilizer_group(spectator: str) -> list:
    """All 8 elements of the block stabilizer group, deterministic order."""
    gens = [PauliProduct.from_string(s) for s in BLOCK_GENERATORS[spectator]]
    elements = []
    for mask in range(8):
        acc = PauliProduct.identity(4)
        for b in range(3):
            if (mask >> b) & 1:
                acc, _ = multiply(acc, gens[b])
        elements.append(acc)
    return elements


@dataclass(frozen=True)
class CosetTable:
    """The 32 cosets of the block stabilizer inside the 4-qubit Pauli group."""

    spectator: str
    members: tuple  # 32 tuples of 8 PauliProducts, sorted within each coset
    index_of: dict  # (x_bits, z_bits) -> coset index

    @classmethod
    def build(cls, spectator: str) -> "CosetTable":
        group = block_stabilizer_group(spectator)
        seen = {}
        cosets = []
        for x in range(16):
            for z in range(16):
                if (x, z) in seen:
                    continue
                rep = PauliProduct(4, x, z)
                coset = sorted(
                    (multiply(rep, g)[0] for g in group), key=PauliProduct.key
                )
                cosets.append(tuple(coset))
                for m in coset:
                    seen[m.key()] = None
        cosets.sort(key=lambda c: c[0].key())
        index_of = {}
        for idx, coset in enumerate(cosets):
            for m in coset:
                index_of[m.key()] = idx
        return cls(spectator, tuple(cosets), index_of)

    def coset_of(self, p: PauliProduct) -> int:
        return self.index_of[p.key()]

    def min_weight_member(self, coset_index: int, weights: PauliWeights) -> tuple:
        """(representative, weight): the minimum-weight member, ties broken by
        the canonical (x_bits, z_bits) order the members are stored in."""
        best = None
        best_w = math.inf
        for m in self.members[coset_index]:
            w = weights.of_pauli(m)
            if w < best_w:
                best, best_w = m, w
        return best, best_w


_COSET_CACHE: dict = {}


def enumerate_cosets(spectator: str) -> CosetTable:
    table = _COSET_CACHE.get(spectator)
    if table is None:
        table = CosetTable.build(spectator)
        _COSET_CACHE[spectator] = table
    return table


@dataclass(frozen=True)
class CosetErrorModel:
    """Block error model: one likelihood per coset, identity coset fixed at 1."""

    spectator: str
    likelihoods: tuple  # 32 scalars, index 0 is the identity coset

    def __post_init__(self):
        if len(self.likelihoods) != 32:
            raise ValueError("need exactly 32 coset likelihoods")

    def error_entries(self, weights: PauliWeights) -> list:
        """(representative, likelihood) for the 31 non-identity cosets."""
        table = enumerate_cosets(self.spectator)
        out = []
        for c in range(1, 32):
            rep, _ = table.min_weight_member(c, weights)
            out.append((rep, self.likelihoods[c]))
        return out

    def to_rows(self, weights: PauliWeights) -> list:
        table = enumerate_cosets(self.spectator)
        rows = []
        for c in range(32):
            rep, _ = table.min_weight_member(c, weights)
            rows.append((str(rep), self.likelihoods[c]))
        return rows

    @classmethod
    def zero(cls, spectator: str) -> "CosetErrorModel":
        return cls(spectator, (1.0,) + (0.0,) * 31)
