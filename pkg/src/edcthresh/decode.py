"""Bottom-up decoding error analysis, injection bounds, and budget arithmetic.

Decoding unwinds one code block at a time with the exact inverse of the
synthesized encoding network. All decode-step gates use physical (level-0)
error models because bottom-up decoding always acts on already-decoded
physical qubits; the three non-data outputs are measured in their encoding
bases and postselected.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .bellprep import synthesize_encoding_network
from .error_models import (
    CosetErrorModel,
    GateErrorSet,
    PauliWeights,
    PhysicalErrorParams,
    cnot_marginals,
    weights_from_marginals,
)
from .gates import LevelReport, LocalQubitError, _block_with_reference, _Wires
from .likelihood import XPLUS, Z0, apply_gate
from .symplectic import PauliProduct, flip_pattern

DISTILLATION_THRESHOLD = 0.35


def decode_step(
    terminal: CosetErrorModel,
    incoming: LocalQubitError,
    phys: GateErrorSet,
    spectator: str,
    backend,
) -> LocalQubitError:
    """Error pushed into one decoded qubit.

    The block carries the level's terminal coset model plus the incoming
    per-qubit error from lower levels; the inverse encoding network runs with
    physical gate errors and the non-data qubits are measured out in their
    preparation bases with postselection.
    """
    weights = weights_from_marginals(cnot_marginals(phys.cnot))
    state = _block_with_reference(spectator, backend, terminal, weights)
    wires = _Wires(state, ["b0", "b1", "b2", "b3", "ref"])
    inc_model = None if incoming.is_zero() else incoming.as_model()
    for q in range(4):
        wires.local_error(f"b{q}", inc_model)
    net = synthesize_encoding_network(spectator)
    for op in reversed(net.block_ops(0)):
        if op[0] == "cnot":
            wires.cnot(f"b{op[1]}", f"b{op[2]}", phys.cnot)
        elif op[0] == "add":
            wires.measure(f"b{op[1]}", op[2], phys.meas)
    assert wires.labels == ["b0", "ref"]
    state = wires.state
    d0 = backend.as_float(state.dist[0])
    if d0 == 0.0:
        raise ZeroDivisionError("zero acceptance mass in decoding")
    values = {}
    for kind in ("X", "Z", "Y"):
        pattern = flip_pattern(state.Q, PauliProduct.single(2, 0, kind))
        values[kind] = backend.as_float(state.dist[pattern]) / d0
    return LocalQubitError(values["X"], values["Z"], values["Y"])


@dataclass(frozen=True)
class DecodeChainReport:
    """Per-level decode errors and the steady-state bound."""

    per_level: tuple  # LocalQubitError, bottom level first
    bound: float

    def totals(self) -> list:
        return [d.total_probability() for d in self.per_level]


def decode_chain(
    levels: Sequence[LevelReport], phys: GateErrorSet, backend
) -> DecodeChainReport:
    """Bottom-up chain: each level's terminal model merged with the error
    pushed up from below. The bound is the maximum total plus the last
    observed decrement, a conservative stand-in for the extrapolated
    steady state."""
    if not levels:
        raise ValueError("need at least one level report")
    incoming = LocalQubitError.zero()
    out = []
    for report in levels:
        incoming = decode_step(
            report.terminal, incoming, phys, report.spectator, backend
        )
        out.append(incoming)
    totals = [d.total_probability() for d in out]
    bound = max(totals)
    if len(totals) >= 2:
        bound += max(0.0, totals[-2] - totals[-1])
    return DecodeChainReport(tuple(out), bound)


@dataclass(frozen=True)
class InjectionReport:
    prep_probability: float
    decode_bound: float
    bell_measurement_probability: float
    total: float
    below_distillation_threshold: bool


def injection_error(decode_bound: float, phys: PhysicalErrorParams) -> InjectionReport:
    """Bound on the error of a special state injected into the top-level code:
    physical special-state preparation, the bottom-up decode bound, and one
    physical Bell measurement (a cnot plus two measurements)."""
    p_prep, p_cnot, p_meas, _, p_spec = phys.resolved()
    bell = p_cnot + 2 * p_meas
    total = p_spec + decode_bound + bell
    return InjectionReport(
        p_spec, decode_bound, bell, total, total < DISTILLATION_THRESHOLD
    )


@dataclass(frozen=True)
class BudgetReport:
    bell_measurement_probability: float
    memory_error: float
    decode_contribution: float
    total: float
    tolerance: float
    passes: bool


def budget_check(
    decode_bound: float,
    phys: PhysicalErrorParams,
    memory_error: float,
    code_tolerance: float,
) -> BudgetReport:
    """General-threshold budget: one Bell measurement, a memory allowance,
    and twice the decoding error must stay below the outer code's tolerance."""
    for name, v in (("memory_error", memory_error), ("code_tolerance", code_tolerance)):
        if not 0 <= v < 1:
            raise ValueError(f"{name}={v} outside [0, 1)")
    p_prep, p_cnot, p_meas, _, _ = phys.resolved()
    bell = p_cnot + 2 * p_meas
    total = bell + memory_error + 2 * decode_bound
    return BudgetReport(
        bell, memory_error, 2 * decode_bound, total, code_tolerance,
        total < code_tolerance,
    )
