"""The independence heuristic for the purified encoded Bell pair.

The computed 256-entry syndrome distribution is attributed to pairs of
origin/destination cosets by minimum weight, then bounded by a block-wise
independent model: the minimal likelihoods satisfying the ratio constraints
e_o(c1)/e(0) >= e(c1,c2)/e(0,c2) wherever the weight of s(0,c2) is below the
weight of s(c1,c2) (and symmetrically). Quality is the range of ratios between
the induced independent likelihoods and the computed ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .bellprep import ComputedBellModel, bell_frame_rows
from .error_models import (
    CosetErrorModel,
    PauliWeights,
    enumerate_cosets,
)
from .likelihood import NoisyStabilizerState
from .symplectic import GeneratorMatrix, PauliProduct, flip_pattern


@dataclass(frozen=True)
class BellErrorModel:
    """Fitted block-wise independent Bell error model with quality ratios."""

    origin: CosetErrorModel
    destination: CosetErrorModel
    quality_min: float
    quality_max: float

    def to_rows(self, weights: PauliWeights) -> dict:
        return {
            "origin": self.origin.to_rows(weights),
            "destination": self.destination.to_rows(weights),
            "quality_min": self.quality_min,
            "quality_max": self.quality_max,
        }


@dataclass(frozen=True)
class PairAttribution:
    """Computed likelihoods attributed to minimum-weight coset pairs."""

    spectator: str
    e_pairs: object  # 32x32 array, mostly zero
    s_of_pair: object  # 32x32 int array of Bell syndromes
    backend: object


class _Frame:
    """Coset geometry of the canonical Bell frame for one spectator type."""

    def __init__(self, spectator: str):
        self.spectator = spectator
        self.rows = bell_frame_rows(spectator)
        self.Q = GeneratorMatrix(8, self.rows)
        table = enumerate_cosets(spectator)
        self.table = table
        # Flip pattern of each coset on each block; any member works because
        # the block stabilizer commutes with every row of the frame.
        self.pattern_origin = np.zeros(32, dtype=np.int64)
        self.pattern_dest = np.zeros(32, dtype=np.int64)
        for c in range(32):
            members = table.members[c]
            pats_o = {
                flip_pattern(self.Q, m.embed(8, (0, 1, 2, 3))) for m in members
            }
            pats_d = {
                flip_pattern(self.Q, m.embed(8, (4, 5, 6, 7))) for m in members
            }
            if len(pats_o) != 1 or len(pats_d) != 1:
                raise AssertionError("coset members disagree on flip pattern")
            self.pattern_origin[c] = pats_o.pop()
            self.pattern_dest[c] = pats_d.pop()
        self.s_of_pair = self.pattern_origin[:, None] ^ self.pattern_dest[None, :]
        self.pairs_by_syndrome: dict = {}
        for c1 in range(32):
            for c2 in range(32):
                self.pairs_by_syndrome.setdefault(
                    int(self.s_of_pair[c1, c2]), []
                ).append((c1, c2))
        if any(len(v) != 4 for v in self.pairs_by_syndrome.values()):
            raise AssertionError("each Bell syndrome must arise from 4 coset pairs")

    def qubit_patterns(self):
        """Flip patterns of single-qubit X, Z, Y on each of the 8 qubits."""
        out = []
        for q in range(8):
            out.append(
                tuple(
                    flip_pattern(self.Q, PauliProduct.single(8, q, kind))
                    for kind in ("X", "Z", "Y")
                )
            )
        return out


_FRAMES: dict = {}


def _frame(spectator: str) -> _Frame:
    fr = _FRAMES.get(spectator)
    if fr is None:
        fr = _Frame(spectator)
        _FRAMES[spectator] = fr
    return fr


def syndrome_weights(weights: PauliWeights, spectator: str) -> np.ndarray:
    """Minimum additive Pauli weight producing each 8-bit Bell syndrome.

    Dynamic program over the eight qubits; equivalent to minimizing over all
    4^8 Pauli products.
    """
    fr = _frame(spectator)
    w = np.full(256, math.inf)
    w[0] = 0.0
    per_pauli = (weights.w_x, weights.w_z, weights.w_y)
    idx = np.arange(256)
    for q, patterns in enumerate(fr.qubit_patterns()):
        best = w
        for pat, wt in zip(patterns, per_pauli):
            if math.isinf(wt):
                continue
            best = np.minimum(best, w[idx ^ pat] + wt)
        w = best
    return w


def coset_weights(weights: PauliWeights, spectator: str) -> np.ndarray:
    table = enumerate_cosets(spectator)
    return np.array(
        [table.min_weight_member(c, weights)[1] for c in range(32)]
    )


def attribute_pairs(model: ComputedBellModel, weights: PauliWeights) -> PairAttribution:
    """Assign each syndrome's computed likelihood to its minimum-weight pair.

    Ties break on the canonical (c1, c2) index order; non-minimal pairs get 0.
    """
    fr = _frame(model.spectator)
    cw = coset_weights(weights, model.spectator)
    backend = model.backend
    e_pairs = np.full((32, 32), backend.zero, dtype=object)
    for s, pairs in sorted(fr.pairs_by_syndrome.items()):
        value = model.dist[s]
        if backend.is_zero(value):
            continue
        best = min(pairs, key=lambda p: (cw[p[0]] + cw[p[1]], p))
        e_pairs[best] = value
    return PairAttribution(model.spectator, e_pairs, fr.s_of_pair.copy(), model.backend)


def fit_independent(
    attr: PairAttribution, weights: PauliWeights
) -> Tuple[CosetErrorModel, CosetErrorModel]:
    """Minimal feasible block-wise independent likelihoods.

    The constraint system is separable per coset, so the pointwise maximum of
    the qualifying ratios is the unique minimal solution. Pairs whose
    denominator likelihood is zero impose no constraint.
    """
    backend = attr.backend
    sw = syndrome_weights(weights, attr.spectator)
    e = attr.e_pairs
    s = attr.s_of_pair
    e00 = e[0, 0]
    if backend.is_zero(e00):
        raise ValueError("zero-syndrome likelihood must be positive")
    origin = [None] * 32
    dest = [None] * 32
    origin[0] = backend.one
    dest[0] = backend.one
    for c1 in range(1, 32):
        best = None
        for c2 in range(32):
            denom = e[0, c2]
            if backend.is_zero(denom) or backend.is_zero(e[c1, c2]):
                continue
            if not sw[s[0, c2]] < sw[s[c1, c2]]:
                continue
            ratio = (e[c1, c2] / denom) * e00
            if best is None or backend.as_float(ratio) > backend.as_float(best):
                best = ratio
        origin[c1] = backend.zero if best is None else best
    for c2 in range(1, 32):
        best = None
        for c1 in range(32):
            denom = e[c1, 0]
            if backend.is_zero(denom) or backend.is_zero(e[c1, c2]):
                continue
            if not sw[s[c1, 0]] < sw[s[c1, c2]]:
                continue
            ratio = (e[c1, c2] / denom) * e00
            if best is None or backend.as_float(ratio) > backend.as_float(best):
                best = ratio
        dest[c2] = backend.zero if best is None else best
    spectator = attr.spectator
    return (
        CosetErrorModel(spectator, tuple(origin)),
        CosetErrorModel(spectator, tuple(dest)),
    )


def induced_distribution(
    origin: CosetErrorModel, destination: CosetErrorModel, spectator: str
) -> np.ndarray:
    """256-entry distribution induced by the independent pair of coset models."""
    fr = _frame(spectator)
    eo = np.array([float(v) for v in origin.likelihoods])
    ed = np.array([float(v) for v in destination.likelihoods])
    out = np.zeros(256)
    prod = np.outer(eo, ed)
    np.add.at(out, fr.s_of_pair.ravel(), prod.ravel())
    return out


def quality(
    origin: CosetErrorModel,
    destination: CosetErrorModel,
    model: ComputedBellModel,
) -> Tuple[float, float]:
    """Min and max ratios of induced over computed normalized likelihoods."""
    ind = induced_distribution(origin, destination, model.spectator)
    ind = ind / ind[0]
    backend = model.backend
    lo, hi = math.inf, -math.inf
    for s in range(256):
        value = model.dist[s]
        if backend.is_zero(value):
            continue
        ratio = ind[s] / backend.as_float(value)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi


def fit_bell_model(model: ComputedBellModel, weights: PauliWeights) -> BellErrorModel:
    """Attribution, independent fit, and quality in one step."""
    attr = attribute_pairs(model, weights)
    origin, destination = fit_independent(attr, weights)
    qmin, qmax = quality(origin, destination, model)
    return BellErrorModel(origin, destination, qmin, qmax)
