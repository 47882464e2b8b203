"""Configuration, orchestration, and data emission.

Single-point multi-level reports, logarithmic grid sweeps of the threshold
map, and the formal-mode verification of error suppression orders. Outputs
are deterministic: fixed iteration orders, sorted grid rows, and fixed
decimal formatting.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

from .backends import DoubleBackend, PolyBackend, backend_from_spec
from .bellprep import UNDETECTED_SYNDROMES, compute_bell_model
from .decode import (
    BudgetReport,
    DecodeChainReport,
    InjectionReport,
    budget_check,
    decode_chain,
    injection_error,
)
from .error_models import (
    ONE_QUBIT_PAULIS,
    TWO_QUBIT_PAULIS,
    GateErrorSet,
    LocationErrorModel,
    PhysicalErrorParams,
    uniform_physical_set,
)
from .gates import LevelReport, level_step
from .indfit import syndrome_weights
from .likelihood import ZeroAcceptanceError
from .error_models import PauliWeights

SPECTATOR_CHOICES = ("plus", "zero")
DEFAULT_SCHEDULE = ("plus", "zero", "zero", "zero", "plus")


def default_schedule(levels: int) -> tuple:
    """First level |+>_S, then |0>_S, with level five back to |+>_S, matching
    the example runs; extended with |0>_S beyond that."""
    out = []
    for i in range(levels):
        out.append(DEFAULT_SCHEDULE[i] if i < len(DEFAULT_SCHEDULE) else "zero")
    return tuple(out)


@dataclass(frozen=True)
class RunConfig:
    p_prep: float
    p_cnot: float
    p_meas: Optional[float] = None
    p_hadamard: Optional[float] = None
    p_special: Optional[float] = None
    levels: int = 5
    spectator_schedule: Optional[tuple] = None
    backend: str = "double"
    failure_cutoff: float = 0.25
    memory_error: float = 0.004
    code_tolerance: float = 0.11
    report_path: Optional[str] = None
    json_path: Optional[str] = None

    def schedule(self) -> tuple:
        sched = self.spectator_schedule or default_schedule(self.levels)
        if len(sched) != self.levels:
            raise ValueError("spectator schedule length must equal levels")
        for s in sched:
            if s not in SPECTATOR_CHOICES:
                raise ValueError(f"bad spectator {s!r}")
        return tuple(sched)

    def params(self) -> PhysicalErrorParams:
        return PhysicalErrorParams(
            self.p_prep, self.p_cnot, self.p_meas, self.p_hadamard, self.p_special
        )


@dataclass(frozen=True)
class GridConfig:
    cnot_values: Optional[tuple] = None
    prep_values: Optional[tuple] = None
    extra_cnot_values: tuple = ()
    levels: int = 4
    failure_cutoff: float = 0.25
    backend: str = "double"
    csv_path: Optional[str] = None
    workers: int = 0

    def axes(self) -> tuple:
        cnot = self.cnot_values or default_grid_axis()
        prep = self.prep_values or default_grid_axis()
        return tuple(cnot), tuple(prep)


def default_grid_axis() -> tuple:
    """Ten geometric values with ratio 2 topping out at 0.05."""
    return tuple(0.05 * 2.0 ** (k - 9) for k in range(10))


EXTRA_CNOT_VALUES = (0.05 * 2.0**0.5, 0.05 * 2.0**-0.5)  # about 0.0707 and 0.0354


def _fmt(x: float) -> str:
    return format(float(x), ".12e")


@dataclass
class PointResult:
    config: RunConfig
    reports: List[LevelReport]
    chain: Optional[DecodeChainReport]
    injection: Optional[InjectionReport]
    budget: Optional[BudgetReport]
    saturated_level: Optional[int]

    def to_text(self) -> str:
        lines = [
            "error probabilities: "
            f"p_prep={_fmt(self.config.p_prep)} p_cnot={_fmt(self.config.p_cnot)}"
        ]
        for rep, d in zip(self.reports, self._decode_rows()):
            s = rep.summary()
            lines.append(f"level {rep.level}  spectator: {rep.spectator}")
            lines.append(
                f"  independence quality  min {rep.quality_min:.9f}  max {rep.quality_max:.6g}"
            )
            pm = s["prep_meas"]
            lines.append(
                f"  prep/meas error   X: {_fmt(pm['X'])}  Z: {_fmt(pm['Z'])}  max: {_fmt(pm['max'])}"
            )
            cn = s["cnot"]
            lines.append(
                f"  cnot marginal     X: {_fmt(cn['X'])}  Z: {_fmt(cn['Z'])}  Y: {_fmt(cn['Y'])}  total: {_fmt(cn['total'])}"
            )
            hh = s["hadamard"]
            lines.append(
                f"  hadamard          X: {_fmt(hh['X'])}  Z: {_fmt(hh['Z'])}  Y: {_fmt(hh['Y'])}  total: {_fmt(hh['total'])}"
            )
            if d is not None:
                dp = d.probabilities()
                lines.append(
                    f"  decode            X: {_fmt(dp['X'])}  Z: {_fmt(dp['Z'])}  Y: {_fmt(dp['Y'])}  total: {_fmt(d.total_probability())}"
                )
        if self.saturated_level is not None:
            lines.append(f"saturated at level {self.saturated_level}")
        if self.chain is not None:
            lines.append(f"decode bound: {_fmt(self.chain.bound)}")
        if self.injection is not None:
            inj = self.injection
            lines.append(
                f"injection: total {_fmt(inj.total)} "
                f"({'below' if inj.below_distillation_threshold else 'above'} distillation threshold)"
            )
        if self.budget is not None:
            b = self.budget
            lines.append(
                f"budget: total {_fmt(b.total)} tolerance {_fmt(b.tolerance)} "
                f"{'pass' if b.passes else 'fail'}"
            )
        return "\n".join(lines) + "\n"

    def _decode_rows(self):
        if self.chain is None:
            return [None] * len(self.reports)
        rows = list(self.chain.per_level)
        rows += [None] * (len(self.reports) - len(rows))
        return rows

    def to_dict(self) -> dict:
        out = {
            "config": {
                "p_prep": self.config.p_prep,
                "p_cnot": self.config.p_cnot,
                "levels": self.config.levels,
                "spectator_schedule": list(self.config.schedule()),
                "backend": self.config.backend,
            },
            "levels": [],
            "saturated_level": self.saturated_level,
        }
        for rep, d in zip(self.reports, self._decode_rows()):
            row = rep.summary()
            row["bell_order_mismatch"] = rep.bell_order_mismatch
            if d is not None:
                row["decode"] = {**d.probabilities(), "total": d.total_probability()}
            out["levels"].append(row)
        if self.chain is not None:
            out["decode_bound"] = self.chain.bound
        if self.injection is not None:
            out["injection"] = vars(self.injection).copy()
        if self.budget is not None:
            out["budget"] = vars(self.budget).copy()
        return out


def run_point(config: RunConfig) -> PointResult:
    """Level recursion, decode chain, and the injection/budget reports."""
    backend = backend_from_spec(config.backend)
    params = config.params()
    phys = uniform_physical_set(params)
    schedule = config.schedule()
    prev = phys
    reports: List[LevelReport] = []
    saturated = None
    for level, spectator in enumerate(schedule, start=1):
        try:
            rep = level_step(prev, spectator, backend, level=level)
        except (ZeroAcceptanceError, ZeroDivisionError) as exc:
            raise RuntimeError(f"level {level} aborted: {exc}") from exc
        reports.append(rep)
        prev = rep.gate_errors
        if rep.max_gate_error_probability() >= config.failure_cutoff:
            saturated = level
            break
    chain = injection = budget = None
    if reports:
        try:
            chain = decode_chain(reports, phys, backend)
        except (ZeroAcceptanceError, ZeroDivisionError) as exc:
            raise RuntimeError(f"decode chain aborted: {exc}") from exc
        injection = injection_error(chain.bound, params)
        budget = budget_check(
            chain.bound, params, config.memory_error, config.code_tolerance
        )
    result = PointResult(config, reports, chain, injection, budget, saturated)
    if config.report_path:
        with open(config.report_path, "w") as fh:
            fh.write(result.to_text())
    if config.json_path:
        with open(config.json_path, "w") as fh:
            json.dump(result.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    return result


GRID_CSV_HEADER = "p_cnot,p_prep,level,max_gate_error_probability,quality_max,saturated"


def _grid_point(args) -> list:
    p_cnot, p_prep, levels, cutoff, backend_spec = args
    backend = backend_from_spec(backend_spec)
    prev = uniform_physical_set(PhysicalErrorParams(p_prep, p_cnot))
    schedule = default_schedule(levels)
    rows = []
    for level, spectator in enumerate(schedule, start=1):
        try:
            rep = level_step(prev, spectator, backend, level=level)
        except Exception:
            rows.append((p_cnot, p_prep, level, float("nan"), float("nan"), True))
            break
        prob = rep.max_gate_error_probability()
        saturated = prob >= cutoff
        rows.append((p_cnot, p_prep, level, prob, rep.quality_max, saturated))
        prev = rep.gate_errors
        if saturated:
            break
    return rows


def run_grid(config: GridConfig) -> list:
    """Threshold-map sweep; one CSV row per computed (point, level)."""
    cnot_axis, prep_axis = config.axes()
    cnot_values = tuple(sorted(set(cnot_axis) | set(config.extra_cnot_values)))
    tasks = [
        (pc, pp, config.levels, config.failure_cutoff, config.backend)
        for pc in cnot_values
        for pp in prep_axis
    ]
    rows: list = []
    workers = config.workers or os.cpu_count() or 1
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(_grid_point, tasks):
                rows.extend(chunk)
    else:
        for task in tasks:
            rows.extend(_grid_point(task))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    if config.csv_path:
        with open(config.csv_path, "w") as fh:
            fh.write(GRID_CSV_HEADER + "\n")
            for r in rows:
                fh.write(
                    f"{_fmt(r[0])},{_fmt(r[1])},{r[2]},{_fmt(r[3])},{_fmt(r[4])},{int(r[5])}\n"
                )
    return rows


@dataclass(frozen=True)
class FormalCheckResult:
    passed: bool
    cycles: int
    degree_cap: int
    e_max: float
    undetected_failures: tuple
    degree_failures: tuple

    def to_text(self) -> str:
        lines = [
            f"formal check: cycles={self.cycles} degree_cap={self.degree_cap} e_max={_fmt(self.e_max)}",
            f"undetected-suppression failures: {list(self.undetected_failures)}",
            f"degree-equals-weight failures: {list(self.degree_failures)}",
            "PASS" if self.passed else "FAIL",
        ]
        return "\n".join(lines) + "\n"


def run_formal_check(
    degree_cap: int = 6,
    e_max: float = 1.0 / 400,
    spectator: str = "plus",
    cycles: int = 2,
    purified_sacrifices: bool = True,
) -> FormalCheckResult:
    """Polynomial-backend verification of the error-suppression orders.

    With every non-identity Pauli at every location carrying likelihood e,
    asserts that each Bell-pair syndrome's minimum likelihood degree equals
    its minimum Pauli weight under unit weights, and that the syndromes
    whose coset pairs imply an undetected logical error have degree >= 2.
    """
    backend = PolyBackend(degree_cap, e_max)
    e = backend.monomial(1.0, 1)
    prep = LocationErrorModel(1, {"X": e, "Z": e})
    meas = LocationErrorModel(1, {"X": e, "Z": e})
    cnot = LocationErrorModel(2, {label: e for label in TWO_QUBIT_PAULIS})
    hadamard = LocationErrorModel(1, {label: e for label in ONE_QUBIT_PAULIS})
    gates = GateErrorSet(0, prep, meas, cnot, hadamard, LocationErrorModel(1, {"Z": e}))
    model = compute_bell_model(
        gates, spectator, backend, cycles=cycles, purified_sacrifices=purified_sacrifices
    )
    weights = syndrome_weights(PauliWeights.unit(), spectator)
    degrees = model.dist.min_degrees()
    undetected_failures = []
    for s in UNDETECTED_SYNDROMES:
        deg = degrees[s]
        if deg is not None and deg < 2:
            undetected_failures.append((s, deg))
    degree_failures = []
    for s in range(256):
        w = int(round(weights[s]))
        deg = degrees[s]
        if w <= degree_cap:
            if deg != w:
                degree_failures.append((s, w, deg))
        else:
            if deg is not None and deg <= degree_cap:
                degree_failures.append((s, w, deg))
    passed = not undetected_failures and not degree_failures
    return FormalCheckResult(
        passed, cycles, degree_cap, e_max,
        tuple(undetected_failures), tuple(degree_failures),
    )


def _read_config_file(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edcthresh",
        description="Threshold analysis for postselected computation with "
        "concatenated four-qubit error-detecting codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="single-point multi-level report")
    point.add_argument("--config", help="flat key=value config file")
    point.add_argument("--p-prep", type=float)
    point.add_argument("--p-cnot", type=float)
    point.add_argument("--p-meas", type=float)
    point.add_argument("--p-hadamard", type=float)
    point.add_argument("--p-special", type=float)
    point.add_argument("--levels", type=int)
    point.add_argument("--schedule", help="comma list over plus,zero")
    point.add_argument("--backend", help="double | bigfloat[:digits] | polynomial[:cap[:emax]]")
    point.add_argument("--failure-cutoff", type=float)
    point.add_argument("--memory-error", type=float)
    point.add_argument("--code-tolerance", type=float)
    point.add_argument("--report", help="text report output path")
    point.add_argument("--json", help="machine-readable output path")

    grid = sub.add_parser("grid", help="threshold-map grid sweep")
    grid.add_argument("--config", help="flat key=value config file")
    grid.add_argument("--levels", type=int)
    grid.add_argument("--cnot-values", help="comma list; default 10-value grid")
    grid.add_argument("--prep-values", help="comma list; default 10-value grid")
    grid.add_argument("--extra-cnot", help="comma list of extra cnot values")
    grid.add_argument("--standard-extra", action="store_true",
                      help="add the two near-boundary cnot values (0.0354, 0.0707)")
    grid.add_argument("--failure-cutoff", type=float)
    grid.add_argument("--backend")
    grid.add_argument("--workers", type=int)
    grid.add_argument("--csv", help="CSV output path")

    formal = sub.add_parser("formal-check", help="polynomial-order verification")
    formal.add_argument("--degree-cap", type=int, default=6)
    formal.add_argument("--e-max", type=float, default=1.0 / 400)
    formal.add_argument("--spectator", choices=SPECTATOR_CHOICES, default="plus")
    formal.add_argument("--cycles", type=int, default=2)
    formal.add_argument("--raw-sacrifices", action="store_true",
                        help="use unpurified second sacrifices (expected to fail)")
    return parser


def _merge(file_values: dict, args: argparse.Namespace, key: str, cast, default=None):
    cli_value = getattr(args, key.replace("-", "_"), None)
    if cli_value is not None:
        return cli_value
    if key in file_values:
        return cast(file_values[key])
    return default


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "point":
            fv = _read_config_file(args.config) if args.config else {}
            schedule = _merge(fv, args, "schedule", str)
            levels = _merge(fv, args, "levels", int, 5)
            config = RunConfig(
                p_prep=_merge(fv, args, "p_prep", float),
                p_cnot=_merge(fv, args, "p_cnot", float),
                p_meas=_merge(fv, args, "p_meas", float),
                p_hadamard=_merge(fv, args, "p_hadamard", float),
                p_special=_merge(fv, args, "p_special", float),
                levels=levels,
                spectator_schedule=tuple(schedule.split(",")) if schedule else None,
                backend=_merge(fv, args, "backend", str, "double"),
                failure_cutoff=_merge(fv, args, "failure_cutoff", float, 0.25),
                memory_error=_merge(fv, args, "memory_error", float, 0.004),
                code_tolerance=_merge(fv, args, "code_tolerance", float, 0.11),
                report_path=_merge(fv, args, "report", str),
                json_path=_merge(fv, args, "json", str),
            )
            if config.p_prep is None or config.p_cnot is None:
                parser.error("point requires --p-prep and --p-cnot")
            result = run_point(config)
            sys.stdout.write(result.to_text())
            return 0
        if args.command == "grid":
            fv = _read_config_file(args.config) if args.config else {}

            def floats(text):
                return tuple(float(x) for x in text.split(","))

            extra = _merge(fv, args, "extra_cnot", floats, ())
            if isinstance(extra, str):
                extra = floats(extra)
            if getattr(args, "standard_extra", False):
                extra = tuple(extra) + EXTRA_CNOT_VALUES
            cnot_values = _merge(fv, args, "cnot_values", floats)
            prep_values = _merge(fv, args, "prep_values", floats)
            if isinstance(cnot_values, str):
                cnot_values = floats(cnot_values)
            if isinstance(prep_values, str):
                prep_values = floats(prep_values)
            config = GridConfig(
                cnot_values=cnot_values,
                prep_values=prep_values,
                extra_cnot_values=tuple(extra),
                levels=_merge(fv, args, "levels", int, 4),
                failure_cutoff=_merge(fv, args, "failure_cutoff", float, 0.25),
                backend=_merge(fv, args, "backend", str, "double"),
                csv_path=_merge(fv, args, "csv", str),
                workers=_merge(fv, args, "workers", int, 0),
            )
            rows = run_grid(config)
            if not config.csv_path:
                sys.stdout.write(GRID_CSV_HEADER + "\n")
                for r in rows:
                    sys.stdout.write(
                        f"{_fmt(r[0])},{_fmt(r[1])},{r[2]},{_fmt(r[3])},{_fmt(r[4])},{int(r[5])}\n"
                    )
            return 0
        if args.command == "formal-check":
            result = run_formal_check(
                degree_cap=args.degree_cap,
                e_max=args.e_max,
                spectator=args.spectator,
                cycles=args.cycles,
                purified_sacrifices=not args.raw_sacrifices,
            )
            sys.stdout.write(result.to_text())
            return 0 if result.passed else 1
    except (RuntimeError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
