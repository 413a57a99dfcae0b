"""Scenario files, reproduction runs and parameter sweeps.

A scenario bundles a system, a target, either a ready field set or a design
request, propagation settings and optional population bounds.  Scenarios are
JSON documents validated against :data:`SCENARIO_SCHEMA`; complex numbers are
written either as plain numbers or as ``[re, im]`` pairs.  Four built-in
scenarios (``fig2`` .. ``fig5``) encode the reference parameter tables of the
seven-intermediate, seven-degenerate demonstration system and its edits.

Every run produces a :class:`RunRecord` whose summary is a pure function of
the resolved scenario (timestamps live outside the summary), plus a CSV time
series with one population column per state.
"""

import csv
import dataclasses
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from .design import (DesignError, TargetSpec, check_feasibility, design_fields,
                     matched_pump_rabi, verify_design)
from .model import FieldSet, SystemSpec, ground_state
from .propagation import PropagationConfig, Trajectory, propagate

__all__ = [
    "ScenarioError",
    "SCENARIO_SCHEMA",
    "SWEEP_AXES",
    "DesignRequest",
    "Bounds",
    "Scenario",
    "RunRecord",
    "SweepEntry",
    "builtin_scenario",
    "builtin_names",
    "load_scenario",
    "scenario_to_dict",
    "config_hash",
    "run",
    "sweep",
    "write_trajectory_csv",
]


class ScenarioError(ValueError):
    """A scenario file is malformed or references unknown entities."""


_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"},
         "minItems": 2, "maxItems": 2},
    ]
}
_COMPLEX_VECTOR = {"type": "array", "items": _COMPLEX, "minItems": 1}
_COMPLEX_MATRIX = {"type": "array", "items": _COMPLEX_VECTOR, "minItems": 1}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "stirapkit scenario",
    "type": "object",
    "required": ["label", "system", "target"],
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string", "minLength": 1},
        "system": {
            "type": "object",
            "required": ["n_intermediate", "n_degenerate", "mu_pump", "mu_stokes"],
            "additionalProperties": False,
            "properties": {
                "n_intermediate": {"type": "integer", "minimum": 1},
                "n_degenerate": {"type": "integer", "minimum": 1},
                "mu_pump": _COMPLEX_VECTOR,
                "mu_stokes": _COMPLEX_MATRIX,
            },
        },
        "target": _COMPLEX_VECTOR,
        "fields": {
            "type": "object",
            "required": ["peak_rabi_pump", "peak_rabi_stokes"],
            "additionalProperties": False,
            "properties": {
                "peak_rabi_pump": _COMPLEX_VECTOR,
                "peak_rabi_stokes": _COMPLEX_MATRIX,
                "width": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "design": {
            "type": "object",
            "required": ["stokes_amplitudes"],
            "additionalProperties": False,
            "properties": {
                "eta": _COMPLEX,
                "width": {"type": "number", "exclusiveMinimum": 0},
                "stokes_amplitudes": {"type": "array",
                                      "items": {"type": "number", "minimum": 0},
                                      "minItems": 1},
                "stokes_phases": {"type": "array", "items": {"type": "number"},
                                  "minItems": 1},
            },
        },
        "propagation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_start": {"type": "number"},
                "t_end": {"type": "number"},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "abs_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_step": {"type": "number", "exclusiveMinimum": 0},
                "stride": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "overrides": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pulse", "k", "value"],
                "additionalProperties": False,
                "properties": {
                    "pulse": {"enum": ["pump", "stokes"]},
                    "k": {"type": "integer", "minimum": 1},
                    "j": {"type": "integer", "minimum": 1},
                    "value": _COMPLEX,
                },
            },
        },
        "bounds": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_p_x": {"type": "number", "minimum": 0},
                "max_p_y": {"type": "number", "minimum": 0},
                "min_final_p_f": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
    },
}

SWEEP_AXES = ("width", "amplitude-scale", "phase-perturbation", "eta")


def _to_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    return complex(value[0], value[1])


def _from_complex(value: complex):
    value = complex(value)
    if value.imag == 0.0:
        return value.real
    return [value.real, value.imag]


def _complex_vector(values) -> np.ndarray:
    return np.array([_to_complex(v) for v in values], dtype=complex)


def _complex_matrix(values) -> np.ndarray:
    return np.array([[_to_complex(v) for v in row] for row in values],
                    dtype=complex)


@dataclass(frozen=True)
class DesignRequest:
    """Ask the run to build the fields instead of supplying them."""

    stokes_amplitudes: tuple[float, ...]
    stokes_phases: tuple[float, ...] | None = None
    eta: complex = 1.0 + 0.0j
    width: float = 1.0


@dataclass(frozen=True)
class Bounds:
    """Declared population bounds; a run violating them exits nonzero."""

    max_p_x: float | None = None
    max_p_y: float | None = None
    min_final_p_f: float | None = None


@dataclass(frozen=True)
class Scenario:
    """Fully resolved experiment description (overrides already applied)."""

    label: str
    system: SystemSpec
    target: TargetSpec
    fields: FieldSet | None
    design: DesignRequest | None
    propagation: PropagationConfig
    bounds: Bounds

    def __post_init__(self):
        if (self.fields is None) == (self.design is None):
            raise ScenarioError(
                "scenario needs exactly one of 'fields' or 'design'")

    def resolve_fields(self) -> FieldSet:
        if self.fields is not None:
            return self.fields
        req = self.design
        return design_fields(self.system, self.target, req.eta, req.width,
                             np.array(req.stokes_amplitudes),
                             None if req.stokes_phases is None
                             else np.array(req.stokes_phases))


@dataclass(frozen=True)
class RunRecord:
    """Machine-checkable summary of one run."""

    label: str
    config_hash: str
    design_feasible: bool | None
    design_verified: bool
    design_residual: float
    design_eta: complex
    pruned_pumps: tuple[int, ...]
    max_p_x: float
    max_p_y: float
    final_p_f: float
    max_norm_error: float
    bounds_ok: bool
    violations: tuple[str, ...]
    started_at: str = ""
    finished_at: str = ""

    def summary_dict(self) -> dict:
        """Deterministic part of the record: identical runs give identical dicts."""
        return {
            "label": self.label,
            "config_hash": self.config_hash,
            "design": {
                "feasible": self.design_feasible,
                "verified": self.design_verified,
                "residual": self.design_residual,
                "eta": _from_complex(self.design_eta),
                "pruned_pumps": list(self.pruned_pumps),
            },
            "summary": {
                "max_p_x": self.max_p_x,
                "max_p_y": self.max_p_y,
                "final_p_f": self.final_p_f,
                "max_norm_error": self.max_norm_error,
            },
            "bounds_ok": self.bounds_ok,
            "violations": list(self.violations),
        }

    def to_dict(self) -> dict:
        out = self.summary_dict()
        out["meta"] = {"started_at": self.started_at,
                       "finished_at": self.finished_at}
        return out


@dataclass(frozen=True)
class SweepEntry:
    value: float
    record: RunRecord | None
    error: str | None = None


# ---------------------------------------------------------------------------
# Built-in scenarios: the 7-intermediate / 7-degenerate reference system.
# Peak amplitudes in units of one over the pulse width; the pump row equals
# the last Stokes column (unit pump/Stokes ratio, all phases zero).

_FIG2_PUMP = (60, 90, 60, 120, 90, 99, 135)
_FIG2_STOKES = (
    (90, 15, 0, 150, 36, 18, 60),
    (90, 57, 24, 45, 69, 78, 90),
    (90, 75, 39, 36, 39, 78, 60),
    (60, 18, 24, 75, 66, 48, 120),
    (39, 27, 93, 15, 66, 78, 90),
    (93, 69, 18, 87, 72, 78, 99),
    (36, 54, 48, 57, 96, 78, 135),
)

_FIG3_EDITS = [
    (1, 4, 39), (2, 5, 39), (2, 6, 48), (3, 2, 45), (4, 3, 81),
    (5, 2, 57), (5, 6, 48), (6, 2, 39), (7, 2, 24),
]


def _fig_base(label: str, bounds: dict) -> dict:
    return {
        "label": label,
        "system": {
            "n_intermediate": 7,
            "n_degenerate": 7,
            "mu_pump": list(_FIG2_PUMP),
            "mu_stokes": [list(row) for row in _FIG2_STOKES],
        },
        "target": [0, 0, 0, 0, 0, 0, 1],
        "fields": {
            "peak_rabi_pump": list(_FIG2_PUMP),
            "peak_rabi_stokes": [list(row) for row in _FIG2_STOKES],
            "width": 1.0,
        },
        "propagation": {"t_start": -4.0, "t_end": 5.0,
                        "rel_tol": 1e-10, "abs_tol": 1e-10, "stride": 0.01},
        "bounds": bounds,
    }


def _builtin_dicts() -> dict[str, dict]:
    fig2 = _fig_base("fig2", {"max_p_x": 0.003, "max_p_y": 0.0005,
                              "min_final_p_f": 0.99})
    fig3 = _fig_base("fig3", {"max_p_x": 0.002, "max_p_y": 0.0003,
                              "min_final_p_f": 0.99})
    fig3["overrides"] = [
        {"pulse": "stokes", "k": k, "j": j, "value": v}
        for k, j, v in _FIG3_EDITS
    ]
    fig4 = _fig_base("fig4", {"max_p_x": 0.0003, "max_p_y": 0.0001,
                              "min_final_p_f": 0.99})
    # the story here is two vanishing target dipoles, so zero them in the
    # system as well: the pruning rule then removes the matching pumps
    fig4["system"]["mu_stokes"][0][6] = 0
    fig4["system"]["mu_stokes"][1][6] = 0
    fig4["overrides"] = [
        {"pulse": "stokes", "k": 1, "j": 7, "value": 0},
        {"pulse": "stokes", "k": 2, "j": 7, "value": 0},
        {"pulse": "pump", "k": 1, "value": 0},
        {"pulse": "pump", "k": 2, "value": 0},
    ]
    fig5 = _fig_base("fig5", {"max_p_x": 0.003, "max_p_y": 0.0005,
                              "min_final_p_f": 0.99})
    fig5["overrides"] = [
        {"pulse": "stokes", "k": k, "j": j, "value": 0}
        for k in range(1, 8) for j in (1, 2)
    ]
    return {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def builtin_names() -> tuple[str, ...]:
    return ("fig2", "fig3", "fig4", "fig5")


def builtin_scenario(name: str) -> Scenario:
    """One of the shipped reference scenarios (``fig2`` .. ``fig5``)."""
    dicts = _builtin_dicts()
    if name not in dicts:
        raise ScenarioError(
            f"unknown built-in scenario {name!r}; choose from {sorted(dicts)}")
    return _scenario_from_dict(dicts[name])


def load_scenario(path) -> Scenario:
    """Load a scenario from a JSON file, or by built-in name.

    Validates against :data:`SCENARIO_SCHEMA` and applies all overrides, so
    the returned scenario is fully resolved.
    """
    p = Path(path)
    if p.is_file():
        try:
            raw = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{p}: not valid JSON: {exc}") from exc
        return _scenario_from_dict(raw)
    if str(path) in builtin_names():
        return builtin_scenario(str(path))
    raise ScenarioError(f"no scenario file or built-in named {path!r}")


def _apply_overrides(fields_dict: dict, overrides: list[dict],
                     n: int, m: int) -> dict:
    pump = [_to_complex(v) for v in fields_dict["peak_rabi_pump"]]
    stokes = [[_to_complex(v) for v in row]
              for row in fields_dict["peak_rabi_stokes"]]
    for entry in overrides:
        k = entry["k"]
        value = _to_complex(entry["value"])
        if entry["pulse"] == "pump":
            if "j" in entry:
                raise ScenarioError("pump overrides take no 'j' index")
            if not 1 <= k <= n:
                raise ScenarioError(f"unknown override index: pump k={k}")
            pump[k - 1] = value
        else:
            j = entry.get("j")
            if j is None:
                raise ScenarioError("stokes overrides need a 'j' index")
            if not (1 <= k <= n and 1 <= j <= m):
                raise ScenarioError(f"unknown override index: stokes k={k}, j={j}")
            stokes[k - 1][j - 1] = value
    out = dict(fields_dict)
    out["peak_rabi_pump"] = [_from_complex(v) for v in pump]
    out["peak_rabi_stokes"] = [[_from_complex(v) for v in row] for row in stokes]
    return out


def _scenario_from_dict(raw: dict) -> Scenario:
    try:
        jsonschema.validate(raw, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(part) for part in exc.absolute_path) or "(root)"
        raise ScenarioError(f"scenario field {where}: {exc.message}") from exc

    sys_raw = raw["system"]
    try:
        system = SystemSpec(
            n_intermediate=sys_raw["n_intermediate"],
            n_degenerate=sys_raw["n_degenerate"],
            mu_pump=_complex_vector(sys_raw["mu_pump"]),
            mu_stokes=_complex_matrix(sys_raw["mu_stokes"]),
        )
        target = TargetSpec(_complex_vector(raw["target"]))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    if target.n_degenerate != system.n_degenerate:
        raise ScenarioError("target length does not match n_degenerate")

    has_fields = "fields" in raw
    has_design = "design" in raw
    if has_fields == has_design:
        raise ScenarioError("scenario needs exactly one of 'fields' or 'design'")
    overrides = raw.get("overrides", [])

    fields = None
    design = None
    if has_fields:
        fdict = dict(raw["fields"])
        fdict.setdefault("width", 1.0)
        if overrides:
            fdict = _apply_overrides(fdict, overrides,
                                     system.n_intermediate, system.n_degenerate)
        try:
            fields = FieldSet(_complex_vector(fdict["peak_rabi_pump"]),
                              _complex_matrix(fdict["peak_rabi_stokes"]),
                              fdict["width"])
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        if (fields.n_intermediate != system.n_intermediate
                or fields.n_degenerate != system.n_degenerate):
            raise ScenarioError("field shapes do not match the system")
    else:
        if overrides:
            raise ScenarioError("overrides require direct 'fields'")
        ddict = raw["design"]
        amplitudes = tuple(float(a) for a in ddict["stokes_amplitudes"])
        if len(amplitudes) != system.n_intermediate:
            raise ScenarioError("design needs one Stokes amplitude per channel")
        phases = ddict.get("stokes_phases")
        if phases is not None:
            if len(phases) != system.n_intermediate:
                raise ScenarioError("design needs one Stokes phase per channel")
            phases = tuple(float(p) for p in phases)
        design = DesignRequest(
            stokes_amplitudes=amplitudes,
            stokes_phases=phases,
            eta=_to_complex(ddict.get("eta", 1.0)),
            width=float(ddict.get("width", 1.0)),
        )

    prop_raw = dict(raw.get("propagation", {}))
    if "stride" in prop_raw:
        prop_raw["output_stride"] = prop_raw.pop("stride")
    try:
        propagation = PropagationConfig(**prop_raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"propagation config: {exc}") from exc

    bounds_raw = raw.get("bounds", {})
    bounds = Bounds(max_p_x=bounds_raw.get("max_p_x"),
                    max_p_y=bounds_raw.get("max_p_y"),
                    min_final_p_f=bounds_raw.get("min_final_p_f"))

    return Scenario(label=raw["label"], system=system, target=target,
                    fields=fields, design=design, propagation=propagation,
                    bounds=bounds)


def scenario_to_dict(scenario: Scenario) -> dict:
    """Canonical JSON-ready form of a resolved scenario (hash input)."""
    out: dict = {
        "label": scenario.label,
        "system": {
            "n_intermediate": scenario.system.n_intermediate,
            "n_degenerate": scenario.system.n_degenerate,
            "mu_pump": [_from_complex(v) for v in scenario.system.mu_pump],
            "mu_stokes": [[_from_complex(v) for v in row]
                          for row in scenario.system.mu_stokes],
        },
        "target": [_from_complex(v) for v in scenario.target.coefficients],
        "propagation": {
            "t_start": scenario.propagation.t_start,
            "t_end": scenario.propagation.t_end,
            "rel_tol": scenario.propagation.rel_tol,
            "abs_tol": scenario.propagation.abs_tol,
            "max_step": scenario.propagation.max_step,
            "stride": scenario.propagation.output_stride,
        },
        "bounds": {
            "max_p_x": scenario.bounds.max_p_x,
            "max_p_y": scenario.bounds.max_p_y,
            "min_final_p_f": scenario.bounds.min_final_p_f,
        },
    }
    if scenario.fields is not None:
        out["fields"] = {
            "peak_rabi_pump": [_from_complex(v)
                               for v in scenario.fields.peak_rabi_pump],
            "peak_rabi_stokes": [[_from_complex(v) for v in row]
                                 for row in scenario.fields.peak_rabi_stokes],
            "width": scenario.fields.width,
        }
    else:
        req = scenario.design
        out["design"] = {
            "eta": _from_complex(req.eta),
            "width": req.width,
            "stokes_amplitudes": list(req.stokes_amplitudes),
            "stokes_phases": (None if req.stokes_phases is None
                              else list(req.stokes_phases)),
        }
    return out


def config_hash(scenario: Scenario) -> str:
    payload = json.dumps(scenario_to_dict(scenario), sort_keys=True,
                         separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def _check_bounds(bounds: Bounds, traj: Trajectory) -> list[str]:
    violations = []
    if bounds.max_p_x is not None and traj.max_p_x >= bounds.max_p_x:
        violations.append(
            f"max P_x {traj.max_p_x:.6e} >= bound {bounds.max_p_x:g}")
    if bounds.max_p_y is not None and traj.max_p_y >= bounds.max_p_y:
        violations.append(
            f"max P_y {traj.max_p_y:.6e} >= bound {bounds.max_p_y:g}")
    if (bounds.min_final_p_f is not None
            and traj.final_p_f < bounds.min_final_p_f):
        violations.append(
            f"final P_f {traj.final_p_f:.8f} < bound {bounds.min_final_p_f:g}")
    return violations


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    """Plain comma-separated time series, one row per sample.

    Columns: ``t_over_T``, per-state populations (initial, intermediates,
    degenerates), the three aggregates and the norm error.  Values are
    printed with full double precision, so identical runs produce identical
    files.
    """
    n, m = trajectory.n_intermediate, trajectory.n_degenerate
    header = (["t_over_T", "p0"]
              + [f"p_i{k}" for k in range(1, n + 1)]
              + [f"p_f{j}" for j in range(1, m + 1)]
              + ["P_x", "P_y", "P_f", "norm_err"])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for i, tau in enumerate(trajectory.times_over_width):
            row = ([tau] + list(trajectory.populations[i])
                   + [trajectory.p_x[i], trajectory.p_y[i],
                      trajectory.p_f[i], trajectory.norm_error[i]])
            writer.writerow([format(v, ".17g") for v in row])


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in label)


def run(scenario: Scenario, out_dir=None) -> tuple[RunRecord, Trajectory]:
    """Design/verify, propagate from the initial state, and summarize.

    With a design request the fields are built first (infeasibility raises
    :class:`~stirapkit.design.DesignError`); direct fields are checked against
    the phase-matching condition and the verdict recorded either way.  When
    ``out_dir`` is given, writes ``<label>.csv`` (time series) and
    ``<label>.json`` (summary record) into it.
    """
    started = datetime.now(timezone.utc).isoformat()
    feasible: bool | None = None
    if scenario.design is not None:
        report = check_feasibility(scenario.system, scenario.target,
                                   scenario.design.eta)
        feasible = report.feasible
    fields = scenario.resolve_fields()
    verdict = verify_design(scenario.system, fields, scenario.target)

    initial = ground_state(scenario.system,
                           scenario.propagation.t_start * fields.width)
    traj = propagate(scenario.system, fields, initial, scenario.propagation,
                     scenario.target)
    violations = _check_bounds(scenario.bounds, traj)
    record = RunRecord(
        label=scenario.label,
        config_hash=config_hash(scenario),
        design_feasible=feasible,
        design_verified=verdict.ok,
        design_residual=verdict.residual,
        design_eta=verdict.eta,
        pruned_pumps=tuple(sorted(verdict.pruned)),
        max_p_x=traj.max_p_x,
        max_p_y=traj.max_p_y,
        final_p_f=traj.final_p_f,
        max_norm_error=traj.max_norm_error,
        bounds_ok=not violations,
        violations=tuple(violations),
        started_at=started,
        finished_at=datetime.now(timezone.utc).isoformat(),
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(traj, out / f"{_slug(scenario.label)}.csv")
        (out / f"{_slug(scenario.label)}.json").write_text(
            json.dumps(record.to_dict(), indent=2) + "\n")
    return record, traj


def _derive_scenario(scenario: Scenario, axis: str, value: float,
                     pump_index: int) -> Scenario:
    fields = scenario.resolve_fields()
    if axis == "width":
        if value <= 0:
            raise ScenarioError("width factors must be positive")
        new_fields = fields.with_width(fields.width * value)
        tag = f"width x{value:g}"
    elif axis == "amplitude-scale":
        new_fields = fields.scaled(value)
        tag = f"amp x{value:g}"
    elif axis == "phase-perturbation":
        if not 1 <= pump_index <= fields.n_intermediate:
            raise ScenarioError(f"unknown pump index {pump_index}")
        pump = fields.peak_rabi_pump.copy()
        pump[pump_index - 1] *= np.exp(1j * value)
        new_fields = FieldSet(pump, fields.peak_rabi_stokes, fields.width)
        tag = f"phase P{pump_index} +{value:g}"
    elif axis == "eta":
        pump = matched_pump_rabi(fields.peak_rabi_stokes, scenario.target,
                                 complex(value))
        new_fields = FieldSet(pump, fields.peak_rabi_stokes, fields.width)
        tag = f"eta {value:g}"
    else:
        raise ScenarioError(f"unknown sweep axis {axis!r}; "
                            f"choose from {SWEEP_AXES}")
    return dataclasses.replace(scenario, label=f"{scenario.label}[{tag}]",
                               fields=new_fields, design=None)


def _sweep_worker(args) -> SweepEntry:
    scenario, axis, value, pump_index, out_dir = args
    try:
        derived = _derive_scenario(scenario, axis, value, pump_index)
        record, _ = run(derived, out_dir)
        return SweepEntry(value=value, record=record)
    except (DesignError, ScenarioError, RuntimeError, ValueError) as exc:
        return SweepEntry(value=value, record=None,
                          error=f"{type(exc).__name__}: {exc}")


def sweep(scenario: Scenario, axis: str, values, pump_index: int = 1,
          jobs: int | None = None, out_dir=None) -> list[SweepEntry]:
    """One run per axis value; failures are recorded, not raised.

    Axes: ``width`` (stretch all pulses), ``amplitude-scale`` (scale all peak
    amplitudes), ``phase-perturbation`` (rotate one pump phase by the value,
    in radians), ``eta`` (re-derive the pump set from the Stokes block at the
    given ratio).  Entries execute in a process pool and are returned in
    input order.
    """
    if axis not in SWEEP_AXES:
        raise ScenarioError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    values = [float(v) for v in values]
    if not values:
        raise ScenarioError("sweep needs at least one value")
    if not all(np.isfinite(values)):
        raise ScenarioError("sweep values must be finite")
    tasks = [(scenario, axis, v, pump_index, out_dir) for v in values]
    if jobs is None:
        jobs = min(len(tasks), os.cpu_count() or 1)
    if jobs <= 1:
        return [_sweep_worker(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_sweep_worker, tasks))
