"""Command-line front end.

Exit codes: 0 success, 2 declared bound violated (or verification failed),
3 infeasible design, 4 numerical failure; scenario-file problems exit 1.
"""

import dataclasses
import json
import sys

import click

from .design import DesignError, check_feasibility, verify_design
from .propagation import PropagationError
from .scenarios import (RunRecord, ScenarioError, SWEEP_AXES, builtin_names,
                        load_scenario, run as run_scenario, sweep as run_sweep)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BOUNDS = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _load(scenario_ref: str):
    try:
        return load_scenario(scenario_ref)
    except ScenarioError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)


def _apply_flags(scenario, window, rel_tol, abs_tol, stride):
    cfg = scenario.propagation
    updates = {}
    if window is not None:
        updates["t_start"], updates["t_end"] = window
    if rel_tol is not None:
        updates["rel_tol"] = rel_tol
    if abs_tol is not None:
        updates["abs_tol"] = abs_tol
    if stride is not None:
        updates["output_stride"] = stride
    if updates:
        cfg = dataclasses.replace(cfg, **updates)
        scenario = dataclasses.replace(scenario, propagation=cfg)
    return scenario


def _echo_record(record: RunRecord) -> None:
    click.echo(f"label:        {record.label}")
    click.echo(f"config hash:  {record.config_hash[:16]}")
    eta = record.design_eta
    click.echo(f"design:       verified={record.design_verified} "
               f"eta={eta:.6g} residual={record.design_residual:.3e}")
    if record.pruned_pumps:
        click.echo(f"pruned pumps: {list(record.pruned_pumps)}")
    click.echo(f"max P_x:      {record.max_p_x:.6e}")
    click.echo(f"max P_y:      {record.max_p_y:.6e}")
    click.echo(f"final P_f:    {record.final_p_f:.8f}")
    click.echo(f"norm error:   {record.max_norm_error:.3e}")
    if record.violations:
        for violation in record.violations:
            click.echo(f"BOUND VIOLATED: {violation}")
    else:
        click.echo("bounds:       OK")


def _run_one(scenario, out_dir):
    try:
        record, _ = run_scenario(scenario, out_dir)
    except DesignError as exc:
        click.echo(f"infeasible design: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except PropagationError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    _echo_record(record)
    if not record.bounds_ok:
        sys.exit(EXIT_BOUNDS)


_window_option = click.option(
    "--window", nargs=2, type=float, default=None, metavar="START END",
    help="Integration window in units of the pulse width.")
_rel_tol_option = click.option("--rel-tol", type=float, default=None,
                               help="Relative integration tolerance.")
_abs_tol_option = click.option("--abs-tol", type=float, default=None,
                               help="Absolute integration tolerance.")
_stride_option = click.option("--stride", type=float, default=None,
                              help="Output sampling stride in width units.")
_out_option = click.option("--out", "out_dir",
                           type=click.Path(file_okay=False), default=None,
                           help="Directory for trajectory and summary files.")
_seed_option = click.option("--seed", type=int, default=None,
                            help="Seed for randomized scenario content "
                                 "(reserved; recorded for reproducibility).")


@click.group()
def main():
    """Design and simulate adiabatic transfer into degenerate manifolds."""


@main.command()
@click.argument("scenario_ref")
@click.option("--out", "out_file", type=click.Path(dir_okay=False),
              default=None, help="Write the report as JSON to this file.")
def design(scenario_ref, out_file):
    """Emit the feasibility/design report for SCENARIO_REF."""
    scenario = _load(scenario_ref)
    report = check_feasibility(scenario.system, scenario.target)
    fields = None
    if scenario.fields is not None:
        fields = scenario.fields
    elif report.feasible:
        try:
            fields = scenario.resolve_fields()
        except DesignError as exc:
            click.echo(f"infeasible design: {exc}", err=True)
            sys.exit(EXIT_INFEASIBLE)
    payload = {
        "label": scenario.label,
        "feasible": report.feasible,
        "eta": [report.eta.real, report.eta.imag],
        "pruned_pumps": sorted(report.pruned_pumps),
        "selected_rows": list(report.selected_rows),
        "det_check": [report.det_check.real, report.det_check.imag],
        "effective_target_dipoles": [[v.real, v.imag]
                                     for v in report.effective_target_dipoles],
        "notes": list(report.notes),
    }
    if fields is not None:
        verdict = verify_design(scenario.system, fields, scenario.target)
        payload["verified"] = verdict.ok
        payload["residual"] = verdict.residual
        payload["fitted_eta"] = [verdict.eta.real, verdict.eta.imag]
        payload["peak_rabi_pump"] = [[v.real, v.imag]
                                     for v in fields.peak_rabi_pump]
    text = json.dumps(payload, indent=2)
    if out_file:
        with open(out_file, "w") as handle:
            handle.write(text + "\n")
    click.echo(text)
    if not report.feasible:
        sys.exit(EXIT_INFEASIBLE)


@main.command()
@click.argument("scenario_ref")
def verify(scenario_ref):
    """Check the pump/Stokes phase-matching condition of SCENARIO_REF."""
    scenario = _load(scenario_ref)
    try:
        fields = scenario.resolve_fields()
    except DesignError as exc:
        click.echo(f"infeasible design: {exc}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    verdict = verify_design(scenario.system, fields, scenario.target)
    click.echo(f"verified: {verdict.ok}")
    click.echo(f"residual: {verdict.residual:.6e}")
    click.echo(f"eta:      {verdict.eta:.8g}")
    if verdict.pruned:
        click.echo(f"pruned:   {sorted(verdict.pruned)}")
    if not verdict.ok:
        sys.exit(EXIT_BOUNDS)


@main.command(name="run")
@click.argument("scenario_ref")
@_window_option
@_rel_tol_option
@_abs_tol_option
@_stride_option
@_out_option
@_seed_option
def run_cmd(scenario_ref, window, rel_tol, abs_tol, stride, out_dir, seed):
    """Execute one scenario: design/verify, propagate, check bounds."""
    scenario = _apply_flags(_load(scenario_ref), window, rel_tol, abs_tol,
                            stride)
    _run_one(scenario, out_dir)


@main.command()
@click.argument("name", type=click.Choice(builtin_names()))
@_window_option
@_rel_tol_option
@_abs_tol_option
@_stride_option
@_out_option
def reproduce(name, window, rel_tol, abs_tol, stride, out_dir):
    """Run one of the built-in reference scenarios."""
    scenario = _apply_flags(_load(name), window, rel_tol, abs_tol, stride)
    _run_one(scenario, out_dir)


@main.command(name="sweep")
@click.argument("scenario_ref")
@click.option("--axis", required=True, type=click.Choice(SWEEP_AXES))
@click.option("--values", required=True,
              help="Comma-separated axis values, e.g. '1,2,4'.")
@click.option("--pump-index", type=int, default=1, show_default=True,
              help="Pump channel for phase-perturbation sweeps.")
@click.option("--jobs", type=int, default=None,
              help="Parallel workers (default: one per value, capped at CPUs).")
@_out_option
@_seed_option
def sweep_cmd(scenario_ref, axis, values, pump_index, jobs, out_dir, seed):
    """Run SCENARIO_REF once per axis value and tabulate the results."""
    scenario = _load(scenario_ref)
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        click.echo(f"error: could not parse --values {values!r}", err=True)
        sys.exit(EXIT_ERROR)
    try:
        entries = run_sweep(scenario, axis, parsed, pump_index=pump_index,
                            jobs=jobs, out_dir=out_dir)
    except ScenarioError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)

    header = (f"{'value':>12}  {'max_P_x':>12}  {'max_P_y':>12}  "
              f"{'final_P_f':>12}  {'1-P_f':>12}  status")
    click.echo(header)
    rows = []
    worst = EXIT_OK
    for entry in entries:
        if entry.record is not None:
            rec = entry.record
            status = "ok" if rec.bounds_ok else "bound-violation"
            if not rec.bounds_ok:
                worst = max(worst, EXIT_BOUNDS)
            click.echo(f"{entry.value:>12g}  {rec.max_p_x:>12.4e}  "
                       f"{rec.max_p_y:>12.4e}  {rec.final_p_f:>12.8f}  "
                       f"{1.0 - rec.final_p_f:>12.4e}  {status}")
            rows.append([entry.value, rec.max_p_x, rec.max_p_y, rec.final_p_f,
                         1.0 - rec.final_p_f, status])
        else:
            status = entry.error or "failed"
            if status.startswith("DesignError"):
                worst = max(worst, EXIT_INFEASIBLE)
            else:
                worst = max(worst, EXIT_NUMERICAL)
            click.echo(f"{entry.value:>12g}  {'-':>12}  {'-':>12}  {'-':>12}  "
                       f"{'-':>12}  {status}")
            rows.append([entry.value, "", "", "", "", status])
    if out_dir:
        import csv
        from pathlib import Path
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["value", "max_p_x", "max_p_y", "final_p_f",
                             "one_minus_p_f", "status"])
            writer.writerows(rows)
    sys.exit(worst)


if __name__ == "__main__":
    main()
