"""Pulse design and Schrodinger dynamics for adiabatic transfer into degenerate manifolds.

The package splits into five parts: :mod:`~stirapkit.model` (system, pulses,
dressed Hamiltonian), :mod:`~stirapkit.nullspace` (dark-state structure and
nonadiabatic diagnostics), :mod:`~stirapkit.design` (field construction and
feasibility), :mod:`~stirapkit.propagation` (time integration and population
bookkeeping) and :mod:`~stirapkit.scenarios` (reproducible experiment runs,
also exposed through the ``stirapkit`` command line).
"""

from .model import (FieldSet, PulseSpec, StateVector, SystemSpec,
                    coupling_blocks, fieldset_from_pulses, ground_state,
                    hamiltonian, pump_envelope, rabi_pump, rabi_stokes,
                    stokes_envelope)
from .design import (DesignError, DesignReport, TargetSpec, VerifyResult,
                     check_feasibility, design_fields, effective_dipoles,
                     matched_pump_rabi, reduce_channels, verify_design)
from .nullspace import (CouplingDiagnostics, NullVector, NullVectorLabel,
                        TrackingLost, analytic_lambda1, analytic_pair_tracks,
                        cofactor_matrix, converged_max_coupling, det_s,
                        make_null_vector, nonadiabatic_coupling,
                        numeric_null_space, phase_aligned_distance,
                        phase_aligned_overlap, s_matrix, track_eigenvector,
                        track_null_frame)
from .propagation import (AdiabaticityReport, LadderRung, PropagationConfig,
                          PropagationError, Trajectory, adiabaticity_report,
                          evolve_state, populations, propagate)
from .scenarios import (Bounds, DesignRequest, RunRecord, Scenario,
                        ScenarioError, SweepEntry, builtin_names,
                        builtin_scenario, config_hash, load_scenario, run,
                        scenario_to_dict, sweep, write_trajectory_csv)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "SystemSpec", "PulseSpec", "FieldSet", "StateVector",
    "fieldset_from_pulses", "ground_state", "pump_envelope",
    "stokes_envelope", "rabi_pump", "rabi_stokes", "coupling_blocks",
    "hamiltonian",
    # design
    "DesignError", "TargetSpec", "DesignReport", "VerifyResult",
    "effective_dipoles", "check_feasibility", "design_fields",
    "matched_pump_rabi", "verify_design", "reduce_channels",
    # nullspace
    "NullVector", "NullVectorLabel", "CouplingDiagnostics", "TrackingLost",
    "make_null_vector", "s_matrix", "det_s", "cofactor_matrix",
    "numeric_null_space", "analytic_lambda1", "track_eigenvector",
    "track_null_frame", "nonadiabatic_coupling", "analytic_pair_tracks",
    "converged_max_coupling", "phase_aligned_overlap",
    "phase_aligned_distance",
    # propagation
    "PropagationError", "PropagationConfig", "Trajectory", "LadderRung",
    "AdiabaticityReport", "propagate", "evolve_state", "populations",
    "adiabaticity_report",
    # scenarios
    "ScenarioError", "Scenario", "DesignRequest", "Bounds", "RunRecord",
    "SweepEntry", "builtin_scenario", "builtin_names", "load_scenario",
    "scenario_to_dict", "config_hash", "run", "sweep",
    "write_trajectory_csv",
]
