"""Construction of pulse sets that carry a multi-node dark eigenstate.

The designer enforces the phase-matching condition between pump and Stokes
peak amplitudes, ``conj(rabi_pump[k]) = eta * sum_j c_j rabi_stokes[k, j]``
for a nonzero constant ``eta`` and target coefficients ``c``.  Fields built
this way give the dressed Hamiltonian a null eigenvector with nodes on every
intermediate state and on the whole degenerate manifold orthogonal to the
target direction, at all times.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .model import FieldSet, SystemSpec

__all__ = [
    "DesignError",
    "TargetSpec",
    "DesignReport",
    "VerifyResult",
    "effective_dipoles",
    "check_feasibility",
    "design_fields",
    "matched_pump_rabi",
    "verify_design",
    "reduce_channels",
]

# |det| below this fraction of the Hadamard bound (product of row norms)
# counts as singular; scale free by construction.
SINGULAR_REL_TOL = 1e-12

# Effective couplings below this fraction of the largest one are treated as
# exact zeros and trigger pump pruning.
PRUNE_REL_TOL = 1e-12

# Design-condition residual threshold, relative to the largest peak amplitude.
VERIFY_REL_TOL = 1e-10


class DesignError(ValueError):
    """A requested field design is infeasible or ill-posed."""


@dataclass(frozen=True)
class TargetSpec:
    """Unit-norm coefficients of the target state in the degenerate basis."""

    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("target coefficients must form a nonempty vector")
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"target coefficients must have unit norm, got {norm}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coefficients", arr)

    @classmethod
    def basis(cls, n_degenerate: int, index: int | None = None) -> "TargetSpec":
        """Pure basis target; defaults to the last degenerate state."""
        if index is None:
            index = n_degenerate
        if not 1 <= index <= n_degenerate:
            raise IndexError(f"target index must be in 1..{n_degenerate}")
        coeff = np.zeros(n_degenerate, dtype=complex)
        coeff[index - 1] = 1.0
        return cls(coeff)

    @property
    def n_degenerate(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class DesignReport:
    """Feasibility verdict and the quantities the verdict rests on."""

    feasible: bool
    eta: complex
    pruned_pumps: frozenset[int]
    effective_target_dipoles: np.ndarray
    det_check: complex
    selected_rows: tuple[int, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        arr = np.asarray(self.effective_target_dipoles, dtype=complex).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "effective_target_dipoles", arr)


class VerifyResult(NamedTuple):
    ok: bool
    residual: float
    eta: complex
    pruned: frozenset[int]


def _check_target(system: SystemSpec, target: TargetSpec) -> None:
    if target.n_degenerate != system.n_degenerate:
        raise ValueError(
            f"target has {target.n_degenerate} coefficients, "
            f"system has {system.n_degenerate} degenerate states")


def effective_dipoles(system: SystemSpec, target: TargetSpec) -> np.ndarray:
    """Dipole couplings of each intermediate state to the target direction.

    Component k is ``sum_j c_j * mu_stokes[k, j]``; for a pure basis target
    this is just the corresponding column of the Stokes dipole matrix.
    """
    _check_target(system, target)
    return system.mu_stokes @ target.coefficients


def _pruned_indices(effective: np.ndarray) -> frozenset[int]:
    scale = np.abs(effective).max(initial=0.0)
    if scale == 0.0:
        return frozenset(range(1, effective.size + 1))
    return frozenset(
        int(k + 1) for k in range(effective.size)
        if abs(effective[k]) <= PRUNE_REL_TOL * scale)


def check_feasibility(system: SystemSpec, target: TargetSpec,
                      eta: complex = 1.0 + 0.0j) -> DesignReport:
    """Decide whether a complete-transfer design exists for this system.

    Feasible iff the degenerate manifold is no larger than the intermediate
    one and some square sub-block of the Stokes dipole matrix (restricted to
    as many intermediate rows as there are degenerate states) is nonsingular.
    The sub-block is picked by greedy column-pivoted QR, which finds a
    nonsingular one whenever the matrix has full column rank.  Infeasibility
    is reported, never raised.
    """
    _check_target(system, target)
    n, m = system.n_intermediate, system.n_degenerate
    effective = effective_dipoles(system, target)
    pruned = _pruned_indices(effective)
    notes: list[str] = []

    if m > n:
        notes.append(
            "more degenerate states than intermediate channels: degenerate "
            "dressed states stay coupled and leakage inside the manifold "
            "cannot be suppressed, however slow the pulses")
        return DesignReport(False, eta, pruned, effective, 0.0j, (), tuple(notes))

    _, _, pivots = scipy.linalg.qr(system.mu_stokes.T, pivoting=True)
    rows = tuple(sorted(int(p) for p in pivots[:m]))
    block = system.mu_stokes[list(rows), :]
    det = complex(np.linalg.det(block))
    hadamard = float(np.prod(np.linalg.norm(block, axis=1)))
    singular = hadamard == 0.0 or abs(det) < SINGULAR_REL_TOL * hadamard
    if singular:
        notes.append("every square Stokes sub-block is singular; "
                     "the dark state cannot be pinned to the target direction")
    if len(pruned) == n:
        singular = True
        notes.append("target direction is decoupled from all intermediate states")
    if eta == 0:
        singular = True
        notes.append("eta must be nonzero")

    return DesignReport(not singular, eta, pruned, effective, det,
                        tuple(r + 1 for r in rows), tuple(notes))


def matched_pump_rabi(stokes_rabi: np.ndarray, target: TargetSpec,
                      eta: complex = 1.0 + 0.0j) -> np.ndarray:
    """Pump peak amplitudes satisfying the phase-matching condition.

    Works directly at the Rabi level: given the Stokes peak matrix, returns
    ``conj(eta * stokes_rabi @ c)`` with exact zeros on pruned channels.
    """
    if eta == 0:
        raise DesignError("eta must be nonzero")
    stokes_rabi = np.asarray(stokes_rabi, dtype=complex)
    effective = stokes_rabi @ target.coefficients
    pump = np.conj(eta * effective)
    for k in _pruned_indices(effective):
        pump[k - 1] = 0.0
    return pump


def design_fields(system: SystemSpec, target: TargetSpec, eta: complex,
                  width: float, stokes_amplitudes,
                  stokes_phases=None) -> FieldSet:
    """Build the full field set for a feasible system.

    The Stokes side is whatever the caller asks for: per-pulse field
    amplitudes and phases are converted through the dipole matrix
    (``2*rabi = mu * field * exp(i*phase)``).  The pump side is then forced
    by the phase-matching condition, with channels whose effective target
    coupling vanishes pruned to zero.

    Parameters
    ----------
    eta : nonzero complex
        Global pump/Stokes ratio.  The dark-state node structure exists for
        any nonzero value; magnitude sets the pump strength.
    stokes_amplitudes, stokes_phases : arrays of length N
        Peak field amplitude and phase of each Stokes pulse.  Phases default
        to zero.
    """
    if eta == 0:
        raise DesignError("eta must be nonzero")
    report = check_feasibility(system, target, eta)
    if not report.feasible:
        raise DesignError("; ".join(report.notes) or "design infeasible")

    n = system.n_intermediate
    amplitudes = np.asarray(stokes_amplitudes, dtype=float)
    if amplitudes.shape != (n,):
        raise ValueError(f"need {n} Stokes amplitudes, got shape {amplitudes.shape}")
    if np.any(amplitudes < 0):
        raise ValueError("Stokes field amplitudes must be nonnegative")
    if stokes_phases is None:
        phases = np.zeros(n)
    else:
        phases = np.asarray(stokes_phases, dtype=float)
        if phases.shape != (n,):
            raise ValueError(f"need {n} Stokes phases, got shape {phases.shape}")

    per_pulse = 0.5 * amplitudes * np.exp(1j * phases)
    stokes_rabi = per_pulse[:, None] * system.mu_stokes
    pump_rabi = matched_pump_rabi(stokes_rabi, target, eta)
    return FieldSet(pump_rabi, stokes_rabi, width)


def verify_design(system: SystemSpec, fields: FieldSet,
                  target: TargetSpec | None = None,
                  rel_tol: float = VERIFY_REL_TOL) -> VerifyResult:
    """Check the phase-matching condition on an existing field set.

    Fits the best ratio ``eta`` by least squares over the non-pruned channels
    and reports the worst-case residual
    ``max_k |conj(rabi_pump[k]) - eta * effective_stokes[k]|`` over all
    channels (pruned ones must carry zero pump).  Verification additionally
    fails when the fitted pump amplitudes are indistinguishable from zero,
    since the condition requires a nonzero ratio.
    """
    if (system.n_intermediate != fields.n_intermediate
            or system.n_degenerate != fields.n_degenerate):
        raise ValueError("field set shape does not match system")
    if target is None:
        target = TargetSpec.basis(fields.n_degenerate)
    elif target.n_degenerate != fields.n_degenerate:
        raise ValueError("target length does not match field set")

    effective = fields.peak_rabi_stokes @ target.coefficients
    pump_conj = np.conj(fields.peak_rabi_pump)
    pruned = _pruned_indices(effective)
    live = np.array([k - 1 for k in range(1, effective.size + 1) if k not in pruned],
                    dtype=int)
    scale = fields.max_rabi
    tol = rel_tol * scale if scale > 0 else rel_tol

    if live.size == 0:
        # target decoupled everywhere: the condition degenerates to "no pumps"
        residual = float(np.abs(pump_conj).max(initial=0.0))
        return VerifyResult(bool(residual < tol), residual, 0.0j, pruned)

    weight = float(np.vdot(effective[live], effective[live]).real)
    eta = complex(np.vdot(effective[live], pump_conj[live]) / weight)
    residual = float(np.abs(pump_conj - eta * effective).max())
    significant = abs(eta) * float(np.abs(effective[live]).max()) >= tol
    return VerifyResult(bool(residual < tol and significant), residual, eta,
                        pruned)


def reduce_channels(system: SystemSpec,
                    target: TargetSpec) -> tuple[SystemSpec, tuple[int, ...]]:
    """Drop surplus intermediate channels when fewer suffice.

    With fewer degenerate states than intermediates the transfer also works
    through any subset of intermediates whose Stokes sub-block is nonsingular;
    this returns the reduced system over the feasibility row selection plus
    the kept (1-based) channel indices.  The default designer deliberately
    keeps all channels, which is what makes the scheme independent of the
    degeneracy count.
    """
    report = check_feasibility(system, target)
    if not report.feasible:
        raise DesignError("; ".join(report.notes) or "design infeasible")
    rows = [r - 1 for r in report.selected_rows]
    reduced = SystemSpec(
        n_intermediate=len(rows),
        n_degenerate=system.n_degenerate,
        mu_pump=system.mu_pump[rows],
        mu_stokes=system.mu_stokes[rows, :],
    )
    return reduced, report.selected_rows
