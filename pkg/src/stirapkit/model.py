"""Dressed-state model of a (1 + N + M)-level system driven by 2N Gaussian pulses.

Level ordering throughout the package: index 0 is the initial state, indices
1..N the nondegenerate intermediate states, indices N+1..N+M the degenerate
target manifold.  N pump pulses couple the initial state to the intermediates
and N Stokes pulses couple each intermediate to the whole degenerate manifold.

Conventions (natural units, hbar = 1):

* Time is measured in the same unit as the pulse width ``T``; peak Rabi
  amplitudes carry units of 1/T.
* Every matrix entry stores the *half* Rabi frequency: a coupling whose
  physical Rabi frequency is ``2*omega`` enters the Hamiltonian as ``omega``.
  Peak field amplitudes convert via ``2*rabi = mu * field * exp(i*phase)``.
* Pulse ordering is counter-intuitive: the Stokes envelope peaks at t = 0,
  the pump envelope at t = T.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SystemSpec",
    "PulseSpec",
    "FieldSet",
    "StateVector",
    "fieldset_from_pulses",
    "ground_state",
    "pump_envelope",
    "stokes_envelope",
    "rabi_pump",
    "rabi_stokes",
    "coupling_blocks",
    "hamiltonian",
]


def _complex_vector(values, length: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.shape != (length,):
        raise ValueError(f"{name} must have shape ({length},), got {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _complex_matrix(values, shape: tuple[int, int], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if arr.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SystemSpec:
    """Level counts and transition dipole matrices of the bare system.

    ``mu_pump[k]`` is the dipole moment between the initial state and
    intermediate k; ``mu_stokes[k, j]`` couples intermediate k to degenerate
    state j.  Dipole units are arbitrary but must be consistent.
    """

    n_intermediate: int
    n_degenerate: int
    mu_pump: np.ndarray
    mu_stokes: np.ndarray

    def __post_init__(self):
        if self.n_intermediate < 1 or self.n_degenerate < 1:
            raise ValueError("need at least one intermediate and one degenerate state")
        object.__setattr__(
            self, "mu_pump",
            _complex_vector(self.mu_pump, self.n_intermediate, "mu_pump"))
        object.__setattr__(
            self, "mu_stokes",
            _complex_matrix(self.mu_stokes,
                            (self.n_intermediate, self.n_degenerate), "mu_stokes"))

    @property
    def dim(self) -> int:
        return 1 + self.n_intermediate + self.n_degenerate


@dataclass(frozen=True)
class PulseSpec:
    """One Gaussian laser pulse.

    ``carrier`` is retained as metadata only; the interaction-picture dynamics
    depend on the envelope and phase alone.  Pump pulses must be delayed by
    exactly one width, Stokes pulses must be centred at t = 0; the envelope
    centres are hard-wired into the model and other delays are rejected at
    field-set construction.
    """

    peak_field: float
    phase: float
    width: float
    delay: float
    carrier: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("pulse width must be positive")
        if self.peak_field < 0:
            raise ValueError("peak field amplitude must be nonnegative")
        if self.carrier < 0:
            raise ValueError("carrier frequency must be nonnegative")


@dataclass(frozen=True)
class FieldSet:
    """Peak half-Rabi amplitudes of the N pump and N x M Stokes couplings.

    This is the canonical dynamical input: together with the common width it
    fully determines the dressed Hamiltonian at every time.
    """

    peak_rabi_pump: np.ndarray
    peak_rabi_stokes: np.ndarray
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("pulse width must be positive")
        stokes = np.asarray(self.peak_rabi_stokes, dtype=complex)
        if stokes.ndim != 2:
            raise ValueError("peak_rabi_stokes must be a 2-d array")
        n, m = stokes.shape
        object.__setattr__(
            self, "peak_rabi_pump",
            _complex_vector(self.peak_rabi_pump, n, "peak_rabi_pump"))
        object.__setattr__(
            self, "peak_rabi_stokes",
            _complex_matrix(stokes, (n, m), "peak_rabi_stokes"))

    @property
    def n_intermediate(self) -> int:
        return self.peak_rabi_stokes.shape[0]

    @property
    def n_degenerate(self) -> int:
        return self.peak_rabi_stokes.shape[1]

    @property
    def max_rabi(self) -> float:
        """Largest peak amplitude across all couplings; the natural scale."""
        return max(np.abs(self.peak_rabi_pump).max(initial=0.0),
                   np.abs(self.peak_rabi_stokes).max(initial=0.0))

    def scaled(self, factor: float) -> "FieldSet":
        """All peak amplitudes multiplied by ``factor``; width unchanged."""
        return FieldSet(self.peak_rabi_pump * factor,
                        self.peak_rabi_stokes * factor, self.width)

    def with_width(self, width: float) -> "FieldSet":
        """Same peak amplitudes with a different common pulse width."""
        return FieldSet(self.peak_rabi_pump, self.peak_rabi_stokes, width)


@dataclass(frozen=True)
class StateVector:
    """State of the full system: complex amplitudes ordered (z0; x_1..x_N; y_1..y_M)."""

    components: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=complex)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("state vector must be a nonempty 1-d array")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def ground_state(system: SystemSpec, time: float = 0.0) -> StateVector:
    """All population in the initial state."""
    components = np.zeros(system.dim, dtype=complex)
    components[0] = 1.0
    return StateVector(components, time)


def fieldset_from_pulses(system: SystemSpec,
                         pump_pulses: list[PulseSpec],
                         stokes_pulses: list[PulseSpec]) -> FieldSet:
    """Convert N pump and N Stokes pulses into peak Rabi amplitudes.

    One-way constructor: ``2*rabi_pump[k] = mu_pump[k] * E_Pk * exp(i*phi_Pk)``
    and ``2*rabi_stokes[k, j] = mu_stokes[k, j] * E_Sk * exp(i*phi_Sk)``.
    All pulses must share one width; pump delays must equal that width and
    Stokes delays must be zero (counter-intuitive ordering).
    """
    n = system.n_intermediate
    if len(pump_pulses) != n or len(stokes_pulses) != n:
        raise ValueError(f"need exactly {n} pump and {n} Stokes pulses")
    widths = {p.width for p in pump_pulses} | {p.width for p in stokes_pulses}
    if len(widths) != 1:
        raise ValueError("all pulses must share a single width")
    width = widths.pop()
    for k, pulse in enumerate(pump_pulses, start=1):
        if not math.isclose(pulse.delay, width, rel_tol=1e-12):
            raise ValueError(f"pump pulse {k} must be delayed by one width")
    for k, pulse in enumerate(stokes_pulses, start=1):
        if pulse.delay != 0.0:
            raise ValueError(f"Stokes pulse {k} must be centred at t = 0")

    pump = np.array([
        0.5 * system.mu_pump[k] * p.peak_field * np.exp(1j * p.phase)
        for k, p in enumerate(pump_pulses)
    ])
    stokes = np.array([
        0.5 * system.mu_stokes[k, :] * p.peak_field * np.exp(1j * p.phase)
        for k, p in enumerate(stokes_pulses)
    ])
    return FieldSet(pump, stokes, width)


def pump_envelope(t, width: float):
    """Gaussian pump envelope, unit peak at t = width."""
    return np.exp(-((t - width) / width) ** 2)


def stokes_envelope(t, width: float):
    """Gaussian Stokes envelope, unit peak at t = 0."""
    return np.exp(-(t / width) ** 2)


def _check_index(value: int, upper: int, name: str) -> None:
    if not 1 <= value <= upper:
        raise IndexError(f"{name} must be in 1..{upper}, got {value}")


def rabi_pump(fields: FieldSet, k: int, t: float) -> complex:
    """Instantaneous half-Rabi coupling of the k-th pump (1-based)."""
    _check_index(k, fields.n_intermediate, "pump index k")
    return complex(fields.peak_rabi_pump[k - 1] * pump_envelope(t, fields.width))


def rabi_stokes(fields: FieldSet, k: int, j: int, t: float) -> complex:
    """Instantaneous half-Rabi coupling of intermediate k to degenerate state j (1-based)."""
    _check_index(k, fields.n_intermediate, "intermediate index k")
    _check_index(j, fields.n_degenerate, "degenerate index j")
    return complex(fields.peak_rabi_stokes[k - 1, j - 1] * stokes_envelope(t, fields.width))


def coupling_blocks(fields: FieldSet) -> tuple[np.ndarray, np.ndarray]:
    """Constant pump and Stokes coupling matrices.

    The full Hamiltonian factorizes as
    ``H(t) = pump_envelope(t) * H_pump + stokes_envelope(t) * H_stokes``;
    both blocks are Hermitian and time independent, which is what the
    propagator exploits.
    """
    n, m = fields.n_intermediate, fields.n_degenerate
    dim = 1 + n + m
    h_pump = np.zeros((dim, dim), dtype=complex)
    h_pump[0, 1:1 + n] = fields.peak_rabi_pump
    h_pump[1:1 + n, 0] = fields.peak_rabi_pump.conj()
    h_stokes = np.zeros((dim, dim), dtype=complex)
    h_stokes[1:1 + n, 1 + n:] = fields.peak_rabi_stokes
    h_stokes[1 + n:, 1:1 + n] = fields.peak_rabi_stokes.conj().T
    return h_pump, h_stokes


def hamiltonian(system: SystemSpec, fields: FieldSet, t: float) -> np.ndarray:
    """Dressed Hamiltonian at time t (half-Rabi entries, Hermitian).

    Row/column 0 couples to the intermediates through the pump amplitudes and
    the intermediates couple to the degenerate manifold through the Stokes
    amplitudes; every other entry, including the whole diagonal, is exactly
    zero (resonant couplings, no intermediate-intermediate coupling).
    """
    if (system.n_intermediate != fields.n_intermediate
            or system.n_degenerate != fields.n_degenerate):
        raise ValueError(
            f"field set shaped ({fields.n_intermediate}, {fields.n_degenerate}) does not "
            f"match system ({system.n_intermediate}, {system.n_degenerate})")
    h_pump, h_stokes = coupling_blocks(fields)
    return (pump_envelope(t, fields.width) * h_pump
            + stokes_envelope(t, fields.width) * h_stokes)
