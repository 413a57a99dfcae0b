"""Null-eigenstate structure of the dressed Hamiltonian.

A field set that satisfies the phase-matching design condition gives the
Hamiltonian a zero-eigenvalue eigenvector whose only nonzero components sit
on the initial state and the target direction; everything here either
constructs that vector in closed form, verifies it numerically, or follows
it (and its degenerate partners) continuously through time to quantify
nonadiabatic coupling.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .design import DesignError, TargetSpec, verify_design
from .model import FieldSet, StateVector, SystemSpec, stokes_envelope

__all__ = [
    "NODE_TOL",
    "NullVectorLabel",
    "NullVector",
    "CouplingDiagnostics",
    "TrackingLost",
    "make_null_vector",
    "s_matrix",
    "det_s",
    "cofactor_matrix",
    "numeric_null_space",
    "analytic_lambda1",
    "track_eigenvector",
    "track_null_frame",
    "nonadiabatic_coupling",
    "analytic_pair_tracks",
    "converged_max_coupling",
    "phase_aligned_overlap",
    "phase_aligned_distance",
]

# Absolute node threshold on unit-norm vectors: far above eigensolver noise,
# far below any physical amplitude in the experiments.
NODE_TOL = 1e-10

# Eigenvalues within this fraction of the spectral radius count as one
# degenerate cluster during tracking.
DEGENERACY_REL_TOL = 1e-8


class TrackingLost(RuntimeError):
    """Eigenvector continuity broke down; the time grid is too coarse."""


class NullVectorLabel(enum.Enum):
    LAMBDA1 = "Lambda1"
    LAMBDA3 = "Lambda3"
    GENERIC = "Generic"


@dataclass(frozen=True)
class NullVector:
    """A dressed eigenvector with its per-component node flags.

    ``Lambda1`` marks the transfer-carrying vector (nodes on all intermediate
    states and on every degenerate state but the last); ``Lambda3`` marks its
    degenerate partners supported on the intermediates alone (nodes on the
    initial state and the whole degenerate manifold).
    """

    vector: StateVector
    node_profile: np.ndarray
    label: NullVectorLabel

    def __post_init__(self):
        profile = np.asarray(self.node_profile, dtype=bool).copy()
        if profile.shape != self.vector.components.shape:
            raise ValueError("node profile must match the state vector shape")
        profile.setflags(write=False)
        object.__setattr__(self, "node_profile", profile)

    @property
    def components(self) -> np.ndarray:
        return self.vector.components

    @property
    def node_count(self) -> int:
        return int(self.node_profile.sum())


@dataclass(frozen=True)
class CouplingDiagnostics:
    """Nonadiabatic coupling magnitude between two tracked vectors at one time."""

    chi: float
    pair: tuple[str, str]
    time: float

    def __post_init__(self):
        if self.chi < 0:
            raise ValueError("coupling strength cannot be negative")


def _classify(profile: np.ndarray, n: int, m: int) -> NullVectorLabel:
    z0, x, y = profile[0], profile[1:1 + n], profile[1 + n:]
    if not z0 and x.all() and y[:-1].all() and not y[-1]:
        return NullVectorLabel.LAMBDA1
    if z0 and y.all() and not x.all():
        return NullVectorLabel.LAMBDA3
    return NullVectorLabel.GENERIC


def make_null_vector(components: np.ndarray, time: float,
                     system: SystemSpec | None = None,
                     node_tol: float = NODE_TOL) -> NullVector:
    """Wrap a unit vector with its node profile and (if the split is known) label."""
    components = np.asarray(components, dtype=complex)
    profile = np.abs(components) < node_tol
    if system is not None and components.size == system.dim:
        label = _classify(profile, system.n_intermediate, system.n_degenerate)
    else:
        label = NullVectorLabel.GENERIC
    return NullVector(StateVector(components, time), profile, label)


def s_matrix(fields: FieldSet, t: float) -> np.ndarray:
    """Instantaneous Stokes coupling block (N x M, square when N = M)."""
    return fields.peak_rabi_stokes * stokes_envelope(t, fields.width)


def det_s(fields: FieldSet, t: float) -> complex:
    """Determinant of the square Stokes block.

    Whether it vanishes is a property of the system alone: the common Gaussian
    envelope factors out as ``exp(-M t^2 / T^2)``, so the determinant is
    nonzero at one time iff it is nonzero at all times.
    """
    if fields.n_intermediate != fields.n_degenerate:
        raise ValueError(
            "determinant needs a square Stokes block "
            f"(N={fields.n_intermediate}, M={fields.n_degenerate})")
    return complex(np.linalg.det(s_matrix(fields, t)))


def cofactor_matrix(s: np.ndarray) -> np.ndarray:
    """Matrix of signed complementary minors, entry by entry.

    ``A[k, j] = (-1)**(k+j) * det(s with row k and column j deleted)``, so
    ``A.T @ s = det(s) * I``; defined for singular input too.  Cost grows as
    the sixth power of the size, fine for the small blocks used here.
    """
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("cofactor matrix needs a square input")
    m = s.shape[0]
    if m == 1:
        return np.ones((1, 1), dtype=complex)
    cof = np.empty((m, m), dtype=complex)
    rows = np.arange(m)
    for k in range(m):
        sub_rows = rows[rows != k]
        for j in range(m):
            minor = s[np.ix_(sub_rows, rows[rows != j])]
            cof[k, j] = (-1) ** (k + j) * np.linalg.det(minor)
    return cof


def numeric_null_space(h: np.ndarray, tol: float | None = None,
                       system: SystemSpec | None = None,
                       time: float = 0.0) -> list[NullVector]:
    """Orthonormal basis of the near-zero eigenspace, via SVD.

    This is the brute-force counterpart of the closed-form construction and
    is kept deliberately independent of it.  ``tol`` is the absolute
    singular-value cutoff; by default it is 1e-9 times the largest singular
    value (callers with field data in hand may prefer 1e-9 times the peak
    Rabi amplitude).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(h, h.conj().T, atol=1e-12 * max(1.0, np.abs(h).max())):
        raise ValueError("expected a Hermitian matrix")
    _, singular, vh = np.linalg.svd(h)
    if tol is None:
        scale = singular[0] if singular.size and singular[0] > 0 else 1.0
        tol = 1e-9 * scale
    basis = vh[singular < tol].conj()
    out = []
    for row in basis:
        out.append(make_null_vector(_fix_phase(row), time, system))
    return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the largest-magnitude component to the positive real axis."""
    i = int(np.argmax(np.abs(v)))
    pivot = v[i]
    if abs(pivot) == 0.0:
        return v
    return v * (abs(pivot) / pivot)


def phase_aligned_overlap(u: np.ndarray, v: np.ndarray) -> float:
    """|<u, v>| for unit vectors; 1 means equal up to a global phase."""
    return float(abs(np.vdot(np.asarray(u), np.asarray(v))))


def phase_aligned_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Euclidean distance between unit vectors minimized over a global phase.

    Computed from the explicitly aligned difference rather than from the
    overlap magnitude, which would lose half the available precision to
    cancellation near zero distance.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    ov = np.vdot(u, v)
    if abs(ov) > 0:
        u = u * (ov / abs(ov))
    return float(np.linalg.norm(u - v))


def analytic_lambda1(system: SystemSpec, fields: FieldSet, t: float,
                     target: TargetSpec | None = None,
                     node_tol: float = NODE_TOL) -> NullVector:
    """Closed-form transfer-carrying null eigenvector at time t.

    Requires fields that satisfy the phase-matching condition (checked here
    through the designer's verifier) and a full-column-rank Stokes block.
    The vector is ``(z0; 0,...,0; -z0*xi(t)*c)`` with
    ``xi(t) = eta * exp(2 t/T - 1)`` and ``z0 > 0`` fixed by normalization:
    it rides from the initial state into the target direction as the pulse
    pair sweeps through, and ``H @ vector`` vanishes identically.
    """
    if target is None:
        target = TargetSpec.basis(fields.n_degenerate)
    result = verify_design(system, fields, target)
    if not result.ok:
        raise DesignError(
            "fields do not satisfy the pump/Stokes phase-matching condition "
            f"(residual {result.residual:.3e})")
    singular = np.linalg.svd(fields.peak_rabi_stokes, compute_uv=False)
    if singular[-1] <= 1e-12 * singular[0]:
        raise DesignError("Stokes coupling block is rank deficient")

    eta = result.eta
    # log-domain magnitude keeps the construction stable at extreme times
    u = math.log(abs(eta)) + (2.0 * t / fields.width - 1.0)
    if u <= 0.0:
        xi_mag = math.exp(u)
        z0 = 1.0 / math.sqrt(1.0 + xi_mag * xi_mag)
        y_mag = xi_mag * z0
    else:
        inv = math.exp(-u)
        y_mag = 1.0 / math.sqrt(1.0 + inv * inv)
        z0 = inv * y_mag
    phase = eta / abs(eta)

    components = np.zeros(system.dim, dtype=complex)
    components[0] = z0
    components[1 + system.n_intermediate:] = -y_mag * phase * target.coefficients
    return make_null_vector(components, t, system, node_tol)


def _match_to_previous(vals: np.ndarray, vecs: np.ndarray, prev: np.ndarray,
                       degeneracy_tol: float) -> tuple[np.ndarray, float]:
    """Best continuation of ``prev`` among the eigenvectors ``vecs``.

    Picks the eigenvector with the largest overlap; if its eigenvalue sits in
    a degenerate cluster, projects ``prev`` onto the whole cluster instead
    (the bare eigenbasis is arbitrary there).  Returns the phase-fixed vector
    and its overlap magnitude with ``prev``.
    """
    overlaps = vecs.conj().T @ prev
    best = int(np.argmax(np.abs(overlaps)))
    scale = float(np.abs(vals).max())
    cluster = np.abs(vals - vals[best]) <= degeneracy_tol * max(scale, 1e-300)
    if cluster.sum() > 1:
        sub = vecs[:, cluster]
        projected = sub @ (sub.conj().T @ prev)
        weight = float(np.linalg.norm(projected))
        if weight == 0.0:
            return vecs[:, best], 0.0
        return projected / weight, weight
    vec = vecs[:, best]
    ov = complex(np.vdot(vec, prev))
    if abs(ov) > 0:
        vec = vec * (ov / abs(ov))
    return vec, abs(ov)


def _check_seed(h0: np.ndarray, vals: np.ndarray, seed: np.ndarray) -> None:
    scale = float(np.abs(vals).max())
    residual = np.linalg.norm(h0 @ seed - (seed.conj() @ h0 @ seed).real * seed)
    if residual > 1e-8 * max(scale, 1e-300):
        raise ValueError("seed is not an eigenvector at the start of the grid")


def track_eigenvector(h_sampler, seed: NullVector, grid,
                      degeneracy_tol: float = DEGENERACY_REL_TOL,
                      min_overlap: float = 0.5,
                      system: SystemSpec | None = None,
                      node_tol: float = NODE_TOL) -> list[NullVector]:
    """Follow one eigenvector continuously across a time grid.

    ``h_sampler(t)`` must return the Hamiltonian at time t and ``seed`` must
    be one of its eigenvectors at the first grid point.  The phase is pinned
    by a positive overlap with the previous point (largest-component
    convention at the start), and inside degenerate clusters the previous
    vector is projected onto the cluster rather than matched to an arbitrary
    eigenbasis member.  Raises :class:`TrackingLost` when the step-to-step
    overlap drops below ``min_overlap``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise ValueError("empty time grid")
    prev = seed.components / np.linalg.norm(seed.components)
    track: list[NullVector] = []
    for idx, t in enumerate(grid):
        h = np.asarray(h_sampler(float(t)), dtype=complex)
        vals, vecs = np.linalg.eigh(h)
        if idx == 0:
            _check_seed(h, vals, prev)
        vec, overlap = _match_to_previous(vals, vecs, prev, degeneracy_tol)
        if overlap < min_overlap:
            raise TrackingLost(
                f"overlap {overlap:.3f} below {min_overlap} at t = {t:g}; "
                "refine the time grid")
        if idx == 0:
            vec = _fix_phase(vec)
        track.append(make_null_vector(vec, float(t), system, node_tol))
        prev = vec
    return track


def track_null_frame(h_sampler, seeds, grid,
                     degeneracy_tol: float = DEGENERACY_REL_TOL,
                     min_overlap: float = 0.5,
                     system: SystemSpec | None = None,
                     node_tol: float = NODE_TOL) -> list[list[NullVector]]:
    """Track several mutually orthogonal eigenvectors as one orthonormal frame.

    Same continuation rule as :func:`track_eigenvector`, applied seed by seed
    at each grid point with Gram-Schmidt against the members already placed,
    so vectors sharing a degenerate cluster stay orthonormal along the track.
    Returns one frame (list parallel to ``seeds``) per grid point.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise ValueError("empty time grid")
    previous = [np.asarray(s.components, dtype=complex) for s in seeds]
    previous = [p / np.linalg.norm(p) for p in previous]
    frames: list[list[NullVector]] = []
    for idx, t in enumerate(grid):
        h = np.asarray(h_sampler(float(t)), dtype=complex)
        vals, vecs = np.linalg.eigh(h)
        placed: list[np.ndarray] = []
        frame: list[NullVector] = []
        for seed_idx, prev in enumerate(previous):
            if idx == 0:
                _check_seed(h, vals, prev)
            vec, _ = _match_to_previous(vals, vecs, prev, degeneracy_tol)
            for other in placed:
                vec = vec - other * np.vdot(other, vec)
            weight = np.linalg.norm(vec)
            if weight == 0.0:
                raise TrackingLost(
                    f"frame member {seed_idx} vanished at t = {t:g}")
            vec = vec / weight
            overlap = abs(np.vdot(vec, prev))
            if overlap < min_overlap:
                raise TrackingLost(
                    f"overlap {overlap:.3f} below {min_overlap} for frame "
                    f"member {seed_idx} at t = {t:g}; refine the time grid")
            ov = complex(np.vdot(vec, prev))
            vec = vec * (ov / abs(ov))
            if idx == 0:
                vec = _fix_phase(vec)
            placed.append(vec)
            frame.append(make_null_vector(vec, float(t), system, node_tol))
        frames.append(frame)
        previous = placed
    return frames


def nonadiabatic_coupling(track_a, track_b, grid,
                          orthonormal_tol: float = 1e-8,
                          ) -> list[CouplingDiagnostics]:
    """Coupling strength |<a(t), db/dt>| along two tracks, central differences.

    Both tracks must live on the same grid and be orthonormal pairs at every
    point.  Interior grid points only; needs at least three points.
    """
    grid = np.asarray(grid, dtype=float)
    if not (len(track_a) == len(track_b) == grid.size):
        raise ValueError("tracks and grid must have equal length")
    if grid.size < 3:
        raise ValueError("grid too short for a central finite difference")
    a = np.array([v.components for v in track_a])
    b = np.array([v.components for v in track_b])
    for i in range(grid.size):
        if (abs(np.linalg.norm(a[i]) - 1) > orthonormal_tol
                or abs(np.linalg.norm(b[i]) - 1) > orthonormal_tol
                or abs(np.vdot(a[i], b[i])) > orthonormal_tol):
            raise ValueError(f"tracks are not an orthonormal pair at t = {grid[i]:g}")
    out = []
    for i in range(1, grid.size - 1):
        db = (b[i + 1] - b[i - 1]) / (grid[i + 1] - grid[i - 1])
        chi = abs(np.vdot(a[i], db))
        out.append(CouplingDiagnostics(
            chi, (track_a[i].label.value, track_b[i].label.value), float(grid[i])))
    return out


def analytic_pair_tracks(system: SystemSpec, fields: FieldSet, grid,
                         target: TargetSpec | None = None,
                         partner_direction=None,
                         ) -> tuple[list[NullVector], list[NullVector]]:
    """Explicit-gauge track of the transfer carrier and one degenerate partner.

    The carrier is the closed-form null vector at each grid time.  The
    partner starts from a fixed direction ``y`` inside the degenerate
    manifold with ``stokes_block @ y = 0`` (so ``(0; 0...; y)`` is a null
    eigenvector at every time, the situation that arises with more degenerate
    than intermediate states) and is orthogonalized against the carrier point
    by point.  Unlike projection tracking, this gauge is pinned to the
    physical basis labels, so the coupling between the pair retains the
    finite value responsible for leakage inside the manifold.
    """
    if target is None:
        target = TargetSpec.basis(fields.n_degenerate)
    if partner_direction is None:
        _, singular, vh = np.linalg.svd(fields.peak_rabi_stokes)
        rank = int((singular > 1e-12 * singular[0]).sum())
        if rank == fields.n_degenerate:
            raise ValueError("Stokes block has no right null direction; "
                             "pass partner_direction explicitly")
        partner_direction = vh[rank].conj()
    y = np.asarray(partner_direction, dtype=complex)
    if y.shape != (fields.n_degenerate,):
        raise ValueError("partner_direction must live in the degenerate manifold")
    residual = np.linalg.norm(fields.peak_rabi_stokes @ y)
    if residual > 1e-10 * max(fields.max_rabi, 1e-300) * np.linalg.norm(y):
        raise ValueError("partner_direction is not annihilated by the Stokes block")

    base = np.zeros(system.dim, dtype=complex)
    base[1 + system.n_intermediate:] = y / np.linalg.norm(y)
    carrier_track: list[NullVector] = []
    partner_track: list[NullVector] = []
    for t in np.asarray(grid, dtype=float):
        carrier = analytic_lambda1(system, fields, float(t), target)
        a = carrier.components
        b = base - a * np.vdot(a, base)
        b = b / np.linalg.norm(b)
        carrier_track.append(carrier)
        partner_track.append(make_null_vector(b, float(t), system))
    return carrier_track, partner_track


def converged_max_coupling(tracks_for, t_start: float, t_end: float,
                           n_points: int = 201,
                           rel_change: float = 0.01,
                           max_doublings: int = 6,
                           atol: float = 1e-15,
                           ) -> tuple[float, int, bool]:
    """Stencil-converged maximum coupling between two tracked vectors.

    ``tracks_for(grid)`` must return the pair of tracks on the given grid.
    The coupling is a derivative quantity, so the grid is refined (points
    doubled) until the maximum changes by less than ``rel_change`` of itself
    or the change falls below ``atol``.  Returns
    ``(chi_max, points_used, converged)``.
    """
    previous = None
    points = n_points
    for _ in range(max_doublings + 1):
        grid = np.linspace(t_start, t_end, points)
        track_a, track_b = tracks_for(grid)
        diags = nonadiabatic_coupling(track_a, track_b, grid)
        chi_max = max(d.chi for d in diags)
        if previous is not None and abs(chi_max - previous) <= max(
                rel_change * chi_max, atol):
            return chi_max, points, True
        previous = chi_max
        points = 2 * points - 1
    return previous, (points + 1) // 2, False
