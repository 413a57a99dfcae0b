"""Shared test utilities: random instances and independent numerical oracles.

The oracles here deliberately avoid the package's own code paths: the
fixed-step integrator assembles its Hamiltonian from raw arrays and steps
with classic RK4, and the exact determinant uses fraction-free integer
elimination.  They exist to cross-check rather than reuse the library.
"""

import numpy as np

from stirapkit import (FieldSet, SystemSpec, TargetSpec, check_feasibility,
                       design_fields)


def crandn(rng, *shape):
    """Complex standard normal samples."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_feasible_system(rng, n, m, max_condition=1e5) -> SystemSpec:
    """Random complex dipoles with a comfortably nonsingular Stokes block.

    The conditioning guard keeps property tests away from accidentally
    near-singular draws whose null-space separation would be dominated by
    roundoff rather than by the structure under test.
    """
    for _ in range(100):
        mu_stokes = crandn(rng, n, m)
        singular = np.linalg.svd(mu_stokes, compute_uv=False)
        if singular[0] / singular[-1] < max_condition:
            break
    else:
        raise RuntimeError("could not draw a well-conditioned dipole matrix")
    mu_pump = crandn(rng, n)
    system = SystemSpec(n, m, mu_pump, mu_stokes)
    assert check_feasibility(system, TargetSpec.basis(m)).feasible
    return system


def random_target(rng, m) -> TargetSpec:
    c = crandn(rng, m)
    return TargetSpec(c / np.linalg.norm(c))


def random_designed_fields(rng, system, target=None, rabi_scale=80.0,
                           width=1.0):
    """Designer output for random Stokes amplitudes/phases and a random eta.

    ``rabi_scale`` fixes the mean Stokes peak amplitude in units of one over
    the width, so propagation-based tests sit in the adiabatic regime.
    """
    n = system.n_intermediate
    if target is None:
        target = TargetSpec.basis(system.n_degenerate)
    amplitudes = rng.uniform(0.5, 1.5, n)
    phases = rng.uniform(0.0, 2 * np.pi, n)
    eta = rng.uniform(0.7, 1.4) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    fields = design_fields(system, target, eta, width, amplitudes, phases)
    mean = np.abs(fields.peak_rabi_stokes).mean()
    return fields.scaled(rabi_scale / mean), target, eta


def rk4_evolve(pump_rabi, stokes_rabi, width, psi0, t0, t1, n_steps):
    """Independent fixed-step RK4 integration of i dpsi/dt = H(t) psi.

    Builds the Hamiltonian from the raw coupling arrays on every evaluation:
    no shared code with the package's propagator or model assembly.
    """
    pump_rabi = np.asarray(pump_rabi, dtype=complex)
    stokes_rabi = np.asarray(stokes_rabi, dtype=complex)
    n, m = stokes_rabi.shape
    dim = 1 + n + m

    def h_of(t):
        h = np.zeros((dim, dim), dtype=complex)
        ep = np.exp(-((t - width) / width) ** 2)
        es = np.exp(-((t / width) ** 2))
        h[0, 1:1 + n] = pump_rabi * ep
        h[1:1 + n, 0] = np.conj(pump_rabi) * ep
        h[1:1 + n, 1 + n:] = stokes_rabi * es
        h[1 + n:, 1:1 + n] = stokes_rabi.conj().T * es
        return h

    def f(t, psi):
        return -1j * (h_of(t) @ psi)

    psi = np.asarray(psi0, dtype=complex).copy()
    h_step = (t1 - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        k1 = f(t, psi)
        k2 = f(t + 0.5 * h_step, psi + 0.5 * h_step * k1)
        k3 = f(t + 0.5 * h_step, psi + 0.5 * h_step * k2)
        k4 = f(t + h_step, psi + h_step * k3)
        psi = psi + (h_step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h_step
    return psi


def bareiss_det(matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free elimination)."""
    m = [[int(x) for x in row] for row in matrix]
    size = len(m)
    sign = 1
    prev = 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[size - 1][size - 1]


def stokes_right_null_vectors(stokes_rabi):
    """Orthonormal basis of the right null space of a Stokes peak matrix."""
    _, singular, vh = np.linalg.svd(stokes_rabi)
    rank = int((singular > 1e-12 * singular[0]).sum())
    return vh[rank:].conj()


def intermediate_null_seeds(fields: FieldSet):
    """Null eigenvectors supported on the intermediate states alone.

    For fewer degenerate than intermediate states, any vector whose
    intermediate components are annihilated by the conjugate Stokes block is
    a null eigenvector of the full Hamiltonian at every time; these seed the
    degenerate-partner tracks.
    """
    _, singular, vh = np.linalg.svd(fields.peak_rabi_stokes.conj().T)
    rank = int((singular > 1e-12 * singular[0]).sum())
    xs = vh[rank:].conj()
    n, m = fields.n_intermediate, fields.n_degenerate
    seeds = []
    for x in xs:
        v = np.zeros(1 + n + m, dtype=complex)
        v[1:1 + n] = x
        seeds.append(v)
    return seeds
