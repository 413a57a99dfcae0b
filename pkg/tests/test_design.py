"""Field designer: feasibility, construction, verification, pruning."""

import numpy as np
import pytest

from stirapkit import (DesignError, FieldSet, SystemSpec, TargetSpec,
                       analytic_lambda1, check_feasibility, design_fields,
                       effective_dipoles, hamiltonian, matched_pump_rabi,
                       numeric_null_space, reduce_channels, verify_design)

from helpers import crandn, random_feasible_system, random_target


class TestTargetSpec:
    def test_basis_default_is_last(self):
        t = TargetSpec.basis(4)
        assert np.allclose(t.coefficients, [0, 0, 0, 1])

    def test_norm_enforced(self):
        with pytest.raises(ValueError, match="unit norm"):
            TargetSpec([1.0, 1.0])

    def test_basis_index_range(self):
        with pytest.raises(IndexError):
            TargetSpec.basis(3, 4)


class TestEffectiveDipoles:
    def test_basis_target_picks_column(self):
        rng = np.random.default_rng(0)
        system = random_feasible_system(rng, 4, 3)
        eff = effective_dipoles(system, TargetSpec.basis(3))
        assert np.allclose(eff, system.mu_stokes[:, 2])

    def test_decoupled_column_gives_zeros(self):
        mu = np.array([[0.0, 1.0], [0.0, 2.0]])
        system = SystemSpec(2, 2, [1, 1], mu)
        eff = effective_dipoles(system, TargetSpec([1.0, 0.0]))
        assert np.all(eff == 0)

    def test_superposition_matches_elementwise_oracle(self):
        rng = np.random.default_rng(1)
        system = random_feasible_system(rng, 5, 4)
        target = random_target(rng, 4)
        eff = effective_dipoles(system, target)
        # direct summation oracle
        expected = np.array([
            sum(target.coefficients[j] * system.mu_stokes[k, j]
                for j in range(4))
            for k in range(5)
        ])
        assert np.allclose(eff, expected, atol=1e-14)


class TestCheckFeasibility:
    def test_excess_degeneracy_infeasible(self):
        rng = np.random.default_rng(2)
        system = SystemSpec(2, 3, crandn(rng, 2), crandn(rng, 2, 3))
        report = check_feasibility(system, TargetSpec.basis(3))
        assert not report.feasible
        assert any("leakage" in note for note in report.notes)

    def test_identity_block_feasible(self):
        system = SystemSpec(3, 3, [1, 1, 1], np.eye(3))
        report = check_feasibility(system, TargetSpec.basis(3))
        assert report.feasible
        assert report.det_check == pytest.approx(1.0)
        assert report.selected_rows == (1, 2, 3)

    def test_repeated_rows_infeasible(self):
        mu = np.array([[1.0, 2.0], [1.0, 2.0]])
        system = SystemSpec(2, 2, [1, 1], mu)
        report = check_feasibility(system, TargetSpec.basis(2))
        assert not report.feasible

    def test_row_selection_below_full_degeneracy(self):
        # rows 1 and 2 are parallel; a nonsingular 2x2 block must avoid one
        mu = np.array([[1.0, 1.0], [2.0, 2.0], [1.0, -1.0]])
        system = SystemSpec(3, 2, [1, 1, 1], mu)
        report = check_feasibility(system, TargetSpec.basis(2))
        assert report.feasible
        block = system.mu_stokes[[r - 1 for r in report.selected_rows], :]
        assert abs(np.linalg.det(block)) > 0.1

    def test_pruned_channels_reported(self):
        mu = np.array([[1.0, 0.0], [1.0, 2.0]])
        system = SystemSpec(2, 2, [1, 1], mu)
        report = check_feasibility(system, TargetSpec.basis(2))
        assert report.pruned_pumps == frozenset({1})


class TestDesignFields:
    def test_reference_pump_row(self):
        # with real dipoles, unit ratio and field amplitude 2 the pump peaks
        # must equal the last Stokes column
        from stirapkit import builtin_scenario
        system = builtin_scenario("fig2").system
        fields = design_fields(system, TargetSpec.basis(7), 1.0, 1.0,
                               np.full(7, 2.0))
        assert np.allclose(fields.peak_rabi_pump,
                           [60, 90, 60, 120, 90, 99, 135])
        assert np.allclose(fields.peak_rabi_stokes, system.mu_stokes)

    def test_zero_dipoles_prune_pumps(self):
        rng = np.random.default_rng(3)
        mu = np.abs(crandn(rng, 4, 4)) + 0.5
        mu[0, 3] = 0.0
        mu[1, 3] = 0.0
        system = SystemSpec(4, 4, np.ones(4), mu)
        fields = design_fields(system, TargetSpec.basis(4), 1.0, 1.0,
                               np.full(4, 2.0))
        assert fields.peak_rabi_pump[0] == 0.0
        assert fields.peak_rabi_pump[1] == 0.0
        assert np.all(np.abs(fields.peak_rabi_pump[2:]) > 0)

    def test_complex_phase_relation(self):
        # pump phases must cancel the dipole, Stokes and ratio phases:
        # phi_P = -phi_S - arg(mu_pump) - arg(mu_target) - arg(eta)
        rng = np.random.default_rng(4)
        n = 5
        alpha = rng.uniform(0, 2 * np.pi, n)          # target dipole phases
        beta = rng.uniform(0, 2 * np.pi, n)           # pump dipole phases
        phi_s = rng.uniform(0, 2 * np.pi, n)          # Stokes field phases
        eta = 1.3 * np.exp(1j * rng.uniform(0, 2 * np.pi))
        mu_stokes = crandn(rng, n, n)
        mu_stokes[:, -1] = np.abs(mu_stokes[:, -1]) * np.exp(1j * alpha)
        mu_pump = np.abs(crandn(rng, n)) * np.exp(1j * beta)
        system = SystemSpec(n, n, mu_pump, mu_stokes)
        fields = design_fields(system, TargetSpec.basis(n), eta, 1.0,
                               rng.uniform(1.0, 3.0, n), phi_s)
        # recover the physical pump phase from rabi = mu * E * exp(i phi) / 2
        phi_p = np.angle(fields.peak_rabi_pump / mu_pump)
        expected = -phi_s - beta - alpha - np.angle(eta)
        phase_diff = np.exp(1j * (phi_p - expected))
        assert np.allclose(phase_diff, 1.0, atol=1e-12)
        # and the condition itself holds entrywise
        lhs = np.conj(mu_pump * (2 * np.abs(fields.peak_rabi_pump)
                                 / np.abs(mu_pump))
                      * np.exp(1j * phi_p)) / 2
        assert np.allclose(lhs, eta * fields.peak_rabi_stokes[:, -1],
                           atol=1e-10)

    def test_rejects_zero_eta(self):
        system = SystemSpec(2, 2, [1, 1], np.eye(2))
        with pytest.raises(DesignError, match="eta"):
            design_fields(system, TargetSpec.basis(2), 0.0, 1.0, [1.0, 1.0])

    def test_rejects_infeasible(self):
        rng = np.random.default_rng(5)
        system = SystemSpec(2, 3, crandn(rng, 2), crandn(rng, 2, 3))
        with pytest.raises(DesignError):
            design_fields(system, TargetSpec.basis(3), 1.0, 1.0, [1.0, 1.0])

    def test_amplitude_validation(self):
        system = SystemSpec(2, 2, [1, 1], np.eye(2))
        with pytest.raises(ValueError):
            design_fields(system, TargetSpec.basis(2), 1.0, 1.0, [1.0])
        with pytest.raises(ValueError):
            design_fields(system, TargetSpec.basis(2), 1.0, 1.0, [-1.0, 1.0])


class TestVerifyDesign:
    def test_designed_fields_verify(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(2, n + 1))
            system = random_feasible_system(rng, n, m)
            target = random_target(rng, m)
            eta = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            fields = design_fields(system, target, eta, 1.0,
                                   rng.uniform(0.5, 2.0, n),
                                   rng.uniform(0, 2 * np.pi, n))
            result = verify_design(system, fields, target)
            assert result.ok
            assert result.residual < 1e-10 * fields.max_rabi
            assert result.eta == pytest.approx(eta, rel=1e-10)

    def test_perturbation_detected(self):
        from stirapkit import builtin_scenario
        scenario = builtin_scenario("fig2")
        pump = scenario.fields.peak_rabi_pump.copy()
        pump[0] *= 1.01
        broken = FieldSet(pump, scenario.fields.peak_rabi_stokes, 1.0)
        result = verify_design(scenario.system, broken)
        assert not result.ok
        # residual is the size of the perturbation, up to the eta refit
        assert result.residual == pytest.approx(0.6, rel=0.2)

    def test_all_zero_pumps_fail(self):
        rng = np.random.default_rng(7)
        system = random_feasible_system(rng, 3, 3)
        fields = FieldSet(np.zeros(3), crandn(rng, 3, 3) * 10, 1.0)
        result = verify_design(system, fields)
        assert not result.ok

    def test_nonzero_pump_on_pruned_channel_fails(self):
        stokes = np.array([[0.0, 0.0], [3.0, 4.0]])  # channel 1 decoupled
        fields = FieldSet([1.0, 4.0], stokes, 1.0)
        system = SystemSpec(2, 2, [1, 1], np.ones((2, 2)))
        result = verify_design(system, fields)
        assert not result.ok
        assert result.pruned == frozenset({1})


class TestDesignProperties:
    def test_node_guarantee(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            system = random_feasible_system(rng, n, n)
            target = random_target(rng, n)
            eta = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            fields = design_fields(system, target, eta, 1.0,
                                   rng.uniform(0.5, 2.0, n))
            t = rng.uniform(-1.0, 2.0)
            vec = analytic_lambda1(system, fields, t, target)
            h = hamiltonian(system, fields, t)
            assert np.linalg.norm(h @ vec.components) <= \
                1e-12 * np.linalg.norm(h, 2)
            assert len(numeric_null_space(h, 1e-9 * fields.max_rabi)) == 1
            # nodes on all intermediates plus the target-orthogonal manifold
            y = vec.components[1 + n:]
            overlap_sq = abs(np.vdot(target.coefficients, y)) ** 2
            assert np.allclose((np.abs(y) ** 2).sum(), overlap_sq, atol=1e-20)
            assert np.all(np.abs(vec.components[1:1 + n]) < 1e-12)

    def test_pruning_consistency(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(2, n + 1))
            system = random_feasible_system(rng, n, m)
            mu = system.mu_stokes.copy()
            dead = rng.integers(0, n)
            mu[dead, :] = 0.0  # channel coupled to nothing in the manifold
            system = SystemSpec(n, m, system.mu_pump, mu)
            target = random_target(rng, m)
            if not check_feasibility(system, target).feasible:
                continue
            fields = design_fields(system, target, 1.0, 1.0, np.ones(n))
            eff = effective_dipoles(system, target)
            for k in range(n):
                if abs(eff[k]) <= 1e-12 * np.abs(eff).max():
                    assert fields.peak_rabi_pump[k] == 0.0
                else:
                    assert abs(fields.peak_rabi_pump[k]) > 0

    def test_basis_change_equivalence(self):
        # designing in any rotated basis of the degenerate manifold gives
        # identical pump vectors when the target direction is the same state
        rng = np.random.default_rng(10)
        for _ in range(10):
            m = int(rng.integers(2, 5))
            n = m + int(rng.integers(0, 3))
            system = random_feasible_system(rng, n, m)
            target = random_target(rng, m)
            q, _ = np.linalg.qr(crandn(rng, m, m))
            rotated_system = SystemSpec(n, m, system.mu_pump,
                                        system.mu_stokes @ q)
            rotated_target = TargetSpec(q.conj().T @ target.coefficients)
            amplitudes = rng.uniform(0.5, 2.0, n)
            f1 = design_fields(system, target, 1.0, 1.0, amplitudes)
            f2 = design_fields(rotated_system, rotated_target, 1.0, 1.0,
                               amplitudes)
            assert np.allclose(f1.peak_rabi_pump, f2.peak_rabi_pump,
                               atol=1e-12 * f1.max_rabi)

    def test_eta_scaling(self):
        rng = np.random.default_rng(11)
        system = random_feasible_system(rng, 4, 4)
        target = random_target(rng, 4)
        amplitudes = rng.uniform(0.5, 2.0, 4)
        base = design_fields(system, target, 1.0, 1.0, amplitudes)
        for scale in (0.5, 2.0, 7.0):
            scaled = design_fields(system, target, scale, 1.0, amplitudes)
            assert np.allclose(scaled.peak_rabi_pump,
                               scale * base.peak_rabi_pump)
            assert verify_design(system, scaled, target).ok

    def test_matched_pump_rabi_matches_designer(self):
        rng = np.random.default_rng(12)
        system = random_feasible_system(rng, 3, 3)
        target = random_target(rng, 3)
        eta = 0.8 - 0.3j
        fields = design_fields(system, target, eta, 1.0,
                               rng.uniform(0.5, 2.0, 3))
        direct = matched_pump_rabi(fields.peak_rabi_stokes, target, eta)
        assert np.allclose(direct, fields.peak_rabi_pump)


class TestReduceChannels:
    def test_reduction_keeps_feasibility(self):
        rng = np.random.default_rng(13)
        system = random_feasible_system(rng, 5, 2)
        target = random_target(rng, 2)
        reduced, kept = reduce_channels(system, target)
        assert reduced.n_intermediate == 2
        assert len(kept) == 2
        assert check_feasibility(reduced, target).feasible
        rows = [k - 1 for k in kept]
        assert np.allclose(reduced.mu_stokes, system.mu_stokes[rows, :])

    def test_reduction_rejects_infeasible(self):
        rng = np.random.default_rng(14)
        system = SystemSpec(2, 3, crandn(rng, 2), crandn(rng, 2, 3))
        with pytest.raises(DesignError):
            reduce_channels(system, TargetSpec.basis(3))
