"""Integration routes checked against closed forms and independent solvers."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from adiabloch import (
    BlochPoint,
    EquatorialScenario,
    GeometricDrive,
    IntegratorConfig,
    InvalidConfigError,
    MatrixDrive,
    NormDriftExceededError,
    StateVector,
    TableSchedule,
    TooFewSamplesError,
    bloch_to_state,
    geometric_to_params,
    inner_product,
    integrate_equatorial,
    integrate_full,
    integrate_projected,
    piecewise_geodesic_drive,
    projected_rhs,
    to_pendulum_coords,
    trajectory_from_pendulum,
    integrate_pendulum,
)
from adiabloch.geometry import fs_distances
from adiabloch.verification import random_matrix_drive, random_point, random_smooth_drive

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def rotating_frame_state(omega0, cap, t, psi0):
    """Exact equatorial solution: frame rotation times a static precession."""
    w_eff = math.hypot(omega0, cap)
    n_dot_sigma = (omega0 * PAULI_X - cap * PAULI_Z) / w_eff
    half = 0.5 * w_eff * t
    u_rot = math.cos(half) * np.eye(2) - 1j * math.sin(half) * n_dot_sigma
    u_frame = np.diag([np.exp(-0.5j * cap * t), np.exp(0.5j * cap * t)])
    return u_frame @ u_rot @ psi0


def sup_fs(traj_a, traj_b):
    return float(np.max(fs_distances(traj_a.theta, traj_a.phi, traj_b.theta, traj_b.phi)))


class TestStationaryStates:
    def test_eigenstate_is_fixed_with_pure_phase(self):
        drive = GeometricDrive.static(2.0, 0.0, 0.0)  # H = diag(1, -1)
        traj = integrate_full(drive, StateVector(1, 0), 5.0)
        assert np.max(traj.theta) < 1e-12
        # psi(t) = e^{-i E0 t} psi(0) with E0 = 1
        expected = np.exp(-1j * traj.times)
        assert np.max(np.abs(traj.states[:, 0] - expected)) < 1e-9
        assert np.max(np.abs(traj.states[:, 1])) < 1e-12

    def test_fixed_point_of_projected_equations(self, rng):
        # the instantaneous eigenstate is an equilibrium of the projected flow
        for _ in range(100):
            omega = rng.uniform(0.2, 3.0)
            axis = random_point(rng)
            if not 0.05 < axis.theta < math.pi - 0.05:
                continue
            params = geometric_to_params(GeometricDrive.static(omega, axis.theta, axis.phi), 0.0)
            dth, dph = projected_rhs(axis.theta, axis.phi, params)
            assert abs(dth) < 1e-12
            assert abs(dph) < 1e-10

    def test_static_drive_keeps_equilibrium(self):
        sc = EquatorialScenario(1.0, 0.0, 10.0)
        traj = integrate_equatorial(sc)
        assert np.max(np.abs(traj.theta - math.pi / 2)) < 1e-12
        assert np.max(np.abs(traj.phi_unwrapped)) < 1e-12


class TestDiagonalClosedForm:
    def test_equator_precession_and_orthogonality(self):
        # H = diag(1, -1): phi(t) = omega t; overlap |cos(omega t / 2)|
        drive = GeometricDrive.static(2.0, 0.0, 0.0)
        psi0 = bloch_to_state(BlochPoint(math.pi / 2, 0.0))
        traj = integrate_full(drive, psi0, math.pi / 2)
        assert traj.phi_unwrapped[-1] == pytest.approx(math.pi, abs=1e-9)
        ov = abs(inner_product(traj.state(len(traj) - 1), traj.state(0)))
        assert ov < 1e-9
        mid = np.searchsorted(traj.times, math.pi / 4)
        t_mid = traj.times[mid]
        ov_mid = abs(inner_product(traj.state(mid), traj.state(0)))
        assert ov_mid == pytest.approx(abs(math.cos(t_mid)), abs=1e-9)

    def test_projected_autonomous_solution(self):
        # theta stays frozen, phi grows linearly at Omega = E0 - E1
        drive = GeometricDrive.static(2.0, 0.0, 0.0)
        traj = integrate_projected(drive, BlochPoint(1.0, 0.3), 50.0)
        assert np.max(np.abs(traj.theta - 1.0)) == 0.0
        expected = 0.3 + 2.0 * traj.times
        assert np.max(np.abs(traj.phi_unwrapped - expected)) < 1e-10

    def test_zero_coupling_freezes_theta(self):
        # R = 0 throughout, even with a time-varying gap
        ts = np.linspace(0, 5, 21)
        drive = GeometricDrive.from_schedules(
            TableSchedule(ts, 1.0 + 0.5 * np.sin(ts)), 0.0, 0.0
        )
        traj = integrate_projected(drive, BlochPoint(2.2, 1.0), 5.0)
        assert np.max(np.abs(traj.theta - 2.2)) == 0.0


class TestOracles:
    def test_rotating_frame_closed_form(self):
        sc = EquatorialScenario(1.0, 0.1, 4 * math.pi / 0.1)
        drive = sc.drive()
        psi0 = bloch_to_state(BlochPoint(math.pi / 2, 0.0)).as_array()
        traj = integrate_full(drive, StateVector(*psi0), sc.t_end, IntegratorConfig(n_samples=500))
        worst = 0.0
        for i in range(0, len(traj), 7):
            exact = rotating_frame_state(sc.omega0, sc.capital_omega, traj.times[i], psi0)
            got = traj.states[i]
            overlap = abs(np.vdot(exact, got))
            worst = max(worst, math.sqrt(max(0.0, 1.0 - min(overlap, 1.0) ** 2)))
        assert worst < 1e-6

    def test_scipy_reference_on_random_drive(self, rng):
        t_end = 5.0
        drive = random_smooth_drive(rng, t_end)
        p0 = random_point(rng)
        psi0 = bloch_to_state(p0).as_array()

        def rhs(t, y):
            psi = y[:2] + 1j * y[2:]
            h = drive.hamiltonian(t).as_array()
            d = -1j * (h @ psi)
            return np.concatenate([d.real, d.imag])

        sol = solve_ivp(
            rhs, (0.0, t_end), np.concatenate([psi0.real, psi0.imag]),
            method="DOP853", rtol=1e-12, atol=1e-13, dense_output=True,
        )
        traj = integrate_full(drive, StateVector(*psi0), t_end, IntegratorConfig(n_samples=200))
        worst = 0.0
        for i in range(len(traj)):
            ref = sol.sol(traj.times[i])
            psi_ref = ref[:2] + 1j * ref[2:]
            psi_ref /= np.linalg.norm(psi_ref)
            overlap = min(abs(np.vdot(psi_ref, traj.states[i])), 1.0)
            worst = max(worst, math.sqrt(max(0.0, 1.0 - overlap**2)))
        assert worst < 1e-8

    @pytest.mark.parametrize("kind", ["smooth", "matrix"])
    def test_projected_matches_full(self, rng, kind):
        t_end = 6.0
        drive = (
            random_smooth_drive(rng, t_end) if kind == "smooth" else random_matrix_drive(rng, t_end)
        )
        p0 = random_point(rng)
        cfg = IntegratorConfig(dt=1e-3 / drive.omega_max(0.0, t_end), n_samples=500)
        tp = integrate_projected(drive, p0, t_end, cfg)
        tf = integrate_full(drive, bloch_to_state(p0), t_end, cfg)
        assert sup_fs(tp, tf) < 1e-6

    def test_comparison_detects_sign_flip(self, rng):
        # guard: a sign error in the projected flow must break the equivalence
        t_end = 4.0
        drive = random_smooth_drive(rng, t_end)
        p0 = random_point(rng)
        cfg = IntegratorConfig(n_samples=300)
        tp = integrate_projected(drive, p0, t_end, cfg)
        tf = integrate_full(drive, bloch_to_state(p0), t_end, cfg)
        flipped = fs_distances(tp.theta, np.mod(-tp.phi_unwrapped, 2 * math.pi), tf.theta, tf.phi)
        assert float(np.max(flipped)) > 1e-2

    def test_pole_crossing_chart_switch(self):
        # state circles an axis near the pole, dipping through both charts
        drive = GeometricDrive.static(2.0, 0.1, 0.0)
        p0 = BlochPoint(0.25, 0.0)
        cfg = IntegratorConfig(dt=5e-4, n_samples=800)
        tp = integrate_projected(drive, p0, 12.0, cfg)
        tf = integrate_full(drive, bloch_to_state(p0), 12.0, cfg)
        assert np.min(tp.theta) < 0.06  # well inside the polar chart region
        assert sup_fs(tp, tf) < 1e-8

    def test_gauge_shift_leaves_ray_dynamics(self, rng):
        t_end = 5.0
        base = random_matrix_drive(rng, t_end)
        ts = base.h00.times
        f = 1.3 * np.sin(2 * np.pi * ts / t_end) + 0.4
        shifted = MatrixDrive(
            TableSchedule(ts, base.h00.values + f),
            TableSchedule(ts, base.h11.values + f),
            base.h01_re,
            base.h01_im,
        )
        p0 = random_point(rng)
        cfg = IntegratorConfig(dt=2e-3, n_samples=400)
        ta = integrate_full(base, bloch_to_state(p0), t_end, cfg)
        tb = integrate_full(shifted, bloch_to_state(p0), t_end, cfg)
        assert sup_fs(ta, tb) < 1e-9
        overlap = np.abs(np.sum(np.conj(ta.states) * tb.states, axis=1))
        assert np.max(np.abs(overlap - 1.0)) < 1e-9


class TestAdaptiveScheme:
    def test_matches_rk4(self, rng):
        t_end = 5.0
        drive = random_smooth_drive(rng, t_end)
        p0 = random_point(rng)
        a = integrate_projected(drive, p0, t_end, IntegratorConfig(n_samples=300))
        b = integrate_projected(
            drive, p0, t_end,
            IntegratorConfig(scheme="rk45-adaptive", rel_tol=1e-11, n_samples=300),
        )
        assert sup_fs(a, b) < 1e-7

    def test_full_state_adaptive(self, rng):
        t_end = 4.0
        drive = random_smooth_drive(rng, t_end)
        psi0 = bloch_to_state(random_point(rng))
        a = integrate_full(drive, psi0, t_end, IntegratorConfig(n_samples=200))
        b = integrate_full(
            drive, psi0, t_end,
            IntegratorConfig(scheme="rk45-adaptive", rel_tol=1e-11, n_samples=200),
        )
        assert sup_fs(a, b) < 1e-7


class TestConfigAndErrors:
    def test_norm_preservation_at_default_dt(self, rng):
        drive = random_smooth_drive(rng, 5.0)
        traj = integrate_full(drive, bloch_to_state(random_point(rng)), 5.0)
        assert traj.stats.max_norm_drift < 1e-12

    def test_dt_too_large_rejected(self):
        drive = GeometricDrive.static(2.0, 0.5, 0.0)
        with pytest.raises(InvalidConfigError):
            integrate_full(drive, StateVector(1, 0), 1.0, IntegratorConfig(dt=0.2))

    def test_norm_drift_limit_enforced(self):
        drive = GeometricDrive.static(2.0, 1.0, 0.0)
        cfg = IntegratorConfig(dt=0.05, norm_drift_limit=1e-16)
        with pytest.raises(NormDriftExceededError):
            integrate_full(drive, StateVector(1, 0), 50.0, cfg)

    def test_invalid_configs(self):
        with pytest.raises(InvalidConfigError):
            IntegratorConfig(dt=-1.0)
        with pytest.raises(InvalidConfigError):
            IntegratorConfig(scheme="euler")
        with pytest.raises(InvalidConfigError):
            IntegratorConfig(n_samples=1)
        with pytest.raises(InvalidConfigError):
            EquatorialScenario(0.0, 0.1, 1.0)

    def test_negative_omega_rejected(self):
        drive = GeometricDrive.static(-1.0, 0.5, 0.0)
        with pytest.raises(InvalidConfigError):
            integrate_projected(drive, BlochPoint(1.0, 0.0), 1.0)


class TestPendulumCoordinates:
    def test_on_axis_samples_are_zero(self):
        sc = EquatorialScenario(1.0, 0.1, 10.0)
        traj = integrate_equatorial(sc, cfg=IntegratorConfig(n_samples=50))
        # fabricate exact on-axis motion
        from dataclasses import replace

        exact = replace(
            traj,
            theta=np.full_like(traj.times, math.pi / 2),
            phi_unwrapped=0.1 * traj.times,
            phi=np.mod(0.1 * traj.times, 2 * math.pi),
        )
        series = to_pendulum_coords(exact, 0.1)
        assert np.max(np.abs(series.eps)) == 0.0
        assert np.max(np.abs(series.eta)) == 0.0

    def test_direct_offsets(self):
        from dataclasses import replace

        sc = EquatorialScenario(1.0, 0.1, 1.0)
        traj = integrate_equatorial(sc, cfg=IntegratorConfig(n_samples=10))
        shifted = replace(
            traj,
            theta=np.full_like(traj.times, math.pi / 2 + 0.1),
            phi_unwrapped=0.1 * traj.times + 0.05,
            phi=np.mod(0.1 * traj.times + 0.05, 2 * math.pi),
        )
        series = to_pendulum_coords(shifted, 0.1)
        assert np.allclose(series.eps, 0.1)
        assert np.allclose(series.eta, 0.1)

    def test_too_few_samples(self):
        sc = EquatorialScenario(1.0, 0.1, 1.0)
        traj = integrate_equatorial(sc, cfg=IntegratorConfig(n_samples=2))
        with pytest.raises(TooFewSamplesError):
            to_pendulum_coords(traj, 0.1)

    def test_reconstructed_trajectory_round_trip(self):
        sc = EquatorialScenario(1.0, 0.05, 40.0)
        series = integrate_pendulum(sc, IntegratorConfig(n_samples=200))
        traj = trajectory_from_pendulum(series, sc)
        back = to_pendulum_coords(traj, sc.capital_omega)
        assert np.allclose(back.eps, series.eps, atol=1e-12)
        assert np.allclose(back.eta, series.eta, atol=1e-12)


class TestPiecewiseGeodesicAdiabatic:
    def test_triangle_path_tracks_eigenstate(self):
        waypoints = [
            (0.3, 0.0),
            (math.pi / 2, 1.2),
            (1.9, 3.0),
        ]
        total_time = 3000.0  # omega / arc-rate ~ 1e3
        drive = piecewise_geodesic_drive(waypoints, 1.0, total_time)
        th0, ph0 = drive.axis_angles(0.0)
        psi0 = bloch_to_state(BlochPoint(th0, ph0))
        traj = integrate_full(drive, psi0, total_time, IntegratorConfig(n_samples=1500))
        th_end, ph_end = drive.axis_angles(total_time)
        final_gap = fs_distances(
            traj.theta[-1], traj.phi[-1], np.array(th_end), np.array(ph_end)
        )
        assert float(final_gap) < 5e-3
