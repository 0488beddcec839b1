"""Randomized verification suites, deterministic under a seed.

These are the self-checks behind the ``verify`` CLI subcommand: coordinate
round trips, antipodal orthogonality, gauge invariance (algebraic and
dynamic), equivalence of the projected and full-state integrators, the
speed identity, the passage-time bound and pendulum energy conservation.
The drive generators here are also reused by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import (
    delta_e_series,
    fs_speed_series,
    passage_check,
    pendulum_energy_series,
)
from .evolution import (
    EquatorialScenario,
    IntegratorConfig,
    integrate_full,
    integrate_pendulum,
    integrate_projected,
)
from .geometry import (
    BlochPoint,
    antipode,
    bloch_to_state,
    fs_distances,
    inner_product,
    state_to_bloch,
)
from .hamiltonian import (
    GeometricDrive,
    HamiltonianMatrix,
    MatrixDrive,
    eigen_bloch,
    gauge_shift,
    geometric_to_params,
    instantaneous_gap,
    params_to_matrix,
    relabel,
)
from .schedules import ConstantSchedule, GreatCircleSegment, TableSchedule


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    max_error: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        tag = "pass" if self.passed else "FAIL"
        return (
            f"[{tag}] {self.name}: {self.cases} cases, "
            f"max error {self.max_error:.3e} (tol {self.tolerance:.1e})"
        )


def random_point(rng: np.random.Generator) -> BlochPoint:
    """Uniform random point on the sphere."""
    z = rng.uniform(-1.0, 1.0)
    return BlochPoint(math.acos(z), rng.uniform(0.0, 2.0 * math.pi))


def _fourier(rng, ts, t_end, amp, modes=4):
    v = np.zeros_like(ts)
    for j in range(1, modes + 1):
        v += rng.normal() * (amp / j) * np.sin(2.0 * np.pi * j * ts / t_end + rng.uniform(0, 2 * np.pi))
    return v


def random_smooth_drive(rng: np.random.Generator, t_end: float, n_nodes: int = 257) -> GeometricDrive:
    """Smooth random geometric drive from band-limited table schedules.

    The gap stays in [0.3, ~2.5] and the axis colatitude away from the
    poles, so the eigen-structure is well conditioned everywhere.
    """
    ts = np.linspace(0.0, t_end, n_nodes)
    omega = np.clip(1.2 + _fourier(rng, ts, t_end, 0.6), 0.3, None)
    theta = np.clip(0.5 * math.pi + _fourier(rng, ts, t_end, 0.9), 0.25, math.pi - 0.25)
    phi = _fourier(rng, ts, t_end, 2.0)
    return GeometricDrive.from_schedules(
        TableSchedule(ts, omega), TableSchedule(ts, theta), TableSchedule(ts, phi)
    )


def random_matrix_drive(rng: np.random.Generator, t_end: float, n_nodes: int = 193) -> MatrixDrive:
    """Random Hermitian-entry drive, including a nonzero trace part."""
    ts = np.linspace(0.0, t_end, n_nodes)
    return MatrixDrive(
        TableSchedule(ts, 0.6 + _fourier(rng, ts, t_end, 0.5)),
        TableSchedule(ts, -0.6 + _fourier(rng, ts, t_end, 0.5)),
        TableSchedule(ts, _fourier(rng, ts, t_end, 0.8)),
        TableSchedule(ts, _fourier(rng, ts, t_end, 0.8)),
    )


def _perp_unit(v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    probe = rng.normal(size=3)
    u = np.cross(v, probe)
    n = np.linalg.norm(u)
    while n < 1e-6:
        probe = rng.normal(size=3)
        u = np.cross(v, probe)
        n = np.linalg.norm(u)
    return u / n


def random_orthogonal_journey(rng: np.random.Generator):
    """Drive steering a state to its antipode along three great-circle legs.

    Each leg holds the axis static and orthogonal to the current state, so
    the state travels a great-circle arc at angular rate omega; the legs
    chain start -> P1 -> P2 -> antipode(start). The Fubini-Study length is
    half the summed arc angles, strictly above pi/2 unless P1, P2 sit on
    the geodesic, so the passage product exceeds pi/2 by a random margin.

    Returns (drive, start_point, t_end, expected_product).
    """
    p_start = random_point(rng)
    v0 = p_start.vector()
    v3 = -v0
    while True:
        v1 = random_point(rng).vector()
        v2 = random_point(rng).vector()
        angles = []
        ok = True
        for a, b in ((v0, v1), (v1, v2), (v2, v3)):
            g = math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))
            if not 0.15 < g < math.pi - 0.15:
                ok = False
                break
            angles.append(g)
        if ok:
            break
    omega = rng.uniform(0.8, 2.0)
    segments = []
    t = 0.0
    for (a, b), g in zip(((v0, v1), (v1, v2), (v2, v3)), angles):
        axis = np.cross(a, b)
        axis /= np.linalg.norm(axis)
        dt_leg = g / omega
        segments.append(
            GreatCircleSegment(t, t + dt_leg, 0.0, tuple(axis), tuple(_perp_unit(axis, rng)))
        )
        t += dt_leg
    drive = GeometricDrive.from_arcs(ConstantSchedule(omega), segments)
    return drive, p_start, t, 0.5 * sum(angles)


def _wrapped_diff(a: float, b: float) -> float:
    d = math.fmod(a - b, 2.0 * math.pi)
    if d > math.pi:
        d -= 2.0 * math.pi
    if d < -math.pi:
        d += 2.0 * math.pi
    return abs(d)


def check_round_trip(rng, n_cases) -> CheckResult:
    worst = 0.0
    for _ in range(n_cases):
        p = random_point(rng)
        q = state_to_bloch(bloch_to_state(p))
        worst = max(worst, abs(q.theta - p.theta), _wrapped_diff(q.phi, p.phi))
    return CheckResult("geometry round-trip", n_cases, worst, 1e-10, worst < 1e-10)


def check_antipodal_orthogonality(rng, n_cases) -> CheckResult:
    worst = 0.0
    for _ in range(n_cases):
        p = random_point(rng)
        ov = abs(inner_product(bloch_to_state(p), bloch_to_state(antipode(p))))
        worst = max(worst, ov)
    return CheckResult("antipodal orthogonality", n_cases, worst, 1e-12, worst < 1e-12)


def check_hamiltonian_cycle(rng, n_cases) -> CheckResult:
    """Geometric identifications invert exactly and ignore gauge shifts."""
    worst = 0.0
    for _ in range(n_cases):
        omega = rng.uniform(0.1, 3.0)
        axis = random_point(rng)
        drive = GeometricDrive.static(omega, axis.theta, axis.phi)
        h = params_to_matrix(geometric_to_params(drive, 0.0), rng.normal())
        hs = gauge_shift(h, rng.normal())
        p = eigen_bloch(hs)
        worst = max(
            worst,
            abs(p.theta - axis.theta),
            _wrapped_diff(p.phi, axis.phi) * math.sin(axis.theta),
            abs(instantaneous_gap(hs) - omega),
            abs(relabel(hs).omega_diag - relabel(h).omega_diag),
        )
    return CheckResult("hamiltonian conversion cycle", n_cases, worst, 1e-10, worst < 1e-10)


def check_oracle_equivalence(rng, n_cases) -> CheckResult:
    """Projected integration against the full-state oracle on random drives."""
    worst = 0.0
    for i in range(n_cases):
        t_end = rng.uniform(4.0, 7.0)
        drive = (
            random_smooth_drive(rng, t_end)
            if i % 2 == 0
            else random_matrix_drive(rng, t_end)
        )
        p0 = random_point(rng)
        cfg = IntegratorConfig(dt=2e-3 / drive.omega_max(0.0, t_end), n_samples=400)
        tp = integrate_projected(drive, p0, t_end, cfg)
        tf = integrate_full(drive, bloch_to_state(p0), t_end, cfg)
        worst = max(worst, float(np.max(fs_distances(tp.theta, tp.phi, tf.theta, tf.phi))))
    return CheckResult("oracle equivalence", n_cases, worst, 1e-6, worst < 1e-6)


def check_gauge_invariance_dynamics(rng, n_cases) -> CheckResult:
    """A time-dependent trace term must not move the projected trajectory."""
    worst = 0.0
    for _ in range(n_cases):
        t_end = 5.0
        base = random_matrix_drive(rng, t_end)
        ts = base.h00.times
        f = _fourier(rng, ts, t_end, 1.5)
        shifted = MatrixDrive(
            TableSchedule(ts, base.h00.values + f),
            TableSchedule(ts, base.h11.values + f),
            base.h01_re,
            base.h01_im,
        )
        p0 = random_point(rng)
        psi = bloch_to_state(p0)
        cfg = IntegratorConfig(dt=2e-3, n_samples=300)
        ta = integrate_full(base, psi, t_end, cfg)
        tb = integrate_full(shifted, psi, t_end, cfg)
        worst = max(worst, float(np.max(fs_distances(ta.theta, ta.phi, tb.theta, tb.phi))))
        # states differ by a pure global phase
        ov = np.abs(np.sum(np.conj(ta.states) * tb.states, axis=1))
        worst = max(worst, float(np.max(np.abs(ov - 1.0))))
    return CheckResult("gauge invariance of dynamics", n_cases, worst, 1e-9, worst < 1e-9)


def check_speed_identity(rng, n_cases) -> CheckResult:
    """|ds/dt - dE| on interior samples, relative to max dE.

    dE(t) has conical zeros wherever the state crosses an eigenstate, and
    there a chord-based speed estimate is only first-order accurate, so the
    sampling must satisfy h * omega <= ~1.5e-3 for the 1e-3 tolerance.
    """
    worst = 0.0
    for _ in range(n_cases):
        t_end = rng.uniform(4.0, 6.0)
        drive = random_smooth_drive(rng, t_end)
        p0 = random_point(rng)
        n = int(t_end * drive.omega_max(0.0, t_end) / 1.5e-3)
        cfg = IntegratorConfig(n_samples=max(n, 200))
        traj = integrate_projected(drive, p0, t_end, cfg)
        de = delta_e_series(traj, drive)
        speed = fs_speed_series(traj)
        tol = max(1e-3 * float(np.max(de)), 1e-9)
        err = float(np.max(np.abs(speed[1:-1] - de[1:-1]))) / tol
        worst = max(worst, err)
    return CheckResult("speed identity ds/dt = dE", n_cases, worst, 1.0, worst < 1.0)


def check_passage_bound(rng, n_cases) -> CheckResult:
    """dE_bar * dt >= pi/2 on randomized orthogonal-endpoint journeys."""
    worst = -math.inf  # largest bound violation (negative margin)
    for _ in range(n_cases):
        drive, p_start, t_end, expected = random_orthogonal_journey(rng)
        traj = integrate_full(drive, bloch_to_state(p_start), t_end, IntegratorConfig(n_samples=600))
        res = passage_check(traj, drive)
        if not res.applicable:
            return CheckResult("passage-time bound", n_cases, math.inf, 1e-6, False)
        violation = 0.5 * math.pi - res.passage_product
        worst = max(worst, violation)
        worst = max(worst, abs(res.passage_product - expected) - 1e-3)
    return CheckResult("passage-time bound", n_cases, worst, 1e-6, worst < 1e-6)


def check_pendulum_energy(rng, n_cases) -> CheckResult:
    worst = 0.0
    ratios = [rng.uniform(8.0, 1200.0) for _ in range(max(1, min(n_cases, 8)))]
    for ratio in ratios:
        omega0 = rng.uniform(0.5, 2.0)
        cap = omega0 / ratio
        sc = EquatorialScenario(omega0, cap, 2.0 * math.pi / cap)
        series = integrate_pendulum(sc, IntegratorConfig(n_samples=800))
        e = pendulum_energy_series(series, omega0)
        e0 = 2.0 * cap**2 - omega0**2
        worst = max(worst, float(np.max(np.abs(e - e0))) / omega0**2)
    return CheckResult("pendulum energy conservation", len(ratios), worst, 1e-8, worst < 1e-8)


_ALL_CHECKS = [
    check_round_trip,
    check_antipodal_orthogonality,
    check_hamiltonian_cycle,
    check_oracle_equivalence,
    check_gauge_invariance_dynamics,
    check_speed_identity,
    check_passage_bound,
    check_pendulum_energy,
]


def run_verification(seed: int, n_cases: int) -> list[CheckResult]:
    """Run every randomized suite; deterministic for a given seed."""
    if n_cases < 1:
        raise ValueError("n_cases must be at least 1")
    results = []
    for check in _ALL_CHECKS:
        rng = np.random.default_rng([seed, _ALL_CHECKS.index(check)])
        results.append(check(rng, n_cases))
    return results
