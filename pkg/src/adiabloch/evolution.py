"""Time integration of the two-level dynamics.

Two independent routes are implemented and cross-checked throughout the
package: exact integration of the two amplitudes (the oracle) and the
projected flow on the ray sphere, which switches to a stereographic chart
near the poles where cot(theta) blows up. A third, reduced route
integrates the pendulum equation governing the deviation coordinates of
the equatorial scenario.

Sign conventions. The projected equations are

    theta_dot = -2 R sin(phi - lambda)
    phi_dot   = Omega - 2 R cot(theta) cos(phi - lambda)

which follow from the ray-space form of the Schrodinger equation; for a
diagonal Hamiltonian they give phi(t) = Omega t + phi0 with Omega = E0 -
E1, and the instantaneous eigenstates are their fixed points. In the
equatorial deviation coordinates eps = theta - pi/2, eta = 2(phi - Omega
t) this makes eps_dot = -omega0 sin(eta/2); the reconstruction sign is
:data:`EPS_RECONSTRUCTION_SIGN` and was pinned against the full-state
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import (
    AntipodalWaypointsError,
    InvalidConfigError,
    NormDriftExceededError,
    StepRejectionExhaustedError,
    TooFewSamplesError,
)
from .geometry import BlochPoint, StateVector
from .hamiltonian import DriveParams, GeometricDrive, HamiltonianMatrix
from .schedules import ConstantSchedule, GreatCircleSegment

#: Sign of d(eps)/dt relative to omega0 sin(eta/2) under this package's
#: projected-equation convention (the full-state oracle confirms -1).
EPS_RECONSTRUCTION_SIGN = -1.0

#: Default dt is chosen so dt * max(omega) equals this; keeps per-step
#: norm drift of the RK4 oracle below 1e-12.
_DEFAULT_DT_PER_OMEGA = 0.02

#: Hard cap from the config contract: the fast precession must be resolved.
_MAX_DT_PER_OMEGA = 0.1

#: Pendulum substep cap (times 1/omega0); keeps energy drift per drive
#: period under 1e-8 even at omega0/Omega = 1000.
_PENDULUM_STEP_PER_OMEGA = 0.008

_SCHEMES = {"rk4": _kernels.SCHEME_RK4, "rk45-adaptive": _kernels.SCHEME_RK45}


@dataclass(frozen=True)
class IntegratorConfig:
    """Numerical controls for a single integration run.

    ``dt=None`` picks 0.02 / max(omega) automatically. The hard validity
    limit dt * max(omega) <= 0.1 is enforced at run start.
    """

    dt: float | None = None
    scheme: str = "rk4"
    rel_tol: float = 1e-10
    norm_drift_limit: float = 1e-9
    chart_switch_threshold: float = 0.2
    n_samples: int = 2000

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise InvalidConfigError("dt must be positive")
        if self.scheme not in _SCHEMES:
            raise InvalidConfigError(f"unknown scheme {self.scheme!r}")
        if not 0.0 < self.rel_tol < 1.0:
            raise InvalidConfigError("rel_tol must be in (0, 1)")
        if not self.norm_drift_limit > 0:
            raise InvalidConfigError("norm_drift_limit must be positive")
        if not 0.01 <= self.chart_switch_threshold <= 1.0:
            raise InvalidConfigError("chart_switch_threshold must be in [0.01, 1.0]")
        if self.n_samples < 2:
            raise InvalidConfigError("n_samples must be at least 2")


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    max_norm_drift: float
    dt: float


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of one integration run.

    ``phi`` is the azimuth wrapped to [0, 2*pi); ``phi_unwrapped`` is the
    continuous branch (needed for slopes and the deviation coordinates).
    ``states`` and ``norm_drift`` are populated by full-state runs only.
    """

    times: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    phi_unwrapped: np.ndarray
    source: str
    states: np.ndarray | None = None
    norm_drift: np.ndarray | None = None
    stats: IntegratorStats | None = None

    def __len__(self) -> int:
        return len(self.times)

    def bloch(self, i: int) -> BlochPoint:
        return BlochPoint(float(self.theta[i]), float(self.phi[i]))

    def state(self, i: int) -> StateVector:
        if self.states is None:
            raise ValueError("trajectory carries no state samples")
        return StateVector(self.states[i, 0], self.states[i, 1])


@dataclass(frozen=True)
class PendulumState:
    """Deviation coordinates of the equatorial run at one instant."""

    eps: float
    eta: float
    eta_dot: float


class PendulumSeries:
    """Array-backed sequence of :class:`PendulumState` samples."""

    def __init__(self, times, eps, eta, eta_dot):
        self.times = np.asarray(times, dtype=float)
        self.eps = np.asarray(eps, dtype=float)
        self.eta = np.asarray(eta, dtype=float)
        self.eta_dot = np.asarray(eta_dot, dtype=float)

    def __len__(self):
        return self.times.size

    def __getitem__(self, i) -> PendulumState:
        return PendulumState(float(self.eps[i]), float(self.eta[i]), float(self.eta_dot[i]))


@dataclass(frozen=True)
class EquatorialScenario:
    """Uniform axis rotation along the equator: constant gap omega0,
    rotation rate capital_omega, run length t_end."""

    omega0: float
    capital_omega: float
    t_end: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise InvalidConfigError("omega0 must be positive")
        if self.capital_omega < 0:
            raise InvalidConfigError("capital_omega must be non-negative")
        if not self.t_end > 0:
            raise InvalidConfigError("t_end must be positive")

    def drive(self) -> GeometricDrive:
        return GeometricDrive.equatorial(self.omega0, self.capital_omega)


def projected_rhs(theta: float, phi: float, params: DriveParams) -> tuple[float, float]:
    """Right-hand side of the projected equations at one point.

    Exposed mainly so the fixed-point property (eigenstates are equilibria
    of a momentarily static drive) can be checked directly.
    """
    delta = phi - params.lam
    dth = -2.0 * params.r * math.sin(delta)
    dph = params.omega_diag - 2.0 * params.r * (math.cos(theta) / math.sin(theta)) * math.cos(delta)
    return dth, dph


def schrodinger_rhs(psi: StateVector, h: HamiltonianMatrix) -> tuple[complex, complex]:
    """d psi / dt = -i H psi, componentwise."""
    h10 = complex(h.h01).conjugate()
    return (
        -1j * (h.h00 * psi.psi0 + h.h01 * psi.psi1),
        -1j * (h10 * psi.psi0 + h.h11 * psi.psi1),
    )


def _resolve_dt(drive, t_end: float, cfg: IntegratorConfig) -> float:
    w_max = drive.omega_max(0.0, t_end)
    if cfg.dt is not None:
        dt = cfg.dt
    elif w_max > 0.0:
        dt = _DEFAULT_DT_PER_OMEGA / w_max
    else:
        dt = t_end / 1000.0
    if dt * w_max > _MAX_DT_PER_OMEGA * (1.0 + 1e-12):
        raise InvalidConfigError(
            f"dt * max(omega) = {dt * w_max:.3g} exceeds {_MAX_DT_PER_OMEGA}; "
            "the fast precession would be unresolved"
        )
    return dt


def _build_grid(samples: np.ndarray, kinks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge sample times with drive kink times into one landmark grid."""
    t_end = samples[-1]
    if kinks.size:
        ks = np.unique(kinks[(kinks > samples[0]) & (kinks < t_end)])
        idx = np.searchsorted(samples, ks)
        left = np.abs(ks - samples[np.clip(idx - 1, 0, len(samples) - 1)])
        right = np.abs(samples[np.clip(idx, 0, len(samples) - 1)] - ks)
        ks = ks[np.minimum(left, right) > 1e-9 * max(1.0, abs(t_end))]
    else:
        ks = np.empty(0)
    grid = np.concatenate([samples, ks])
    flags = np.concatenate([np.ones(len(samples), dtype=np.uint8), np.zeros(len(ks), dtype=np.uint8)])
    order = np.argsort(grid, kind="stable")
    return np.ascontiguousarray(grid[order]), np.ascontiguousarray(flags[order])


def _prepare(drive, t_end: float, cfg: IntegratorConfig):
    if not t_end > 0:
        raise InvalidConfigError("t_end must be positive")
    drive.validate(0.0, t_end)
    dt = _resolve_dt(drive, t_end, cfg)
    samples = np.linspace(0.0, t_end, cfg.n_samples)
    grid, flags = _build_grid(samples, drive.kink_times(0.0, t_end))
    return drive.encode(), samples, grid, flags, dt


def _raise_for_status(status: int, cfg: IntegratorConfig, dt: float) -> None:
    if status == _kernels.STATUS_NORM_DRIFT:
        raise NormDriftExceededError(
            f"norm drift exceeded {cfg.norm_drift_limit:g} at dt = {dt:g}; reduce dt"
        )
    if status == _kernels.STATUS_REJECTED:
        raise StepRejectionExhaustedError("adaptive stepper ran out of rejections")


def integrate_full(
    drive, psi_init: StateVector, t_end: float, cfg: IntegratorConfig = IntegratorConfig()
) -> Trajectory:
    """Integrate the exact two-amplitude Schrodinger equation.

    The state is renormalized every step; the pre-renormalization drift is
    recorded per sample and a step that drifts past
    ``cfg.norm_drift_limit`` aborts the run (the step size is too large).
    """
    enc, samples, grid, flags, dt = _prepare(drive, t_end, cfg)
    n = len(samples)
    out_psi = np.empty((n, 2), dtype=complex)
    out_drift = np.empty(n, dtype=float)
    status, steps, rejected, max_drift = _kernels.full_evolution(
        enc.mode, enc.kinds, enc.params, enc.tab_t, enc.tab_v, enc.offs, enc.segs,
        complex(psi_init.psi0), complex(psi_init.psi1),
        grid, flags, dt, _SCHEMES[cfg.scheme], cfg.rel_tol, cfg.norm_drift_limit,
        out_psi, out_drift,
    )
    _raise_for_status(status, cfg, dt)
    theta = 2.0 * np.arctan2(np.abs(out_psi[:, 1]), np.abs(out_psi[:, 0]))
    phi_principal = np.angle(out_psi[:, 1] * np.conj(out_psi[:, 0]))
    phi = np.mod(phi_principal, 2.0 * np.pi)
    return Trajectory(
        times=samples,
        theta=theta,
        phi=phi,
        phi_unwrapped=np.unwrap(phi_principal),
        source="full_state",
        states=out_psi,
        norm_drift=out_drift,
        stats=IntegratorStats(int(steps), int(rejected), float(max_drift), dt),
    )


def integrate_projected(
    drive, p_init: BlochPoint, t_end: float, cfg: IntegratorConfig = IntegratorConfig()
) -> Trajectory:
    """Integrate the projected dynamics on the ray sphere.

    Runs in the (theta, phi) chart away from the poles; within
    ``cfg.chart_switch_threshold`` of either pole it switches to the
    stereographic coordinate (or its reciprocal), avoiding the cot(theta)
    singularity. Agrees with the projection of :func:`integrate_full` to
    the integrators' accuracy.
    """
    enc, samples, grid, flags, dt = _prepare(drive, t_end, cfg)
    n = len(samples)
    out_theta = np.empty(n, dtype=float)
    out_phi = np.empty(n, dtype=float)
    status, steps, rejected = _kernels.projected_evolution(
        enc.mode, enc.kinds, enc.params, enc.tab_t, enc.tab_v, enc.offs, enc.segs,
        float(p_init.theta), float(p_init.phi),
        grid, flags, dt, _SCHEMES[cfg.scheme], cfg.rel_tol, cfg.chart_switch_threshold,
        out_theta, out_phi,
    )
    _raise_for_status(status, cfg, dt)
    return Trajectory(
        times=samples,
        theta=out_theta,
        phi=np.mod(out_phi, 2.0 * np.pi),
        phi_unwrapped=out_phi,
        source="projected",
        stats=IntegratorStats(int(steps), int(rejected), 0.0, dt),
    )


def integrate_equatorial(
    sc: EquatorialScenario,
    p_init: BlochPoint | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> Trajectory:
    """Projected integration of the equatorial scenario.

    The default initial point (pi/2, 0) is the instantaneous upper
    eigenstate at t = 0, the unique point where both projected derivatives
    vanish initially.
    """
    if p_init is None:
        p_init = BlochPoint(0.5 * math.pi, 0.0)
    traj = integrate_projected(sc.drive(), p_init, sc.t_end, cfg)
    return replace(traj, source="equatorial")


def to_pendulum_coords(traj: Trajectory, capital_omega: float) -> PendulumSeries:
    """Deviation coordinates eps = theta - pi/2, eta = 2(phi - Omega t).

    eta uses the unwrapped azimuth, so it is continuous; eta_dot comes from
    centered finite differences (second-order one-sided at the ends).
    """
    if len(traj) < 3:
        raise TooFewSamplesError("need at least 3 samples for the eta derivative")
    t = traj.times
    eps = traj.theta - 0.5 * math.pi
    eta = 2.0 * (traj.phi_unwrapped - capital_omega * t)
    eta_dot = np.empty_like(eta)
    eta_dot[1:-1] = (eta[2:] - eta[:-2]) / (t[2:] - t[:-2])
    h0 = t[1] - t[0]
    h1 = t[-1] - t[-2]
    eta_dot[0] = (-3.0 * eta[0] + 4.0 * eta[1] - eta[2]) / (2.0 * h0)
    eta_dot[-1] = (3.0 * eta[-1] - 4.0 * eta[-2] + eta[-3]) / (2.0 * h1)
    return PendulumSeries(t, eps, eta, eta_dot)


def integrate_pendulum(
    sc: EquatorialScenario, cfg: IntegratorConfig = IntegratorConfig()
) -> PendulumSeries:
    """Integrate the reduced pendulum equation eta'' = -omega0^2 sin(eta).

    Initial data eta(0) = 0, eta'(0) = -2 Omega follow from starting at the
    instantaneous eigenstate; eps is reconstructed with
    :data:`EPS_RECONSTRUCTION_SIGN`. Substepping is capped internally so
    the pendulum energy is conserved to a relative 1e-8 per drive period
    regardless of the sampling config.
    """
    times = np.linspace(0.0, sc.t_end, cfg.n_samples)
    cap = _PENDULUM_STEP_PER_OMEGA / sc.omega0
    if cfg.dt is not None:
        cap = min(cap, cfg.dt)
    out_eta = np.empty(cfg.n_samples, dtype=float)
    out_etadot = np.empty(cfg.n_samples, dtype=float)
    out_eps = np.empty(cfg.n_samples, dtype=float)
    _kernels.pendulum_evolution(
        sc.omega0, sc.capital_omega, times, cap, out_eta, out_etadot, out_eps
    )
    return PendulumSeries(times, out_eps, out_eta, out_etadot)


def trajectory_from_pendulum(series: PendulumSeries, sc: EquatorialScenario) -> Trajectory:
    """Bloch trajectory reconstructed from pendulum coordinates."""
    theta = 0.5 * math.pi + series.eps
    phi_unw = sc.capital_omega * series.times + 0.5 * series.eta
    return Trajectory(
        times=series.times,
        theta=theta,
        phi=np.mod(phi_unw, 2.0 * np.pi),
        phi_unwrapped=phi_unw,
        source="pendulum-reconstructed",
    )


def piecewise_geodesic_drive(
    waypoints, omega: float, total_time: float, n_segments: int = 0
) -> GeometricDrive:
    """Drive whose axis walks great-circle arcs through the waypoints.

    A single angular rate (total arc length / total_time) is used, so the
    time spent on each leg is proportional to its arc length, and the gap
    omega stays constant. ``n_segments`` refines the segment table to at
    least that many sub-arcs (allocated by length) without changing the
    traced path. Consecutive waypoints must not be antipodal, since every
    great circle through an antipodal pair is a geodesic.
    """
    pts = [p if isinstance(p, BlochPoint) else BlochPoint(*p) for p in waypoints]
    if len(pts) < 2:
        raise InvalidConfigError("need at least two waypoints")
    if not total_time > 0:
        raise InvalidConfigError("total_time must be positive")
    vecs = [p.vector() for p in pts]
    legs = []  # (start_vec, tangent_vec, arc_angle)
    for a, b in zip(vecs, vecs[1:]):
        cross = np.cross(a, b)
        gamma = math.atan2(float(np.linalg.norm(cross)), float(a @ b))
        if gamma > math.pi - 1e-9:
            raise AntipodalWaypointsError(
                "consecutive waypoints are antipodal; insert an intermediate point"
            )
        if gamma < 1e-12:
            continue
        u = (b - a * math.cos(gamma)) / math.sin(gamma)
        legs.append((a, u, gamma))
    if not legs:
        # All waypoints coincide: a static axis for the whole window.
        seg = GreatCircleSegment(0.0, total_time, 0.0, tuple(vecs[0]), _any_tangent(vecs[0]))
        return GeometricDrive.from_arcs(ConstantSchedule(float(omega)), [seg])
    total = sum(g for _, _, g in legs)
    rate = total / total_time
    target = max(int(n_segments), len(legs))
    counts = [max(1, round(target * g / total)) for _, _, g in legs]
    segments = []
    t = 0.0
    for (a, u, gamma), m in zip(legs, counts):
        sub = gamma / m
        for j in range(m):
            s0 = j * sub
            n0 = math.cos(s0) * a + math.sin(s0) * u
            u0 = -math.sin(s0) * a + math.cos(s0) * u
            segments.append(
                GreatCircleSegment(t, t + sub / rate, rate, tuple(n0), tuple(u0))
            )
            t += sub / rate
    # close the last segment exactly at total_time against rounding
    last = segments[-1]
    segments[-1] = GreatCircleSegment(last.t0, total_time, last.rate, last.n0, last.u0)
    return GeometricDrive.from_arcs(ConstantSchedule(float(omega)), segments)


def _any_tangent(v: np.ndarray) -> tuple[float, float, float]:
    probe = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(v, probe)
    u /= np.linalg.norm(u)
    return tuple(u)
