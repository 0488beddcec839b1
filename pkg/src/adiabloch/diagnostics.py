"""Quantitative checks tying the sphere geometry to the dynamics.

The central identity is that the Fubini-Study speed of the projected
motion equals the instantaneous energy uncertainty, ds/dt = dE(t). Its
integrated form bounds the passage time to an orthogonal state: the path
length Delta_s = dE_bar * Delta_t can never undercut the geodesic distance
pi/2 between antipodal points, so dE_bar * Delta_t >= pi/2. (This differs
from the familiar textbook bound by a factor of pi.)

For the equatorial scenario the deviation from the moving eigenstate is a
pendulum libration whose envelope shrinks linearly with Omega/omega0; the
closed-form bounds live in :func:`libration_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    NumericalInconsistencyError,
    RotationRegimeError,
    TooFewSamplesError,
)
from .evolution import PendulumSeries, PendulumState, Trajectory, to_pendulum_coords
from .geometry import StateVector, central_angles, fs_distances
from .hamiltonian import HamiltonianMatrix

#: |<psi(t)|psi(0)>| below this counts as orthogonal for passage checks.
ORTHOGONALITY_TOL = 1e-6

#: Gap below which the eigen-direction is rejected as undefined.
_GAP_TOL = 1e-12


def energy_uncertainty(s: StateVector, h: HamiltonianMatrix) -> float:
    """Instantaneous energy uncertainty dE = sqrt(<H^2> - <H>^2).

    Zero exactly on eigenstates. A variance below -1e-14 (beyond roundoff)
    raises; tiny negative values are clamped to 0.
    """
    h10 = complex(h.h01).conjugate()
    v0 = h.h00 * s.psi0 + h.h01 * s.psi1
    v1 = h10 * s.psi0 + h.h11 * s.psi1
    mean = (s.psi0.conjugate() * v0 + s.psi1.conjugate() * v1).real
    second = abs(v0) ** 2 + abs(v1) ** 2
    var = second - mean * mean
    if var < 0.0:
        if var < -1e-14:
            raise NumericalInconsistencyError(f"variance {var:g} below -1e-14")
        var = 0.0
    return math.sqrt(var)


def _states_from_angles(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """(psi0, psi1) arrays for a trajectory; global phase is irrelevant here."""
    if traj.states is not None:
        return traj.states[:, 0], traj.states[:, 1]
    half = 0.5 * traj.theta
    return np.cos(half).astype(complex), np.exp(1j * traj.phi) * np.sin(half)


def delta_e_series(traj: Trajectory, drive) -> np.ndarray:
    """dE(t) at every sample, from <H^2> - <H>^2 with H = drive Hamiltonian."""
    t = traj.times
    om = np.asarray(drive.omega(t), dtype=float)
    th, ph = drive.axis_angles(t)
    th = np.asarray(th, dtype=float)
    ph = np.asarray(ph, dtype=float)
    e00 = 0.5 * om * np.cos(th)
    r = 0.5 * om * np.sin(th)
    h01 = r * np.exp(-1j * ph)
    p0, p1 = _states_from_angles(traj)
    v0 = e00 * p0 + h01 * p1
    v1 = np.conj(h01) * p0 - e00 * p1
    mean = (np.conj(p0) * v0 + np.conj(p1) * v1).real
    second = np.abs(v0) ** 2 + np.abs(v1) ** 2
    var = second - mean * mean
    return np.sqrt(np.clip(var, 0.0, None))


def fs_speed_series(traj: Trajectory) -> np.ndarray:
    """Finite-difference Fubini-Study speed along the sampled path.

    Interior samples use the centered two-chord estimate
    (d(i-1, i) + d(i, i+1)) / (t(i+1) - t(i-1)); the end samples fall back
    to the single adjacent chord. Needs at least 3 samples.
    """
    n = len(traj)
    if n < 3:
        raise TooFewSamplesError("need at least 3 samples for a centered speed")
    t = traj.times
    chord = fs_distances(
        traj.theta[:-1], traj.phi[:-1], traj.theta[1:], traj.phi[1:]
    )
    speed = np.empty(n)
    speed[1:-1] = (chord[:-1] + chord[1:]) / (t[2:] - t[:-2])
    speed[0] = chord[0] / (t[1] - t[0])
    speed[-1] = chord[-1] / (t[-1] - t[-2])
    return speed


def eigen_deviation_series(traj: Trajectory, drive, track: str = "upper") -> np.ndarray:
    """FS distance to the instantaneous eigenstate at every sample.

    ``track="upper"`` follows the E0 eigenstate (the drive axis point);
    ``"lower"`` follows its antipode. The drive must stay non-degenerate
    along the trajectory.
    """
    t = traj.times
    om = np.asarray(drive.omega(t), dtype=float)
    if np.min(om) <= _GAP_TOL:
        raise DegenerateSpectrumError("drive becomes degenerate along the trajectory")
    th, ph = drive.axis_angles(t)
    th = np.asarray(th, dtype=float)
    ph = np.asarray(ph, dtype=float)
    if track == "lower":
        th = math.pi - th
        ph = ph + math.pi
    elif track != "upper":
        raise ValueError("track must be 'upper' or 'lower'")
    return fs_distances(traj.theta, traj.phi, th, ph)


def pendulum_energy(p: PendulumState, omega0: float) -> float:
    """Pendulum energy E = eta_dot^2 / 2 - omega0^2 cos(eta).

    For the scenario's initial data (eta = 0, eta_dot = -2 Omega) this is
    2 Omega^2 - omega0^2, conserved along the reduced motion.
    """
    return 0.5 * p.eta_dot**2 - omega0**2 * math.cos(p.eta)


def pendulum_energy_series(series: PendulumSeries, omega0: float) -> np.ndarray:
    return 0.5 * series.eta_dot**2 - omega0**2 * np.cos(series.eta)


@dataclass(frozen=True)
class PassageCheck:
    """Result of the passage-time bound check.

    ``applicable`` is False when the trajectory never reaches a state
    orthogonal to its start (within :data:`ORTHOGONALITY_TOL` on the
    overlap); the integrals then cover the whole trajectory and no bound is
    asserted.
    """

    delta_e_bar: float
    delta_s: float
    passage_product: float
    applicable: bool
    bound_satisfied: bool | None
    t_orthogonal: float | None


def passage_check(traj: Trajectory, drive) -> PassageCheck:
    """Time-averaged uncertainty, FS path length and the pi/2 bound.

    dE_bar is the trapezoid average of dE(t) up to the first sample
    orthogonal to the start; Delta_s integrates the same series (the speed
    identity makes ds/dt = dE exact in the continuum, and using one series
    for both keeps Delta_s = dE_bar * Delta_t to roundoff). When the
    endpoints are orthogonal the product is compared against pi/2.
    """
    de = delta_e_series(traj, drive)
    overlap = np.cos(
        0.5 * central_angles(traj.theta, traj.phi, traj.theta[0], traj.phi[0])
    )
    orth = np.flatnonzero(np.abs(overlap) <= ORTHOGONALITY_TOL)
    if orth.size:
        stop = int(orth[0])
        applicable = stop >= 1
    else:
        stop = len(traj) - 1
        applicable = False
    t = traj.times[: stop + 1]
    series = de[: stop + 1]
    delta_t = float(t[-1] - t[0])
    delta_s = float(np.trapezoid(series, t))
    delta_e_bar = delta_s / delta_t if delta_t > 0 else 0.0
    product = delta_e_bar * delta_t
    bound = bool(product >= 0.5 * math.pi - 1e-6) if applicable else None
    return PassageCheck(
        delta_e_bar=delta_e_bar,
        delta_s=delta_s,
        passage_product=product,
        applicable=applicable,
        bound_satisfied=bound,
        t_orthogonal=float(t[-1]) if applicable else None,
    )


def libration_bound(omega0: float, capital_omega: float) -> tuple[float, float]:
    """Libration envelopes (eta_max, eps_max) for the equatorial scenario.

    eta_max = 2 arcsin(Omega/omega0) follows from energy conservation at
    the turning point; eps_max = 2 Omega/omega0 is the small-oscillation
    amplitude (an O((Omega/omega0)^3)-accurate envelope). Requires the
    libration regime Omega < omega0; at or past the separatrix the pendulum
    goes over the top and the adiabatic picture fails.
    """
    if not omega0 > 0:
        raise RotationRegimeError("omega0 must be positive")
    if capital_omega < 0:
        raise RotationRegimeError("capital_omega must be non-negative")
    ratio = capital_omega / omega0
    if ratio >= 1.0:
        raise RotationRegimeError(
            f"Omega/omega0 = {ratio:g} >= 1: rotation regime, no libration bound"
        )
    return 2.0 * math.asin(ratio), 2.0 * ratio


@dataclass(frozen=True)
class DiagnosticsReport:
    """Per-sample diagnostic series plus the passage scalars for one run."""

    delta_e: np.ndarray
    fs_speed: np.ndarray
    eigen_deviation: np.ndarray
    pendulum_energy: np.ndarray | None
    delta_e_bar: float
    delta_s: float
    passage_product: float
    passage_applicable: bool
    bound_satisfied: bool | None

    def max_eigen_deviation(self) -> float:
        return float(np.max(self.eigen_deviation))

    def summary(self) -> dict:
        return {
            "max_eigen_deviation": self.max_eigen_deviation(),
            "max_delta_e": float(np.max(self.delta_e)),
            "delta_e_bar": self.delta_e_bar,
            "delta_s": self.delta_s,
            "passage_product": self.passage_product if self.passage_applicable else None,
            "passage_applicable": self.passage_applicable,
            "passage_bound_satisfied": self.bound_satisfied,
        }


def compute_diagnostics(traj: Trajectory, drive, scenario=None) -> DiagnosticsReport:
    """Assemble the full diagnostic report for a trajectory.

    Passing the :class:`~adiabloch.evolution.EquatorialScenario` of the run
    switches on the pendulum-energy series; the deviation coordinates are
    then taken from the trajectory itself, so this energy is as good as the
    sampling, not the integrator.
    """
    de = delta_e_series(traj, drive)
    speed = fs_speed_series(traj)
    dev = eigen_deviation_series(traj, drive)
    pend = None
    if scenario is not None and len(traj) >= 3:
        series = to_pendulum_coords(traj, scenario.capital_omega)
        pend = pendulum_energy_series(series, scenario.omega0)
    check = passage_check(traj, drive)
    return DiagnosticsReport(
        delta_e=de,
        fs_speed=speed,
        eigen_deviation=dev,
        pendulum_energy=pend,
        delta_e_bar=check.delta_e_bar,
        delta_s=check.delta_s,
        passage_product=check.passage_product,
        passage_applicable=check.applicable,
        bound_satisfied=check.bound_satisfied,
    )
