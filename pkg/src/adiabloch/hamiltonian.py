"""Time-dependent two-level Hamiltonians and exact conversions among their
representations.

A 2x2 Hermitian matrix is stored as (h00, h11, h01) with h10 = conj(h01).
The diagonal gap Omega = h00 - h11, the coupling magnitude R = |h01| and
the coupling phase lambda (with h01 = R e^{-i lambda}, so lambda =
-arg(h01)) describe the projected motion completely; the trace only moves
the global phase. A drive can equivalently be given geometrically by the
instantaneous gap omega(t) = E0 - E1 >= 0 and the axis direction
(theta'(t), phi'(t)) of the upper eigenstate, related by

    Omega = omega cos(theta'),  R = omega sin(theta') / 2,  lambda = phi'.

Physically this is a spin in the classical magnetic field
B = (m/e) omega [sin(theta') (cos(phi'), sin(phi'), 0) + (0, 0, cos(theta'))].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, InvalidConfigError
from .geometry import BlochPoint, wrap_angle
from .schedules import (
    MODE_GEO_ANGLES,
    MODE_GEO_ARCS,
    MODE_MATRIX,
    AnglesAxis,
    ArcAxis,
    ConstantSchedule,
    EncodedDrive,
    LinearSchedule,
    Schedule,
    as_schedule,
    encode_schedules,
)

#: Gap below which the spectrum is treated as degenerate.
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianMatrix:
    """2x2 Hermitian matrix: real diagonal (h00, h11), off-diagonal h01.

    Hermiticity is structural; the (1, 0) element is always conj(h01).
    """

    h00: float
    h11: float
    h01: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array(
            [[self.h00, self.h01], [complex(self.h01).conjugate(), self.h11]],
            dtype=complex,
        )


@dataclass(frozen=True)
class DriveParams:
    """(Omega, R, lambda) relabeling of the matrix elements.

    R is non-negative and lam is reduced mod 2*pi; when R vanishes the
    phase is meaningless and canonicalized to 0.
    """

    omega_diag: float
    r: float
    lam: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("R must be non-negative")
        lam = 0.0 if self.r == 0.0 else wrap_angle(float(self.lam))
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class MagneticField:
    """Classical field components, in units of (m/e) times energy."""

    bx: float
    by: float
    bz: float

    def magnitude(self) -> float:
        return math.sqrt(self.bx**2 + self.by**2 + self.bz**2)


def relabel(h: HamiltonianMatrix) -> DriveParams:
    """(Omega, R, lambda) of a matrix: Omega = h00 - h11, h01 = R e^{-i lambda}."""
    r = abs(h.h01)
    lam = -cmath.phase(h.h01) if r > 0.0 else 0.0
    return DriveParams(h.h00 - h.h11, r, lam)


def eigenvalues(h: HamiltonianMatrix) -> tuple[float, float]:
    """Instantaneous eigenvalues (e0, e1) with e0 >= e1."""
    mean = 0.5 * (h.h00 + h.h11)
    omega = instantaneous_gap(h)
    return mean + 0.5 * omega, mean - 0.5 * omega


def instantaneous_gap(h: HamiltonianMatrix) -> float:
    """Gap omega = e0 - e1 = sqrt(Omega^2 + 4 R^2) >= 0."""
    p = relabel(h)
    return math.hypot(p.omega_diag, 2.0 * p.r)


def eigen_bloch(h: HamiltonianMatrix) -> BlochPoint:
    """Bloch point (theta', phi') of the upper (e0) eigenstate.

    Uses cos(theta') = Omega/omega, sin(theta') = 2R/omega and phi' =
    lambda, which is the stereographic identification tan(theta'/2)
    e^{i phi'} = <u1|E0>/<u0|E0>. Raises for a degenerate spectrum, where
    the eigen-direction is undefined.
    """
    p = relabel(h)
    omega = math.hypot(p.omega_diag, 2.0 * p.r)
    if omega <= DEGENERACY_TOL:
        raise DegenerateSpectrumError(f"gap {omega:g} below {DEGENERACY_TOL:g}")
    theta = math.atan2(2.0 * p.r, p.omega_diag)
    return BlochPoint(theta, p.lam)


def params_to_matrix(p: DriveParams, trace_part: float = 0.0) -> HamiltonianMatrix:
    """Matrix with the given (Omega, R, lambda) and mean diagonal ``trace_part``.

    The trace freedom is unobservable on ray space; the default 0 keeps the
    spectrum symmetric about zero.
    """
    half = 0.5 * p.omega_diag
    return HamiltonianMatrix(
        trace_part + half, trace_part - half, p.r * cmath.exp(-1j * p.lam)
    )


def gauge_shift(h: HamiltonianMatrix, f: float) -> HamiltonianMatrix:
    """Translate by the identity: both diagonal entries shifted by ``f``.

    Leaves (Omega, R, lambda), hence the projected dynamics, unchanged;
    both eigenvalues shift by f.
    """
    return HamiltonianMatrix(h.h00 + f, h.h11 + f, h.h01)


class GeometricDrive:
    """Drive described by the gap omega(t) and the rotation-axis direction.

    The axis is either a pair of angle schedules (theta', phi') or a chain
    of great-circle arcs. omega(t) must be non-negative on the window where
    the drive is used; this is checked at integration start from the exact
    schedule bounds.
    """

    def __init__(self, omega: Schedule, axis: AnglesAxis | ArcAxis):
        self.omega_schedule = as_schedule(omega)
        self.axis = axis

    @classmethod
    def static(cls, omega: float, theta: float, phi: float) -> "GeometricDrive":
        """Time-independent drive with a fixed axis."""
        return cls(
            ConstantSchedule(float(omega)),
            AnglesAxis(ConstantSchedule(float(theta)), ConstantSchedule(float(phi))),
        )

    @classmethod
    def equatorial(cls, omega0: float, capital_omega: float) -> "GeometricDrive":
        """Axis rotating uniformly along the equator: theta' = pi/2, phi' = Omega t."""
        return cls(
            ConstantSchedule(float(omega0)),
            AnglesAxis(
                ConstantSchedule(0.5 * math.pi),
                LinearSchedule(0.0, float(capital_omega)),
            ),
        )

    @classmethod
    def from_schedules(cls, omega, theta_prime, phi_prime) -> "GeometricDrive":
        return cls(
            as_schedule(omega),
            AnglesAxis(as_schedule(theta_prime), as_schedule(phi_prime)),
        )

    @classmethod
    def from_arcs(cls, omega, segments) -> "GeometricDrive":
        return cls(as_schedule(omega), ArcAxis(segments))

    # The spec-level "time functions" of the drive.

    def omega(self, t):
        return self.omega_schedule(t)

    def axis_angles(self, t):
        return self.axis.angles(t)

    def theta_prime(self, t):
        return self.axis.angles(t)[0]

    def phi_prime(self, t):
        return self.axis.angles(t)[1]

    def params(self, t: float) -> DriveParams:
        return geometric_to_params(self, t)

    def hamiltonian(self, t: float) -> HamiltonianMatrix:
        return params_to_matrix(self.params(t), 0.0)

    def omega_max(self, t0: float, t1: float) -> float:
        return self.omega_schedule.bounds(t0, t1)[1]

    def kink_times(self, t0: float, t1: float) -> np.ndarray:
        ks = [self.omega_schedule.kink_times(t0, t1), self.axis.kink_times(t0, t1)]
        return np.unique(np.concatenate(ks)) if ks else np.empty(0)

    def validate(self, t0: float, t1: float) -> None:
        lo, _ = self.omega_schedule.bounds(t0, t1)
        if lo < -1e-12:
            raise InvalidConfigError("omega(t) must be non-negative on the run window")
        self.axis.validate(t0, t1)

    def encode(self) -> EncodedDrive:
        if isinstance(self.axis, AnglesAxis):
            return encode_schedules(
                MODE_GEO_ANGLES, [self.omega_schedule, self.axis.theta, self.axis.phi]
            )
        return encode_schedules(
            MODE_GEO_ARCS, [self.omega_schedule], segments=self.axis.segments
        )


class MatrixDrive:
    """Drive given by schedules for the Hermitian matrix entries.

    Unlike :class:`GeometricDrive` this keeps the trace, so full-state
    integration picks up the corresponding global phase; the projected
    dynamics is unaffected (gauge invariance).
    """

    def __init__(self, h00, h11, h01_re, h01_im):
        self.h00 = as_schedule(h00)
        self.h11 = as_schedule(h11)
        self.h01_re = as_schedule(h01_re)
        self.h01_im = as_schedule(h01_im)

    def hamiltonian(self, t: float) -> HamiltonianMatrix:
        return HamiltonianMatrix(
            self.h00(t), self.h11(t), complex(self.h01_re(t), self.h01_im(t))
        )

    def params(self, t: float) -> DriveParams:
        return relabel(self.hamiltonian(t))

    def omega(self, t):
        t_arr = np.asarray(t, dtype=float)
        om = np.asarray(self.h00(t_arr)) - np.asarray(self.h11(t_arr))
        r2 = np.asarray(self.h01_re(t_arr)) ** 2 + np.asarray(self.h01_im(t_arr)) ** 2
        out = np.sqrt(om**2 + 4.0 * r2)
        return float(out) if out.ndim == 0 else out

    def axis_angles(self, t):
        t_arr = np.asarray(t, dtype=float)
        om = np.asarray(self.h00(t_arr)) - np.asarray(self.h11(t_arr))
        re = np.asarray(self.h01_re(t_arr))
        im = np.asarray(self.h01_im(t_arr))
        r = np.hypot(re, im)
        theta = np.arctan2(2.0 * r, om)
        phi = np.mod(-np.arctan2(im, re), 2.0 * math.pi)
        if np.ndim(t) == 0:
            return float(theta), float(phi)
        return theta, phi

    def theta_prime(self, t):
        return self.axis_angles(t)[0]

    def phi_prime(self, t):
        return self.axis_angles(t)[1]

    def omega_max(self, t0: float, t1: float) -> float:
        # Conservative bound from per-schedule extrema; only used for step
        # sizing and validation, never for dynamics.
        lo0, hi0 = self.h00.bounds(t0, t1)
        lo1, hi1 = self.h11.bounds(t0, t1)
        om = max(abs(hi0 - lo1), abs(hi1 - lo0))
        lre, hre = self.h01_re.bounds(t0, t1)
        lim, him = self.h01_im.bounds(t0, t1)
        r2 = max(lre**2, hre**2) + max(lim**2, him**2)
        return math.sqrt(om**2 + 4.0 * r2)

    def kink_times(self, t0: float, t1: float) -> np.ndarray:
        ks = [
            s.kink_times(t0, t1)
            for s in (self.h00, self.h11, self.h01_re, self.h01_im)
        ]
        return np.unique(np.concatenate(ks))

    def validate(self, t0: float, t1: float) -> None:
        pass

    def encode(self) -> EncodedDrive:
        return encode_schedules(
            MODE_MATRIX, [self.h00, self.h11, self.h01_re, self.h01_im]
        )


#: Any drive accepted by the integrators.
Drive = GeometricDrive | MatrixDrive


def geometric_to_params(g, t: float) -> DriveParams:
    """Evaluate the geometric identifications at time ``t``.

    lambda = phi'(t), R = omega(t) sin(theta')/2, Omega = omega(t) cos(theta').
    """
    if isinstance(g, MatrixDrive):
        return g.params(t)
    omega = g.omega(t)
    theta, phi = g.axis_angles(t)
    r = 0.5 * omega * math.sin(theta)
    if r < 0.0:  # sin can round to -0-ish at exact poles
        r = 0.0
    return DriveParams(omega * math.cos(theta), r, phi)


def drive_to_field(g, t: float, m_over_e: float) -> MagneticField:
    """Classical magnetic field realizing the drive at time ``t``.

    |B| = (m/e) * omega(t); direction is the instantaneous rotation axis.
    """
    omega = g.omega(t)
    theta, phi = g.axis_angles(t)
    scale = m_over_e * omega
    s = math.sin(theta)
    return MagneticField(
        scale * s * math.cos(phi), scale * s * math.sin(phi), scale * math.cos(theta)
    )
