"""Coordinate charts and the Fubini-Study metric on the qubit ray space.

The physical state space of a qubit is the set of rays in C^2, which is a
2-sphere. With the metric inherited from the Hilbert-space inner product
(ds^2 = <dpsi|dpsi> - |<psi|dpsi>|^2) the sphere has radius 1/2, so the
distance between orthogonal states (antipodal points) is pi/2. Some texts
use a unit-radius Bloch sphere instead; all distances here are half of
those.

Everything in this module is an immutable value or a pure function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError

#: Absolute tolerance for angle comparisons and pole canonicalization.
ANGLE_TOL = 1e-10

TWO_PI = 2.0 * math.pi


def wrap_angle(phi: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    out = math.fmod(phi, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    # fmod of a tiny negative can round up to exactly 2*pi after the add
    return 0.0 if out >= TWO_PI else out


@dataclass(frozen=True)
class BlochPoint:
    """A ray on the qubit sphere in spherical coordinates.

    ``theta`` is the colatitude in [0, pi]; ``phi`` the azimuth, stored in
    [0, 2*pi). At either pole the azimuth is undefined and canonicalized
    to 0.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        th = float(self.theta)
        if not -ANGLE_TOL <= th <= math.pi + ANGLE_TOL:
            raise ValueError(f"theta out of range [0, pi]: {th!r}")
        th = min(max(th, 0.0), math.pi)
        ph = wrap_angle(float(self.phi))
        if th <= ANGLE_TOL:
            th, ph = 0.0, 0.0
        elif th >= math.pi - ANGLE_TOL:
            th, ph = math.pi, 0.0
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    def vector(self) -> np.ndarray:
        """Unit 3-vector of the point on the embedding sphere."""
        s = math.sin(self.theta)
        return np.array(
            [s * math.cos(self.phi), s * math.sin(self.phi), math.cos(self.theta)]
        )


@dataclass(frozen=True)
class StateVector:
    """Normalized two-amplitude state (psi0, psi1).

    Construction renormalizes, so the invariant |psi0|^2 + |psi1|^2 = 1
    holds afterwards; a vector of norm below 1e-12 has no direction and is
    rejected with :class:`DegenerateInputError`.
    """

    psi0: complex
    psi1: complex

    def __post_init__(self):
        p0 = complex(self.psi0)
        p1 = complex(self.psi1)
        n = math.hypot(abs(p0), abs(p1))
        if n < 1e-12:
            raise DegenerateInputError("state vector norm below 1e-12")
        object.__setattr__(self, "psi0", p0 / n)
        object.__setattr__(self, "psi1", p1 / n)

    def norm(self) -> float:
        return math.hypot(abs(self.psi0), abs(self.psi1))

    def as_array(self) -> np.ndarray:
        return np.array([self.psi0, self.psi1], dtype=complex)


@dataclass(frozen=True)
class ProjectiveCoord:
    """Stereographic coordinate xi = psi1/psi0, or the point at infinity.

    The infinity marker corresponds to the south pole (theta = pi), where
    psi0 vanishes.
    """

    value: complex | None

    @classmethod
    def infinity(cls) -> "ProjectiveCoord":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.value is None


def bloch_to_state(p: BlochPoint) -> StateVector:
    """Standard-form state at ``p``: (cos(theta/2), e^{i phi} sin(theta/2)).

    The global phase is fixed so that psi0 is real and non-negative, which
    makes round trips with :func:`state_to_bloch` deterministic.
    """
    half = 0.5 * p.theta
    return StateVector(math.cos(half), cmath.exp(1j * p.phi) * math.sin(half))


def state_to_bloch(s: StateVector) -> BlochPoint:
    """Ray coordinates of ``s``, inverse of :func:`bloch_to_state` up to phase."""
    a0 = abs(s.psi0)
    a1 = abs(s.psi1)
    theta = 2.0 * math.atan2(a1, a0)
    if a0 <= 1e-15 or a1 <= 1e-15:
        return BlochPoint(theta, 0.0)
    return BlochPoint(theta, cmath.phase(s.psi1 * s.psi0.conjugate()))


def stereographic(p: BlochPoint) -> ProjectiveCoord:
    """xi = tan(theta/2) e^{i phi}; the south pole maps to infinity."""
    if p.theta == math.pi:
        return ProjectiveCoord.infinity()
    return ProjectiveCoord(math.tan(0.5 * p.theta) * cmath.exp(1j * p.phi))


def inverse_stereographic(xi: ProjectiveCoord) -> BlochPoint:
    """Point with stereographic coordinate ``xi`` (infinity -> south pole)."""
    if xi.is_infinity:
        return BlochPoint(math.pi, 0.0)
    v = complex(xi.value)
    return BlochPoint(2.0 * math.atan(abs(v)), cmath.phase(v))


def antipode(p: BlochPoint) -> BlochPoint:
    """Antipodal ray (pi - theta, phi + pi); orthogonal to ``p``."""
    return BlochPoint(math.pi - p.theta, p.phi + math.pi)


def fs_distance(a: BlochPoint, b: BlochPoint) -> float:
    """Fubini-Study distance, half the central angle between ``a`` and ``b``.

    Computed from the embedding 3-vectors with atan2, which is stable both
    for nearly coincident and for nearly antipodal pairs. Range [0, pi/2];
    the maximum is attained exactly at antipodal (orthogonal) pairs.
    """
    va = a.vector()
    vb = b.vector()
    cross = np.cross(va, vb)
    angle = math.atan2(float(np.linalg.norm(cross)), float(va @ vb))
    return 0.5 * angle


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Hermitian inner product <a|b>."""
    return a.psi0.conjugate() * b.psi0 + a.psi1.conjugate() * b.psi1


# Array helpers used by the diagnostics and trajectory layers. These mirror
# the scalar operations above for whole sampled series.


def angles_to_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Unit 3-vectors, shape (..., 3), for arrays of spherical angles."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    s = np.sin(theta)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.cos(theta)], axis=-1)


def central_angles(
    theta_a: np.ndarray, phi_a: np.ndarray, theta_b: np.ndarray, phi_b: np.ndarray
) -> np.ndarray:
    """Great-circle angle between two angle series, elementwise."""
    va = angles_to_vectors(theta_a, phi_a)
    vb = angles_to_vectors(theta_b, phi_b)
    cross = np.cross(va, vb)
    sin_part = np.linalg.norm(cross, axis=-1)
    cos_part = np.sum(va * vb, axis=-1)
    return np.arctan2(sin_part, cos_part)


def fs_distances(
    theta_a: np.ndarray, phi_a: np.ndarray, theta_b: np.ndarray, phi_b: np.ndarray
) -> np.ndarray:
    """Elementwise Fubini-Study distance between two angle series."""
    return 0.5 * central_angles(theta_a, phi_a, theta_b, phi_b)
