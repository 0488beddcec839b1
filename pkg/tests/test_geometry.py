"""Coordinate charts, metric and orthogonality structure of the ray sphere."""

import cmath
import math

import numpy as np
import pytest

from adiabloch import (
    BlochPoint,
    DegenerateInputError,
    ProjectiveCoord,
    StateVector,
    antipode,
    bloch_to_state,
    fs_distance,
    inner_product,
    inverse_stereographic,
    state_to_bloch,
    stereographic,
)
from adiabloch.verification import random_point


def wrapped_diff(a, b):
    d = math.fmod(a - b, 2 * math.pi)
    if d > math.pi:
        d -= 2 * math.pi
    if d < -math.pi:
        d += 2 * math.pi
    return abs(d)


class TestBlochToState:
    def test_north_pole(self):
        s = bloch_to_state(BlochPoint(0.0, 0.0))
        assert s.psi0 == pytest.approx(1.0) and s.psi1 == pytest.approx(0.0)

    def test_south_pole(self):
        s = bloch_to_state(BlochPoint(math.pi, 0.0))
        assert abs(s.psi0) < 1e-15 and s.psi1 == pytest.approx(1.0)

    def test_equator_at_quarter_turn(self):
        s = bloch_to_state(BlochPoint(math.pi / 2, math.pi / 2))
        assert s.psi0 == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert s.psi1 == pytest.approx(1j / math.sqrt(2), abs=1e-15)

    def test_gauge_psi0_real_nonnegative(self, rng):
        for _ in range(100):
            s = bloch_to_state(random_point(rng))
            assert s.psi0.imag == 0.0 and s.psi0.real >= 0.0


class TestStateToBloch:
    def test_basis_state(self):
        p = state_to_bloch(StateVector(1, 0))
        assert p.theta == 0.0 and p.phi == 0.0

    def test_global_phase_removed(self):
        z = cmath.exp(0.7j)
        p = state_to_bloch(StateVector(z / math.sqrt(2), z * 1j / math.sqrt(2)))
        assert p.theta == pytest.approx(math.pi / 2, abs=1e-12)
        assert p.phi == pytest.approx(math.pi / 2, abs=1e-12)

    def test_amplitude_ratio_sets_theta(self):
        # tan(theta/2) = |psi1/psi0| = 2
        p = state_to_bloch(StateVector(1 / math.sqrt(5), 2 / math.sqrt(5)))
        assert p.theta == pytest.approx(2 * math.atan(2), abs=1e-12)
        assert p.phi == 0.0

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateInputError):
            StateVector(1e-13, 1e-13)


class TestStereographic:
    def test_north_pole_origin(self):
        assert stereographic(BlochPoint(0.0, 1.3)).value == 0.0

    def test_equator_quarter_turn_is_i(self):
        xi = stereographic(BlochPoint(math.pi / 2, math.pi / 2))
        assert xi.value == pytest.approx(1j, abs=1e-12)

    def test_south_pole_infinity(self):
        assert stereographic(BlochPoint(math.pi, 0.0)).is_infinity

    @pytest.mark.parametrize(
        "xi, expected",
        [
            (0.0, (0.0, 0.0)),
            (1.0, (math.pi / 2, 0.0)),
            (None, (math.pi, 0.0)),
        ],
    )
    def test_inverse_values(self, xi, expected):
        coord = ProjectiveCoord.infinity() if xi is None else ProjectiveCoord(xi)
        p = inverse_stereographic(coord)
        assert (p.theta, p.phi) == pytest.approx(expected, abs=1e-12)

    def test_round_trip(self, rng):
        for _ in range(1000):
            p = random_point(rng)
            q = inverse_stereographic(stereographic(p))
            assert abs(q.theta - p.theta) < 1e-12
            assert wrapped_diff(q.phi, p.phi) < 1e-12


class TestAntipode:
    def test_poles(self):
        q = antipode(BlochPoint(0.0, 0.0))
        assert (q.theta, q.phi) == (math.pi, 0.0)

    def test_equator(self):
        q = antipode(BlochPoint(math.pi / 2, 0.0))
        assert (q.theta, q.phi) == pytest.approx((math.pi / 2, math.pi))

    def test_generic_point(self):
        q = antipode(BlochPoint(math.pi / 3, math.pi / 4))
        assert (q.theta, q.phi) == pytest.approx((2 * math.pi / 3, 5 * math.pi / 4))
        ov = inner_product(
            bloch_to_state(BlochPoint(math.pi / 3, math.pi / 4)), bloch_to_state(q)
        )
        assert abs(ov) < 1e-15


class TestFsDistance:
    def test_coincident(self):
        p = BlochPoint(1.0, 2.0)
        assert fs_distance(p, p) == 0.0

    def test_poles_are_pi_over_2(self):
        # orthogonal states sit at the maximum distance, half a great circle
        assert fs_distance(BlochPoint(0, 0), BlochPoint(math.pi, 0)) == pytest.approx(
            math.pi / 2
        )

    def test_pole_to_equator(self):
        d = fs_distance(BlochPoint(0, 0), BlochPoint(math.pi / 2, 0))
        assert d == pytest.approx(math.pi / 4, abs=1e-14)

    def test_symmetry_and_triangle(self, rng):
        for _ in range(300):
            a, b, c = (random_point(rng) for _ in range(3))
            assert fs_distance(a, b) == pytest.approx(fs_distance(b, a), abs=1e-15)
            assert fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-12

    def test_antipode_isometry(self, rng):
        for _ in range(1000):
            a, b = random_point(rng), random_point(rng)
            d1 = fs_distance(a, b)
            d2 = fs_distance(antipode(a), antipode(b))
            assert abs(d1 - d2) < 1e-12

    def test_maximum_only_at_antipodes(self, rng):
        for _ in range(200):
            a = random_point(rng)
            assert fs_distance(a, antipode(a)) == pytest.approx(math.pi / 2, abs=1e-12)


class TestInnerProduct:
    def test_normalized(self):
        s = StateVector(1, 0)
        assert inner_product(s, s) == pytest.approx(1.0)

    def test_orthogonal_basis(self):
        assert inner_product(StateVector(1, 0), StateVector(0, 1)) == 0.0

    def test_generic_value(self):
        a = StateVector(1 / math.sqrt(2), 1 / math.sqrt(2))
        b = StateVector(1 / math.sqrt(2), 1j / math.sqrt(2))
        assert inner_product(a, b) == pytest.approx((1 + 1j) / 2, abs=1e-15)

    def test_conjugate_symmetry(self, rng):
        for _ in range(200):
            a = bloch_to_state(random_point(rng))
            b = bloch_to_state(random_point(rng))
            assert inner_product(a, b) == pytest.approx(
                inner_product(b, a).conjugate(), abs=1e-15
            )


def test_round_trip_property(rng):
    for _ in range(10_000):
        p = random_point(rng)
        q = state_to_bloch(bloch_to_state(p))
        assert abs(q.theta - p.theta) < 1e-10
        assert wrapped_diff(q.phi, p.phi) < 1e-10


def test_antipodal_orthogonality_property(rng):
    for _ in range(10_000):
        p = random_point(rng)
        ov = inner_product(bloch_to_state(p), bloch_to_state(antipode(p)))
        assert abs(ov) < 1e-12


def test_metric_matches_projected_chord(rng):
    """fs_distance against ds^2 = <dpsi|dpsi> - |<psi|dpsi>|^2 for small steps."""
    for _ in range(500):
        theta = rng.uniform(0.1, math.pi - 0.1)
        phi = rng.uniform(0, 2 * math.pi)
        delta = rng.uniform(1e-5, 1e-4)
        chi = rng.uniform(0, 2 * math.pi)
        a = BlochPoint(theta, phi)
        b = BlochPoint(theta + delta * math.cos(chi), phi + delta * math.sin(chi) / math.sin(theta))
        sa, sb = bloch_to_state(a), bloch_to_state(b)
        dpsi = np.array([sb.psi0 - sa.psi0, sb.psi1 - sa.psi1])
        psi = np.array([sa.psi0, sa.psi1])
        ds2 = np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2
        ds = math.sqrt(max(ds2, 0.0))
        d = fs_distance(a, b)
        assert d == pytest.approx(ds, rel=1e-4)


def test_pole_canonicalization():
    p = BlochPoint(1e-12, 2.7)
    assert p.theta == 0.0 and p.phi == 0.0
    q = BlochPoint(math.pi - 1e-12, 1.0)
    assert q.theta == math.pi and q.phi == 0.0


def test_theta_out_of_range_rejected():
    with pytest.raises(ValueError):
        BlochPoint(-0.5, 0.0)
    with pytest.raises(ValueError):
        BlochPoint(math.pi + 0.5, 0.0)
