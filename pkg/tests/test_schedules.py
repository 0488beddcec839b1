"""Schedules, arc paths and the piecewise-geodesic drive constructor."""

import math

import numpy as np
import pytest

from adiabloch import (
    AntipodalWaypointsError,
    BlochPoint,
    ConstantSchedule,
    GreatCircleSegment,
    InvalidConfigError,
    LinearSchedule,
    TableSchedule,
    piecewise_geodesic_drive,
)
from adiabloch.schedules import ArcAxis


class TestSchedules:
    def test_constant(self):
        s = ConstantSchedule(2.5)
        assert s(7.0) == 2.5
        assert np.all(s(np.array([0.0, 1.0])) == 2.5)
        assert s.bounds(0, 10) == (2.5, 2.5)

    def test_linear(self):
        s = LinearSchedule(1.0, -0.5)
        assert s(2.0) == 0.0
        assert s.bounds(0, 4) == (-1.0, 1.0)

    def test_table_interpolation_and_clamp(self):
        s = TableSchedule([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
        assert s(0.5) == 1.0
        assert s(-1.0) == 0.0  # clamped
        assert s(5.0) == 0.0
        assert list(s.kink_times(0.0, 2.0)) == [1.0]
        assert s.bounds(0.25, 0.75) == (0.5, 1.5)
        assert s.bounds(0.0, 2.0) == (0.0, 2.0)

    def test_table_validation(self):
        with pytest.raises(InvalidConfigError):
            TableSchedule([0.0, 0.0, 1.0], [1, 2, 3])
        with pytest.raises(InvalidConfigError):
            TableSchedule([0.0], [1.0])
        with pytest.raises(InvalidConfigError):
            TableSchedule([0.0, 1.0], [np.nan, 1.0])


class TestArcAxis:
    def test_single_segment_quarter_meridian(self):
        seg = GreatCircleSegment(0.0, 1.0, math.pi / 2, (0, 0, 1), (1, 0, 0))
        axis = ArcAxis([seg])
        th0, ph0 = axis.angles(0.0)
        th1, ph1 = axis.angles(1.0)
        assert (th0, ph0) == pytest.approx((0.0, 0.0), abs=1e-12)
        assert (th1, ph1) == pytest.approx((math.pi / 2, 0.0), abs=1e-12)

    def test_frame_validation(self):
        bad = GreatCircleSegment(0.0, 1.0, 1.0, (0, 0, 2), (1, 0, 0))
        with pytest.raises(InvalidConfigError):
            ArcAxis([bad]).validate(0.0, 1.0)


class TestPiecewiseGeodesicDrive:
    def test_meridian_arc(self):
        # axis moves from the north pole down the phi=0 meridian
        d = piecewise_geodesic_drive([(0.0, 0.0), (math.pi / 2, 0.0)], 1.0, 4.0)
        for t in (0.0, 1.0, 2.0, 3.999):
            th, ph = d.axis_angles(t)
            assert th == pytest.approx((math.pi / 2) * (t / 4.0), abs=1e-12)
            assert ph == pytest.approx(0.0, abs=1e-12)

    def test_equator_half_revolution_via_midpoint(self):
        # antipodal endpoints are disambiguated by an intermediate waypoint;
        # the result is the equatorial scenario with Omega = pi / total_time
        t_total = 8.0
        d = piecewise_geodesic_drive(
            [(math.pi / 2, 0.0), (math.pi / 2, math.pi / 2), (math.pi / 2, math.pi)],
            1.0,
            t_total,
        )
        for t in np.linspace(0.0, t_total - 1e-9, 17):
            th, ph = d.axis_angles(t)
            assert th == pytest.approx(math.pi / 2, abs=1e-12)
            assert ph == pytest.approx(math.pi * t / t_total, abs=1e-10)

    def test_antipodal_waypoints_rejected(self):
        with pytest.raises(AntipodalWaypointsError):
            piecewise_geodesic_drive(
                [(math.pi / 2, 0.0), (math.pi / 2, math.pi)], 1.0, 1.0
            )

    def test_too_few_waypoints(self):
        with pytest.raises(InvalidConfigError):
            piecewise_geodesic_drive([(0.0, 0.0)], 1.0, 1.0)

    def test_subdivision_is_a_refinement(self):
        waypoints = [(0.2, 0.0), (1.2, 1.0), (2.2, 2.5)]
        a = piecewise_geodesic_drive(waypoints, 1.0, 5.0)
        b = piecewise_geodesic_drive(waypoints, 1.0, 5.0, n_segments=24)
        ts = np.linspace(0.0, 5.0 - 1e-9, 50)
        tha, pha = a.axis_angles(ts)
        thb, phb = b.axis_angles(ts)
        assert np.allclose(tha, thb, atol=1e-10)
        assert np.allclose(np.unwrap(pha), np.unwrap(phb), atol=1e-10)

    def test_axis_path_is_continuous(self):
        d = piecewise_geodesic_drive([(0.3, 0.1), (1.5, 2.0), (2.6, 4.0)], 1.0, 3.0)
        edges = d.kink_times(0.0, 3.0)
        for e in edges:
            va = d.axis_angles(e - 1e-9)
            vb = d.axis_angles(e + 1e-9)
            assert va[0] == pytest.approx(vb[0], abs=1e-7)

    def test_time_allocated_by_arc_length(self):
        # two legs with arc angles pi/2 and pi/4: time split 2:1
        d = piecewise_geodesic_drive(
            [(0.0, 0.0), (math.pi / 2, 0.0), (3 * math.pi / 4, 0.0)], 1.0, 3.0
        )
        th, _ = d.axis_angles(2.0)  # end of the first leg
        assert th == pytest.approx(math.pi / 2, abs=1e-10)
