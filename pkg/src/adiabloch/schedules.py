"""Time schedules and axis paths that describe drives.

Scalar functions of time come in three closed forms: constants, linear
ramps, and sampled tables with linear interpolation (clamped outside the
node range). The rotation axis of a geometric drive is either a pair of
angle schedules or a chain of great-circle arc segments, which keeps the
pair (theta', phi') jointly consistent when the axis moves along
geodesics.

Every schedule can report its kink times (where the integrator should
break a step), exact value bounds over a window, and a flat array encoding
consumed by the stepping kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError

# Schedule kinds, shared with the kernels.
SCHED_CONST = 0
SCHED_LINEAR = 1
SCHED_TABLE = 2

# Drive encodings, shared with the kernels.
MODE_GEO_ANGLES = 0
MODE_GEO_ARCS = 1
MODE_MATRIX = 2


class Schedule:
    """A scalar function of time with exact bounds and kink reporting."""

    def __call__(self, t):
        raise NotImplementedError

    def kink_times(self, t0: float, t1: float) -> np.ndarray:
        return np.empty(0)

    def bounds(self, t0: float, t1: float) -> tuple[float, float]:
        raise NotImplementedError

    def encode(self) -> tuple[int, float, float, np.ndarray, np.ndarray]:
        """(kind, p0, p1, table_times, table_values)."""
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantSchedule(Schedule):
    value: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, float(self.value))
        return float(out) if out.ndim == 0 else out

    def bounds(self, t0, t1):
        return float(self.value), float(self.value)

    def encode(self):
        return SCHED_CONST, float(self.value), 0.0, np.empty(0), np.empty(0)


@dataclass(frozen=True)
class LinearSchedule(Schedule):
    """value(t) = intercept + slope * t."""

    intercept: float
    slope: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.intercept + self.slope * t
        return float(out) if out.ndim == 0 else out

    def bounds(self, t0, t1):
        a = self.intercept + self.slope * t0
        b = self.intercept + self.slope * t1
        return min(a, b), max(a, b)

    def encode(self):
        return SCHED_LINEAR, float(self.intercept), float(self.slope), np.empty(0), np.empty(0)


class TableSchedule(Schedule):
    """Sampled values with linear interpolation, clamped outside the range."""

    def __init__(self, times, values):
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise InvalidConfigError("table schedule needs matching 1-d arrays, >= 2 nodes")
        if not np.all(np.diff(times) > 0):
            raise InvalidConfigError("table schedule times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise InvalidConfigError("table schedule entries must be finite")
        self.times = times
        self.values = values

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.interp(t, self.times, self.values)
        return float(out) if out.ndim == 0 else out

    def kink_times(self, t0, t1):
        ts = self.times
        return ts[(ts > t0) & (ts < t1)]

    def bounds(self, t0, t1):
        candidates = [float(np.interp(t0, self.times, self.values)),
                      float(np.interp(t1, self.times, self.values))]
        inside = self.values[(self.times > t0) & (self.times < t1)]
        if inside.size:
            candidates.append(float(inside.min()))
            candidates.append(float(inside.max()))
        return min(candidates), max(candidates)

    def encode(self):
        return SCHED_TABLE, 0.0, 0.0, self.times, self.values

    def __repr__(self):
        return f"TableSchedule({self.times.size} nodes, t in [{self.times[0]:g}, {self.times[-1]:g}])"


def as_schedule(x) -> Schedule:
    """Coerce a number to a constant schedule; pass schedules through."""
    if isinstance(x, Schedule):
        return x
    return ConstantSchedule(float(x))


@dataclass(frozen=True)
class AnglesAxis:
    """Axis direction given by separate schedules for theta' and phi'."""

    theta: Schedule
    phi: Schedule

    def angles(self, t):
        return self.theta(t), self.phi(t)

    def kink_times(self, t0, t1):
        return np.concatenate([self.theta.kink_times(t0, t1), self.phi.kink_times(t0, t1)])

    def validate(self, t0, t1):
        lo, hi = self.theta.bounds(t0, t1)
        if lo < -1e-12 or hi > math.pi + 1e-12:
            raise InvalidConfigError("theta' schedule leaves [0, pi] on the run window")


@dataclass(frozen=True)
class GreatCircleSegment:
    """Axis motion along one great-circle arc at constant angular rate.

    The axis position is cos(s) n0 + sin(s) u0 with s = rate * (t - t0),
    where n0 is the start direction and u0 a unit tangent orthogonal to it.
    Segments of a path need not join continuously; the integrators break
    steps at segment boundaries.
    """

    t0: float
    t1: float
    rate: float
    n0: tuple[float, float, float]
    u0: tuple[float, float, float]

    def point(self, t):
        s = self.rate * (np.asarray(t, dtype=float) - self.t0)
        c, sn = np.cos(s), np.sin(s)
        n0 = np.asarray(self.n0)
        u0 = np.asarray(self.u0)
        return np.multiply.outer(c, n0) + np.multiply.outer(sn, u0)

    def as_row(self) -> np.ndarray:
        return np.array([self.t0, self.t1, self.rate, *self.n0, *self.u0])


class ArcAxis:
    """Axis path made of great-circle segments covering [t0, t_end]."""

    def __init__(self, segments):
        segments = list(segments)
        if not segments:
            raise InvalidConfigError("arc axis needs at least one segment")
        for a, b in zip(segments, segments[1:]):
            if b.t0 < a.t1 - 1e-12:
                raise InvalidConfigError("arc segments must be time-ordered")
        self.segments = tuple(segments)
        self._starts = np.array([s.t0 for s in segments])

    def _segment_index(self, t):
        idx = np.searchsorted(self._starts, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def vectors(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self._segment_index(t)
        out = np.empty((t.size, 3))
        for i in np.unique(idx):
            sel = idx == i
            out[sel] = self.segments[i].point(t[sel])
        return out

    def angles(self, t):
        scalar = np.isscalar(t) or np.ndim(t) == 0
        v = self.vectors(t)
        theta = np.arctan2(np.hypot(v[:, 0], v[:, 1]), v[:, 2])
        phi = np.mod(np.arctan2(v[:, 1], v[:, 0]), 2.0 * math.pi)
        if scalar:
            return float(theta[0]), float(phi[0])
        return theta, phi

    def kink_times(self, t0, t1):
        edges = np.array([s.t0 for s in self.segments] + [self.segments[-1].t1])
        return edges[(edges > t0) & (edges < t1)]

    def validate(self, t0, t1):
        for seg in self.segments:
            n0 = np.asarray(seg.n0)
            u0 = np.asarray(seg.u0)
            if abs(np.linalg.norm(n0) - 1.0) > 1e-9 or abs(np.linalg.norm(u0) - 1.0) > 1e-9:
                raise InvalidConfigError("arc segment frame vectors must be unit length")
            if abs(float(n0 @ u0)) > 1e-9:
                raise InvalidConfigError("arc segment tangent must be orthogonal to start")


@dataclass
class EncodedDrive:
    """Flat-array drive description consumed by the stepping kernels.

    ``kinds``/``params`` hold up to four scalar schedules (slot meaning
    depends on ``mode``); tables are concatenated with ``offs`` giving the
    slot ranges; ``segs`` holds great-circle rows for the arcs mode.
    """

    mode: int
    kinds: np.ndarray
    params: np.ndarray
    tab_t: np.ndarray
    tab_v: np.ndarray
    offs: np.ndarray
    segs: np.ndarray


def encode_schedules(mode: int, slots: list[Schedule], segments=None) -> EncodedDrive:
    kinds = np.zeros(4, dtype=np.int64)
    params = np.zeros(8, dtype=float)
    offs = np.zeros(5, dtype=np.int64)
    chunks_t: list[np.ndarray] = []
    chunks_v: list[np.ndarray] = []
    pos = 0
    for i in range(4):
        sched = slots[i] if i < len(slots) else None
        if sched is None:
            offs[i + 1] = pos
            continue
        kind, p0, p1, ts, vs = sched.encode()
        kinds[i] = kind
        params[2 * i] = p0
        params[2 * i + 1] = p1
        chunks_t.append(np.asarray(ts, dtype=float))
        chunks_v.append(np.asarray(vs, dtype=float))
        pos += len(ts)
        offs[i + 1] = pos
    tab_t = np.concatenate(chunks_t) if chunks_t else np.empty(0)
    tab_v = np.concatenate(chunks_v) if chunks_v else np.empty(0)
    if segments is not None:
        segs = np.vstack([s.as_row() for s in segments]) if segments else np.empty((0, 9))
    else:
        segs = np.empty((0, 9))
    return EncodedDrive(mode, kinds, params,
                        np.ascontiguousarray(tab_t), np.ascontiguousarray(tab_v),
                        offs, np.ascontiguousarray(segs))
