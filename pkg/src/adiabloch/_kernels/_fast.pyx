# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stepping kernels.

Line-for-line mirror of ``_ref.py`` (which documents the drive encoding
and the algorithms); keep the two in sync.
"""

from libc.math cimport M_PI, atan, atan2, ceil, cos, fabs, fmod, hypot, sin, sqrt, tan

SCHED_CONST = 0
SCHED_LINEAR = 1
SCHED_TABLE = 2

MODE_GEO_ANGLES = 0
MODE_GEO_ARCS = 1
MODE_MATRIX = 2

SCHEME_RK4 = 0
SCHEME_RK45 = 1

STATUS_OK = 0
STATUS_NORM_DRIFT = 1
STATUS_REJECTED = 2

cdef double _TWO_PI = 2.0 * M_PI
cdef long _MAX_REJECTS = 60

cdef long _SK_CONST = 0
cdef long _SK_LINEAR = 1
cdef long _M_GEO_ANGLES = 0
cdef long _M_GEO_ARCS = 1
cdef long _M_MATRIX = 2
cdef long _SCH_RK4 = 0
cdef long _C_ANGLE = 0
cdef long _C_XI = 1
cdef long _C_ZETA = 2

# Dormand-Prince 5(4) tableau.
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0, _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0, _A42 = -56.0 / 15.0, _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0, _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0, _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0, _A62 = -355.0 / 33.0, _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0, _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0, _B3 = 500.0 / 1113.0, _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0, _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0, _E3 = -71.0 / 16695.0, _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0, _E6 = 22.0 / 525.0, _E7 = -1.0 / 40.0
cdef double _C2 = 1.0 / 5.0, _C3 = 3.0 / 10.0, _C4 = 4.0 / 5.0, _C5 = 8.0 / 9.0


cdef inline double _wrap_pi(double x) nogil:
    cdef double y = fmod(x + M_PI, _TWO_PI)
    if y <= 0.0:
        y += _TWO_PI
    return y - M_PI


cdef inline double _sched_value(long kind, double p0, double p1,
                                const double[::1] tab_t, const double[::1] tab_v,
                                long lo, long hi, double t) nogil:
    cdef long a, b, m
    cdef double w
    if kind == _SK_CONST:
        return p0
    if kind == _SK_LINEAR:
        return p0 + p1 * t
    if t <= tab_t[lo]:
        return tab_v[lo]
    if t >= tab_t[hi - 1]:
        return tab_v[hi - 1]
    a = lo
    b = hi - 1
    while b - a > 1:
        m = (a + b) >> 1
        if tab_t[m] <= t:
            a = m
        else:
            b = m
    w = (t - tab_t[a]) / (tab_t[a + 1] - tab_t[a])
    return tab_v[a] + (tab_v[a + 1] - tab_v[a]) * w


cdef inline long _seg_index(const double[:, ::1] segs, double t) nogil:
    cdef long n = segs.shape[0]
    cdef long a = 0
    cdef long b = n - 1
    cdef long m
    while b > a:
        m = (a + b + 1) >> 1
        if segs[m, 0] <= t:
            a = m
        else:
            b = m - 1
    return a


cdef inline void _ham(long mode, const long[::1] kinds, const double[::1] params,
                      const double[::1] tab_t, const double[::1] tab_v,
                      const long[::1] offs, const double[:, ::1] segs, long seg_i,
                      double t,
                      double* e00, double* e11, double* re01, double* im01) nogil:
    cdef double w, half, th, ph, st, ct, r, s, c, sn, ax, ay, az
    if mode == _M_MATRIX:
        e00[0] = _sched_value(kinds[0], params[0], params[1], tab_t, tab_v, offs[0], offs[1], t)
        e11[0] = _sched_value(kinds[1], params[2], params[3], tab_t, tab_v, offs[1], offs[2], t)
        re01[0] = _sched_value(kinds[2], params[4], params[5], tab_t, tab_v, offs[2], offs[3], t)
        im01[0] = _sched_value(kinds[3], params[6], params[7], tab_t, tab_v, offs[3], offs[4], t)
        return
    w = _sched_value(kinds[0], params[0], params[1], tab_t, tab_v, offs[0], offs[1], t)
    half = 0.5 * w
    if mode == _M_GEO_ANGLES:
        th = _sched_value(kinds[1], params[2], params[3], tab_t, tab_v, offs[1], offs[2], t)
        ph = _sched_value(kinds[2], params[4], params[5], tab_t, tab_v, offs[2], offs[3], t)
        st = sin(th)
        ct = cos(th)
        r = half * st
        e00[0] = half * ct
        e11[0] = -half * ct
        re01[0] = r * cos(ph)
        im01[0] = -r * sin(ph)
        return
    s = segs[seg_i, 2] * (t - segs[seg_i, 0])
    c = cos(s)
    sn = sin(s)
    ax = c * segs[seg_i, 3] + sn * segs[seg_i, 6]
    ay = c * segs[seg_i, 4] + sn * segs[seg_i, 7]
    az = c * segs[seg_i, 5] + sn * segs[seg_i, 8]
    e00[0] = half * az
    e11[0] = -half * az
    re01[0] = half * ax
    im01[0] = -half * ay


# -- full two-amplitude Schrodinger integration ------------------------------


cdef inline void _full_rhs(double e00, double e11, double re01, double im01,
                           double complex p0, double complex p1,
                           double complex* d0, double complex* d1) nogil:
    cdef double complex h01 = re01 + 1j * im01
    cdef double complex h10 = re01 - 1j * im01
    d0[0] = -1j * (e00 * p0 + h01 * p1)
    d1[0] = -1j * (h10 * p0 + e11 * p1)


def full_evolution(long mode, const long[::1] kinds, const double[::1] params,
                   const double[::1] tab_t, const double[::1] tab_v,
                   const long[::1] offs, const double[:, ::1] segs,
                   double complex psi0, double complex psi1,
                   const double[::1] grid, const unsigned char[::1] is_sample,
                   double dt, long scheme, double rel_tol, double norm_limit,
                   double complex[:, ::1] out_psi, double[::1] out_drift):
    cdef double complex p0 = psi0
    cdef double complex p1 = psi1
    cdef double complex k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b, k5a, k5b, k6a, k6b, k7a, k7b
    cdef double complex q0, q1, err0, err1
    cdef long steps = 0, rejected = 0, isamp = 0, n_grid, k, m, j, consec, seg_i
    cdef double max_drift = 0.0, bucket = 0.0
    cdef double a, b, span, h, t, nrm, drift, en, fac, h_next
    cdef double e00 = 0.0, e11 = 0.0, re01 = 0.0, im01 = 0.0
    if is_sample[0]:
        out_psi[0, 0] = p0
        out_psi[0, 1] = p1
        out_drift[0] = 0.0
        isamp = 1
    n_grid = grid.shape[0]
    h_next = dt
    for k in range(n_grid - 1):
        a = grid[k]
        b = grid[k + 1]
        seg_i = _seg_index(segs, 0.5 * (a + b)) if mode == _M_GEO_ARCS else 0
        if scheme == _SCH_RK4:
            span = b - a
            m = <long>ceil(span / dt - 1e-12)
            if m < 1:
                m = 1
            h = span / m
            for j in range(m):
                t = a + j * h
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01, p0, p1, &k1a, &k1b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + 0.5 * h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01, p0 + 0.5 * h * k1a, p1 + 0.5 * h * k1b, &k2a, &k2b)
                _full_rhs(e00, e11, re01, im01, p0 + 0.5 * h * k2a, p1 + 0.5 * h * k2b, &k3a, &k3b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01, p0 + h * k3a, p1 + h * k3b, &k4a, &k4b)
                p0 = p0 + (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
                p1 = p1 + (h / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
                nrm = sqrt(p0.real * p0.real + p0.imag * p0.imag
                           + p1.real * p1.real + p1.imag * p1.imag)
                drift = fabs(nrm - 1.0)
                p0 /= nrm
                p1 /= nrm
                steps += 1
                if drift > bucket:
                    bucket = drift
                if drift > max_drift:
                    max_drift = drift
                if drift > norm_limit:
                    return STATUS_NORM_DRIFT, steps, rejected, max_drift
        else:
            t = a
            h = h_next if h_next < b - a else b - a
            consec = 0
            while t < b - 1e-14 * (1.0 if fabs(b) < 1.0 else fabs(b)):
                if h > b - t:
                    h = b - t
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01, p0, p1, &k1a, &k1b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C2 * h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01, p0 + h * _A21 * k1a, p1 + h * _A21 * k1b, &k2a, &k2b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C3 * h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01,
                          p0 + h * (_A31 * k1a + _A32 * k2a),
                          p1 + h * (_A31 * k1b + _A32 * k2b), &k3a, &k3b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C4 * h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01,
                          p0 + h * (_A41 * k1a + _A42 * k2a + _A43 * k3a),
                          p1 + h * (_A41 * k1b + _A42 * k2b + _A43 * k3b), &k4a, &k4b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C5 * h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01,
                          p0 + h * (_A51 * k1a + _A52 * k2a + _A53 * k3a + _A54 * k4a),
                          p1 + h * (_A51 * k1b + _A52 * k2b + _A53 * k3b + _A54 * k4b), &k5a, &k5b)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + h, &e00, &e11, &re01, &im01)
                _full_rhs(e00, e11, re01, im01,
                          p0 + h * (_A61 * k1a + _A62 * k2a + _A63 * k3a + _A64 * k4a + _A65 * k5a),
                          p1 + h * (_A61 * k1b + _A62 * k2b + _A63 * k3b + _A64 * k4b + _A65 * k5b), &k6a, &k6b)
                q0 = p0 + h * (_B1 * k1a + _B3 * k3a + _B4 * k4a + _B5 * k5a + _B6 * k6a)
                q1 = p1 + h * (_B1 * k1b + _B3 * k3b + _B4 * k4b + _B5 * k5b + _B6 * k6b)
                _full_rhs(e00, e11, re01, im01, q0, q1, &k7a, &k7b)
                err0 = h * (_E1 * k1a + _E3 * k3a + _E4 * k4a + _E5 * k5a + _E6 * k6a + _E7 * k7a)
                err1 = h * (_E1 * k1b + _E3 * k3b + _E4 * k4b + _E5 * k5b + _E6 * k6b + _E7 * k7b)
                en = 0.0
                en += (err0.real / (rel_tol * (1.0 + fabs(q0.real)))) ** 2
                en += (err0.imag / (rel_tol * (1.0 + fabs(q0.imag)))) ** 2
                en += (err1.real / (rel_tol * (1.0 + fabs(q1.real)))) ** 2
                en += (err1.imag / (rel_tol * (1.0 + fabs(q1.imag)))) ** 2
                en = sqrt(0.25 * en)
                if en <= 1.0:
                    t = t + h
                    p0 = q0
                    p1 = q1
                    nrm = sqrt(p0.real * p0.real + p0.imag * p0.imag
                               + p1.real * p1.real + p1.imag * p1.imag)
                    drift = fabs(nrm - 1.0)
                    p0 /= nrm
                    p1 /= nrm
                    steps += 1
                    consec = 0
                    if drift > bucket:
                        bucket = drift
                    if drift > max_drift:
                        max_drift = drift
                    if drift > norm_limit:
                        return STATUS_NORM_DRIFT, steps, rejected, max_drift
                    if en == 0.0:
                        fac = 5.0
                    else:
                        fac = 0.9 * en ** -0.2
                        if fac > 5.0:
                            fac = 5.0
                        elif fac < 0.2:
                            fac = 0.2
                    h = h * fac
                else:
                    rejected += 1
                    consec += 1
                    if consec > _MAX_REJECTS:
                        return STATUS_REJECTED, steps, rejected, max_drift
                    fac = 0.9 * en ** -0.2
                    if fac < 0.2:
                        fac = 0.2
                    h = h * fac
                if h < 1e-13 * (1.0 if fabs(t) < 1.0 else fabs(t)):
                    return STATUS_REJECTED, steps, rejected, max_drift
            h_next = h
        if is_sample[k + 1]:
            out_psi[isamp, 0] = p0
            out_psi[isamp, 1] = p1
            out_drift[isamp] = bucket
            bucket = 0.0
            isamp += 1
    return STATUS_OK, steps, rejected, max_drift


# -- projected integration on the ray sphere ---------------------------------


cdef inline void _proj_rhs(long chart, double y0, double y1,
                           double e00, double e11, double re01, double im01,
                           double* d0, double* d1) nogil:
    cdef double om = e00 - e11
    cdef double s, c, x2r, x2i, ar, ai, z2r, z2i
    if chart == _C_ANGLE:
        s = sin(y1)
        c = cos(y1)
        d0[0] = -2.0 * (s * re01 + c * im01)
        d1[0] = om - 2.0 * (cos(y0) / sin(y0)) * (c * re01 - s * im01)
        return
    if chart == _C_XI:
        x2r = y0 * y0 - y1 * y1
        x2i = 2.0 * y0 * y1
        ar = y0 * om + x2r * re01 - x2i * im01 - re01
        ai = y1 * om + x2r * im01 + x2i * re01 + im01
        d0[0] = -ai
        d1[0] = ar
        return
    z2r = y0 * y0 - y1 * y1
    z2i = 2.0 * y0 * y1
    ar = -y0 * om + z2r * re01 + z2i * im01 - re01
    ai = -y1 * om + z2i * re01 - z2r * im01 - im01
    d0[0] = -ai
    d1[0] = ar


cdef inline double _chart_theta(long chart, double y0, double y1) nogil:
    if chart == _C_ANGLE:
        return y0
    if chart == _C_XI:
        return 2.0 * atan(hypot(y0, y1))
    return M_PI - 2.0 * atan(hypot(y0, y1))


cdef inline long _pick_chart(double theta, double threshold) nogil:
    if theta < threshold:
        return _C_XI
    if theta > M_PI - threshold:
        return _C_ZETA
    return _C_ANGLE


def projected_evolution(long mode, const long[::1] kinds, const double[::1] params,
                        const double[::1] tab_t, const double[::1] tab_v,
                        const long[::1] offs, const double[:, ::1] segs,
                        double theta0, double phi0,
                        const double[::1] grid, const unsigned char[::1] is_sample,
                        double dt, long scheme, double rel_tol, double threshold,
                        double[::1] out_theta, double[::1] out_phi):
    cdef double phi_unw = phi0
    cdef double theta = theta0
    cdef long chart = _pick_chart(theta, threshold)
    cdef long nchart
    cdef double p_prev = 0.0, p_new
    cdef double y0, y1, r
    cdef long steps = 0, rejected = 0, isamp = 0, n_grid, k, m, j, consec, seg_i
    cdef double a, b, span, h, t, en, fac, h_next, s0, s1, q0, q1, err0, err1
    cdef double e00 = 0.0, e11 = 0.0, re01 = 0.0, im01 = 0.0
    cdef double k10, k11, k20, k21, k30, k31, k40, k41, k50, k51, k60, k61, k70, k71
    if chart == _C_ANGLE:
        y0 = theta
        y1 = phi_unw
    elif chart == _C_XI:
        r = tan(0.5 * theta)
        y0 = r * cos(phi_unw)
        y1 = r * sin(phi_unw)
        p_prev = atan2(y1, y0)
    else:
        r = tan(0.5 * (M_PI - theta))
        y0 = r * cos(phi_unw)
        y1 = -r * sin(phi_unw)
        p_prev = -atan2(y1, y0)
    if is_sample[0]:
        out_theta[0] = theta
        out_phi[0] = phi_unw
        isamp = 1
    n_grid = grid.shape[0]
    h_next = dt
    for k in range(n_grid - 1):
        a = grid[k]
        b = grid[k + 1]
        seg_i = _seg_index(segs, 0.5 * (a + b)) if mode == _M_GEO_ARCS else 0
        if scheme == _SCH_RK4:
            span = b - a
            m = <long>ceil(span / dt - 1e-12)
            if m < 1:
                m = 1
            h = span / m
            for j in range(m):
                t = a + j * h
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t, &e00, &e11, &re01, &im01)
                _proj_rhs(chart, y0, y1, e00, e11, re01, im01, &k10, &k11)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + 0.5 * h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart, y0 + 0.5 * h * k10, y1 + 0.5 * h * k11, e00, e11, re01, im01, &k20, &k21)
                _proj_rhs(chart, y0 + 0.5 * h * k20, y1 + 0.5 * h * k21, e00, e11, re01, im01, &k30, &k31)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart, y0 + h * k30, y1 + h * k31, e00, e11, re01, im01, &k40, &k41)
                y0 = y0 + (h / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
                y1 = y1 + (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
                steps += 1
                theta = _chart_theta(chart, y0, y1)
                if chart == _C_ANGLE:
                    phi_unw = y1
                else:
                    p_new = atan2(y1, y0) if chart == _C_XI else -atan2(y1, y0)
                    phi_unw += _wrap_pi(p_new - p_prev)
                    p_prev = p_new
                nchart = _pick_chart(theta, threshold)
                if nchart != chart:
                    chart = nchart
                    if chart == _C_ANGLE:
                        y0 = theta
                        y1 = phi_unw
                    elif chart == _C_XI:
                        r = tan(0.5 * theta)
                        y0 = r * cos(phi_unw)
                        y1 = r * sin(phi_unw)
                        p_prev = atan2(y1, y0)
                    else:
                        r = tan(0.5 * (M_PI - theta))
                        y0 = r * cos(phi_unw)
                        y1 = -r * sin(phi_unw)
                        p_prev = -atan2(y1, y0)
        else:
            t = a
            h = h_next if h_next < b - a else b - a
            consec = 0
            while t < b - 1e-14 * (1.0 if fabs(b) < 1.0 else fabs(b)):
                if h > b - t:
                    h = b - t
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t, &e00, &e11, &re01, &im01)
                _proj_rhs(chart, y0, y1, e00, e11, re01, im01, &k10, &k11)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C2 * h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart, y0 + h * _A21 * k10, y1 + h * _A21 * k11, e00, e11, re01, im01, &k20, &k21)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C3 * h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart,
                          y0 + h * (_A31 * k10 + _A32 * k20),
                          y1 + h * (_A31 * k11 + _A32 * k21), e00, e11, re01, im01, &k30, &k31)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C4 * h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart,
                          y0 + h * (_A41 * k10 + _A42 * k20 + _A43 * k30),
                          y1 + h * (_A41 * k11 + _A42 * k21 + _A43 * k31),
                          e00, e11, re01, im01, &k40, &k41)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + _C5 * h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart,
                          y0 + h * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40),
                          y1 + h * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41),
                          e00, e11, re01, im01, &k50, &k51)
                _ham(mode, kinds, params, tab_t, tab_v, offs, segs, seg_i, t + h, &e00, &e11, &re01, &im01)
                _proj_rhs(chart,
                          y0 + h * (_A61 * k10 + _A62 * k20 + _A63 * k30 + _A64 * k40 + _A65 * k50),
                          y1 + h * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41 + _A65 * k51),
                          e00, e11, re01, im01, &k60, &k61)
                q0 = y0 + h * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50 + _B6 * k60)
                q1 = y1 + h * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51 + _B6 * k61)
                _proj_rhs(chart, q0, q1, e00, e11, re01, im01, &k70, &k71)
                err0 = h * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60 + _E7 * k70)
                err1 = h * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61 + _E7 * k71)
                s0 = rel_tol * (1.0 + (fabs(q0) if fabs(q0) < _TWO_PI else _TWO_PI))
                s1 = rel_tol * (1.0 + (fabs(q1) if fabs(q1) < _TWO_PI else _TWO_PI))
                en = sqrt(0.5 * ((err0 / s0) ** 2 + (err1 / s1) ** 2))
                if en <= 1.0:
                    t = t + h
                    y0 = q0
                    y1 = q1
                    steps += 1
                    consec = 0
                    theta = _chart_theta(chart, y0, y1)
                    if chart == _C_ANGLE:
                        phi_unw = y1
                    else:
                        p_new = atan2(y1, y0) if chart == _C_XI else -atan2(y1, y0)
                        phi_unw += _wrap_pi(p_new - p_prev)
                        p_prev = p_new
                    nchart = _pick_chart(theta, threshold)
                    if nchart != chart:
                        chart = nchart
                        if chart == _C_ANGLE:
                            y0 = theta
                            y1 = phi_unw
                        elif chart == _C_XI:
                            r = tan(0.5 * theta)
                            y0 = r * cos(phi_unw)
                            y1 = r * sin(phi_unw)
                            p_prev = atan2(y1, y0)
                        else:
                            r = tan(0.5 * (M_PI - theta))
                            y0 = r * cos(phi_unw)
                            y1 = -r * sin(phi_unw)
                            p_prev = -atan2(y1, y0)
                    if en == 0.0:
                        fac = 5.0
                    else:
                        fac = 0.9 * en ** -0.2
                        if fac > 5.0:
                            fac = 5.0
                        elif fac < 0.2:
                            fac = 0.2
                    h = h * fac
                else:
                    rejected += 1
                    consec += 1
                    if consec > _MAX_REJECTS:
                        return STATUS_REJECTED, steps, rejected
                    fac = 0.9 * en ** -0.2
                    if fac < 0.2:
                        fac = 0.2
                    h = h * fac
                if h < 1e-13 * (1.0 if fabs(t) < 1.0 else fabs(t)):
                    return STATUS_REJECTED, steps, rejected
            h_next = h
        if is_sample[k + 1]:
            out_theta[isamp] = theta
            out_phi[isamp] = phi_unw
            isamp += 1
    return STATUS_OK, steps, rejected


# -- pendulum reduction -------------------------------------------------------


def pendulum_evolution(double omega0, double cap_omega, const double[::1] times,
                       double dt_max, double[::1] out_eta, double[::1] out_etadot,
                       double[::1] out_eps):
    cdef double eta = 0.0
    cdef double etad = -2.0 * cap_omega
    cdef double eps = 0.0
    cdef double w2 = omega0 * omega0
    cdef long steps = 0, n, k, m, j
    cdef double span, h, e2, e3, e4
    cdef double k10, k11, k12, k20, k21, k22, k30, k31, k32, k40, k41, k42
    out_eta[0] = eta
    out_etadot[0] = etad
    out_eps[0] = eps
    n = times.shape[0]
    for k in range(n - 1):
        span = times[k + 1] - times[k]
        m = <long>ceil(span / dt_max - 1e-12)
        if m < 1:
            m = 1
        h = span / m
        for j in range(m):
            k10 = etad
            k11 = -w2 * sin(eta)
            k12 = -omega0 * sin(0.5 * eta)
            e2 = eta + 0.5 * h * k10
            k20 = etad + 0.5 * h * k11
            k21 = -w2 * sin(e2)
            k22 = -omega0 * sin(0.5 * e2)
            e3 = eta + 0.5 * h * k20
            k30 = etad + 0.5 * h * k21
            k31 = -w2 * sin(e3)
            k32 = -omega0 * sin(0.5 * e3)
            e4 = eta + h * k30
            k40 = etad + h * k31
            k41 = -w2 * sin(e4)
            k42 = -omega0 * sin(0.5 * e4)
            eta = eta + (h / 6.0) * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
            etad = etad + (h / 6.0) * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            eps = eps + (h / 6.0) * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
            steps += 1
        out_eta[k + 1] = eta
        out_etadot[k + 1] = etad
        out_eps[k + 1] = eps
    return steps
