# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel.

Same algorithm and signatures as the pure-Python twin ``_kernel_py``:
adaptive Dormand-Prince 5(4) with the classical dense output, plus a
winding-angle Poincare return locator.  See that module for the
commentary; this one only carries the hot loops.
"""

from libc.math cimport atan2, exp, fabs, hypot, isfinite, sqrt

import numpy as np

IMPLEMENTATION = "compiled"

FIELD_MODEL = 0
FIELD_LIENARD = 1
FIELD_LINEAR_CENTER = 2

STATUS_OK = 0
STATUS_CONVERGED = 1
STATUS_TMAX = 2
STATUS_UNDERFLOW = 3

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double MAX_ANGLE_PER_STEP = 1.5
cdef double SPEED_FACTOR = 50.0

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0
cdef double D1 = -12715105075.0 / 11282082432.0
cdef double D3 = 87487479700.0 / 32700410799.0
cdef double D4 = -10690763975.0 / 1880347072.0
cdef double D5 = 701980252875.0 / 199316789632.0
cdef double D6 = -1453857185.0 / 822651844.0
cdef double D7 = 69997945.0 / 29380423.0


cdef inline void _rhs(int field, double a, double b, double c, double p4,
                      double u, double v, double* du, double* dv) noexcept nogil:
    cdef double s, e, x
    if field == 0:
        if u >= 0.0:
            s = 1.0 / (1.0 + exp(-4.0 * u))
        else:
            e = exp(4.0 * u)
            s = e / (1.0 + e)
        du[0] = -u + a * s - b * v + c
        dv[0] = -v + s
    elif field == 1:
        x = p4 + u
        if x >= 0.0:
            s = 1.0 / (1.0 + exp(-4.0 * x))
        else:
            e = exp(4.0 * x)
            s = e / (1.0 + e)
        du[0] = v
        dv[0] = (c + (a - b) * s - p4 - u) + v * (-2.0 + 4.0 * a * s * (1.0 - s))
    else:
        du[0] = v
        dv[0] = p4 * u


def rhs_eval(int field, double a, double b, double c, double p4,
             double u, double v):
    """Vector field evaluated at (u, v); exposed for cross-impl tests."""
    if field not in (0, 1, 2):
        raise ValueError(f"unknown field id {field}")
    cdef double du = 0.0, dv = 0.0
    _rhs(field, a, b, c, p4, u, v, &du, &dv)
    return du, dv


cdef inline double _initial_step(int field, double a, double b, double c,
                                 double p4, double u, double v,
                                 double f0u, double f0v, double t_end,
                                 double rtol, double atol) noexcept nogil:
    cdef double scu = atol + rtol * fabs(u)
    cdef double scv = atol + rtol * fabs(v)
    cdef double d0 = sqrt(0.5 * ((u / scu) * (u / scu) + (v / scv) * (v / scv)))
    cdef double d1 = sqrt(0.5 * ((f0u / scu) * (f0u / scu) + (f0v / scv) * (f0v / scv)))
    cdef double h0, d2, dm, h1, f1u, f1v
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    _rhs(field, a, b, c, p4, u + h0 * f0u, v + h0 * f0v, &f1u, &f1v)
    d2 = sqrt(0.5 * (((f1u - f0u) / scu) ** 2 + ((f1v - f0v) / scv) ** 2)) / h0
    dm = d1 if d1 > d2 else d2
    if dm <= 1e-15:
        h1 = h0 * 1e-3
        if h1 < 1e-6:
            h1 = 1e-6
    else:
        h1 = (0.01 / dm) ** 0.2
    cdef double h = 100.0 * h0
    if h1 < h:
        h = h1
    if t_end < h:
        h = t_end
    return h


cdef struct StepOut:
    double y1u, y1v, k7u, k7v, erru, errv
    double cu0, cu1, cu2, cu3, cu4
    double cv0, cv1, cv2, cv3, cv4


cdef inline void _dp_step(int field, double a, double b, double c, double p4,
                          double u, double v, double k1u, double k1v,
                          double h, StepOut* o) noexcept nogil:
    cdef double k2u, k2v, k3u, k3v, k4u, k4v, k5u, k5v, k6u, k6v
    _rhs(field, a, b, c, p4,
         u + h * A21 * k1u, v + h * A21 * k1v, &k2u, &k2v)
    _rhs(field, a, b, c, p4,
         u + h * (A31 * k1u + A32 * k2u),
         v + h * (A31 * k1v + A32 * k2v), &k3u, &k3v)
    _rhs(field, a, b, c, p4,
         u + h * (A41 * k1u + A42 * k2u + A43 * k3u),
         v + h * (A41 * k1v + A42 * k2v + A43 * k3v), &k4u, &k4v)
    _rhs(field, a, b, c, p4,
         u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u),
         v + h * (A51 * k1v + A52 * k2v + A53 * k3v + A54 * k4v), &k5u, &k5v)
    _rhs(field, a, b, c, p4,
         u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u),
         v + h * (A61 * k1v + A62 * k2v + A63 * k3v + A64 * k4v + A65 * k5v),
         &k6u, &k6v)
    o.y1u = u + h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
    o.y1v = v + h * (B1 * k1v + B3 * k3v + B4 * k4v + B5 * k5v + B6 * k6v)
    _rhs(field, a, b, c, p4, o.y1u, o.y1v, &o.k7u, &o.k7v)
    o.erru = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * o.k7u)
    o.errv = h * (E1 * k1v + E3 * k3v + E4 * k4v + E5 * k5v + E6 * k6v + E7 * o.k7v)
    o.cu0 = u
    o.cu1 = o.y1u - u
    o.cu2 = h * k1u - o.cu1
    o.cu3 = o.cu1 - h * o.k7u - o.cu2
    o.cu4 = h * (D1 * k1u + D3 * k3u + D4 * k4u + D5 * k5u + D6 * k6u + D7 * o.k7u)
    o.cv0 = v
    o.cv1 = o.y1v - v
    o.cv2 = h * k1v - o.cv1
    o.cv3 = o.cv1 - h * o.k7v - o.cv2
    o.cv4 = h * (D1 * k1v + D3 * k3v + D4 * k4v + D5 * k5v + D6 * k6v + D7 * o.k7v)


cdef inline double _dense_u(StepOut* o, double theta) noexcept nogil:
    cdef double om = 1.0 - theta
    return o.cu0 + theta * (o.cu1 + om * (o.cu2 + theta * (o.cu3 + om * o.cu4)))


cdef inline double _dense_v(StepOut* o, double theta) noexcept nogil:
    cdef double om = 1.0 - theta
    return o.cv0 + theta * (o.cv1 + om * (o.cv2 + theta * (o.cv3 + om * o.cv4)))


def integrate_path(int field, double a, double b, double c, double p4,
                   double u0, double v0, double t_end, double rtol, double atol,
                   long max_steps=5_000_000, t_eval=None,
                   bint stop_at_equilibrium=False, double max_step=0.0):
    """Integrate from (u0, v0) over [0, t_end]; see the pure-Python twin."""
    cdef double u = u0, v = v0
    cdef double k1u = 0.0, k1v = 0.0
    _rhs(field, a, b, c, p4, u, v, &k1u, &k1v)

    cdef bint eval_mode = t_eval is not None
    cdef double[::1] t_req
    cdef Py_ssize_t ireq = 0, nreq = 0
    ts, us, vs = [], [], []
    if eval_mode:
        t_req = np.ascontiguousarray(t_eval, dtype=np.float64)
        nreq = t_req.shape[0]
        while ireq < nreq and t_req[ireq] <= 0.0:
            ts.append(t_req[ireq]); us.append(u); vs.append(v)
            ireq += 1
    else:
        ts.append(0.0); us.append(u); vs.append(v)

    cdef double t = 0.0
    cdef double h = _initial_step(field, a, b, c, p4, u, v, k1u, k1v,
                                  t_end, rtol, atol)
    cdef int status = STATUS_OK
    cdef bint rejected = False
    cdef long steps = 0
    cdef StepOut o
    cdef double scu, scv, err, t_new, theta, fac, speed, maxu, maxv
    while t < t_end:
        if steps >= max_steps:
            status = STATUS_UNDERFLOW
            break
        steps += 1
        if h < 1e-14 * max(1.0, fabs(t)):
            status = STATUS_UNDERFLOW
            break
        if max_step > 0.0 and h > max_step:
            h = max_step
        if t + h > t_end:
            h = t_end - t
        _dp_step(field, a, b, c, p4, u, v, k1u, k1v, h, &o)
        maxu = fabs(u) if fabs(u) > fabs(o.y1u) else fabs(o.y1u)
        maxv = fabs(v) if fabs(v) > fabs(o.y1v) else fabs(o.y1v)
        scu = atol + rtol * maxu
        scv = atol + rtol * maxv
        err = sqrt(0.5 * ((o.erru / scu) ** 2 + (o.errv / scv) ** 2))
        if not (isfinite(o.y1u) and isfinite(o.y1v) and isfinite(err)):
            h *= 0.25
            rejected = True
            continue
        if err > 1.0:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h *= fac
            rejected = True
            continue
        t_new = t + h
        if eval_mode:
            while ireq < nreq and t_req[ireq] <= t_new + 1e-15 * max(1.0, t_new):
                theta = (t_req[ireq] - t) / h
                ts.append(t_req[ireq])
                us.append(_dense_u(&o, theta))
                vs.append(_dense_v(&o, theta))
                ireq += 1
        else:
            ts.append(t_new); us.append(o.y1u); vs.append(o.y1v)
        t = t_new
        u = o.y1u
        v = o.y1v
        k1u = o.k7u
        k1v = o.k7v
        if stop_at_equilibrium:
            speed = hypot(k1u, k1v)
            if speed < SPEED_FACTOR * (atol + rtol * (1.0 + hypot(u, v))):
                status = STATUS_CONVERGED
                break
        if err > 0.0:
            fac = 0.9 * err ** -0.2
        else:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        if fac > (1.0 if rejected else 5.0):
            fac = 1.0 if rejected else 5.0
        h *= fac
        rejected = False
    return (np.asarray(ts), np.asarray(us), np.asarray(vs), status)


def ray_return(int field, double a, double b, double c, double p4,
               double ox, double oy, double dx, double dy, double r0,
               double rtol, double atol, double t_max=500.0,
               long max_steps=5_000_000, int orientation=0):
    """First return to the ray {origin + r*d, r > 0}; see the Python twin."""
    cdef double nrm = hypot(dx, dy)
    cdef double dxn = dx / nrm, dyn = dy / nrm
    cdef double u = ox + r0 * dxn
    cdef double v = oy + r0 * dyn
    cdef double k1u = 0.0, k1v = 0.0
    _rhs(field, a, b, c, p4, u, v, &k1u, &k1v)
    cdef double sense = <double>orientation
    cdef double gp0 = dxn * k1v - dyn * k1u
    if sense == 0.0:
        if gp0 > 0.0:
            sense = 1.0
        elif gp0 < 0.0:
            sense = -1.0
    cdef double phase = 0.0
    cdef double t = 0.0
    cdef double h = _initial_step(field, a, b, c, p4, u, v, k1u, k1v,
                                  t_max, rtol, atol)
    cdef bint rejected = False
    cdef long steps = 0
    cdef StepOut o
    cdef double scu, scv, err, fac, speed, rad, maxu, maxv
    cdef double wxo, wyo, wxn, wyn, crossp, dotp, delta
    cdef double lo, glo, hi, th, gv, mid, wu, wv, r_next, resid
    cdef int i
    while True:
        if t >= t_max or steps >= max_steps:
            return 0.0, t, STATUS_TMAX, 0.0
        steps += 1
        if h < 1e-14 * max(1.0, fabs(t)):
            return 0.0, t, STATUS_UNDERFLOW, 0.0
        if t + h > t_max:
            h = t_max - t
        _dp_step(field, a, b, c, p4, u, v, k1u, k1v, h, &o)
        maxu = fabs(u) if fabs(u) > fabs(o.y1u) else fabs(o.y1u)
        maxv = fabs(v) if fabs(v) > fabs(o.y1v) else fabs(o.y1v)
        scu = atol + rtol * maxu
        scv = atol + rtol * maxv
        err = sqrt(0.5 * ((o.erru / scu) ** 2 + (o.errv / scv) ** 2))
        if not (isfinite(o.y1u) and isfinite(o.y1v) and isfinite(err)):
            h *= 0.25
            rejected = True
            continue
        if err > 1.0:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h *= fac
            rejected = True
            continue
        wxo = u - ox
        wyo = v - oy
        wxn = o.y1u - ox
        wyn = o.y1v - oy
        crossp = wxo * wyn - wyo * wxn
        dotp = wxo * wxn + wyo * wyn
        delta = atan2(crossp, dotp)
        if fabs(delta) > MAX_ANGLE_PER_STEP:
            h *= 0.5
            rejected = True
            continue
        if sense == 0.0 and delta != 0.0:
            sense = 1.0 if delta > 0.0 else -1.0
        if sense != 0.0 and (phase + delta) * sense >= TWO_PI:
            lo = 0.0
            glo = phase * sense - TWO_PI
            hi = 1.0
            for i in range(1, 17):
                th = i / 16.0
                wu = _dense_u(&o, th) - ox
                wv = _dense_v(&o, th) - oy
                gv = (phase + atan2(wxo * wv - wyo * wu,
                                    wxo * wu + wyo * wv)) * sense - TWO_PI
                if glo < 0.0 <= gv:
                    hi = th
                    break
                lo = th
                glo = gv
            for i in range(90):
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                wu = _dense_u(&o, mid) - ox
                wv = _dense_v(&o, mid) - oy
                gv = (phase + atan2(wxo * wv - wyo * wu,
                                    wxo * wu + wyo * wv)) * sense - TWO_PI
                if gv >= 0.0:
                    hi = mid
                else:
                    lo = mid
            wu = _dense_u(&o, hi) - ox
            wv = _dense_v(&o, hi) - oy
            r_next = wu * dxn + wv * dyn
            resid = dxn * wv - dyn * wu
            return r_next, t + hi * h, STATUS_OK, resid
        phase += delta
        t += h
        u = o.y1u
        v = o.y1v
        k1u = o.k7u
        k1v = o.k7v
        speed = hypot(k1u, k1v)
        rad = hypot(u - ox, v - oy)
        if speed < SPEED_FACTOR * (atol + rtol * (1.0 + hypot(u, v))):
            return rad, t, STATUS_CONVERGED, 0.0
        if rad < 1e-13 * (1.0 + fabs(r0)):
            return rad, t, STATUS_CONVERGED, 0.0
        if err > 0.0:
            fac = 0.9 * err ** -0.2
        else:
            fac = 5.0
        if fac < 0.2:
            fac = 0.2
        if fac > (1.0 if rejected else 5.0):
            fac = 1.0 if rejected else 5.0
        h *= fac
        rejected = False
