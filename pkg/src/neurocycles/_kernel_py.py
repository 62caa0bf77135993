"""Pure-Python integration kernel.

Twin of the compiled extension ``_kernel``: identical algorithm, identical
call signatures, plain-float arithmetic.  Selected automatically by
:mod:`neurocycles.kernel` when the extension is unavailable.

The stepper is an adaptive Dormand-Prince 5(4) pair with the classical
quartic dense-output interpolant.  ``ray_return`` locates Poincare
returns by accumulating the winding angle of the state around the section
origin and root-finding the crossing time on the dense output; this makes
the first-return definition immune to non-enclosing loops crossing the
section line, which matters for sections anchored between equilibria.
"""

from __future__ import annotations

import math

import numpy as np

IMPLEMENTATION = "python"

FIELD_MODEL = 0
FIELD_LIENARD = 1
FIELD_LINEAR_CENTER = 2

STATUS_OK = 0
STATUS_CONVERGED = 1
STATUS_TMAX = 2
STATUS_UNDERFLOW = 3

# Dormand-Prince 5(4) tableau.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)
# Dense-output weights.
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0

_MAX_ANGLE_PER_STEP = 1.5  # rad; keeps atan2 winding increments unaliased
# |f| below 50*(atol + rtol*(1+|y|)) counts as "at an equilibrium": the
# numerical state hovers within the error-control deadband of a sink, so
# the speed floors near rtol*|y| and a fixed threshold would never fire.
_SPEED_FACTOR = 50.0


def rhs_eval(field, a, b, c, p4, u, v):
    """Vector field evaluated at (u, v); exposed for cross-impl tests."""
    if field == FIELD_MODEL:
        if u >= 0.0:
            s = 1.0 / (1.0 + math.exp(-4.0 * u))
        else:
            e = math.exp(4.0 * u)
            s = e / (1.0 + e)
        return -u + a * s - b * v + c, -v + s
    if field == FIELD_LIENARD:
        x = p4 + u
        if x >= 0.0:
            s = 1.0 / (1.0 + math.exp(-4.0 * x))
        else:
            e = math.exp(4.0 * x)
            s = e / (1.0 + e)
        return v, (c + (a - b) * s - p4 - u) + v * (-2.0 + 4.0 * a * s * (1.0 - s))
    if field == FIELD_LINEAR_CENTER:
        return v, p4 * u
    raise ValueError(f"unknown field id {field}")


def _initial_step(field, a, b, c, p4, u, v, f0u, f0v, t_end, rtol, atol):
    scu = atol + rtol * abs(u)
    scv = atol + rtol * abs(v)
    d0 = math.sqrt(0.5 * ((u / scu) ** 2 + (v / scv) ** 2))
    d1 = math.sqrt(0.5 * ((f0u / scu) ** 2 + (f0v / scv) ** 2))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    f1u, f1v = rhs_eval(field, a, b, c, p4, u + h0 * f0u, v + h0 * f0v)
    d2 = math.sqrt(0.5 * (((f1u - f0u) / scu) ** 2 + ((f1v - f0v) / scv) ** 2)) / h0
    dm = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    return min(100.0 * h0, h1, t_end)


def _step(field, a, b, c, p4, u, v, k1u, k1v, h):
    """One DP5(4) attempt; returns (y1, k7, err-estimate, dense coeffs)."""
    k2u, k2v = rhs_eval(field, a, b, c, p4,
                        u + h * _A21 * k1u, v + h * _A21 * k1v)
    k3u, k3v = rhs_eval(field, a, b, c, p4,
                        u + h * (_A31 * k1u + _A32 * k2u),
                        v + h * (_A31 * k1v + _A32 * k2v))
    k4u, k4v = rhs_eval(field, a, b, c, p4,
                        u + h * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
                        v + h * (_A41 * k1v + _A42 * k2v + _A43 * k3v))
    k5u, k5v = rhs_eval(field, a, b, c, p4,
                        u + h * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
                        v + h * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v))
    k6u, k6v = rhs_eval(field, a, b, c, p4,
                        u + h * (_A61 * k1u + _A62 * k2u + _A63 * k3u
                                 + _A64 * k4u + _A65 * k5u),
                        v + h * (_A61 * k1v + _A62 * k2v + _A63 * k3v
                                 + _A64 * k4v + _A65 * k5v))
    y1u = u + h * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
    y1v = v + h * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)
    k7u, k7v = rhs_eval(field, a, b, c, p4, y1u, y1v)
    erru = h * (_E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u
                + _E6 * k6u + _E7 * k7u)
    errv = h * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v
                + _E6 * k6v + _E7 * k7v)
    cu1 = y1u - u
    cu2 = h * k1u - cu1
    cu3 = cu1 - h * k7u - cu2
    cu4 = h * (_D1 * k1u + _D3 * k3u + _D4 * k4u + _D5 * k5u
               + _D6 * k6u + _D7 * k7u)
    cv1 = y1v - v
    cv2 = h * k1v - cv1
    cv3 = cv1 - h * k7v - cv2
    cv4 = h * (_D1 * k1v + _D3 * k3v + _D4 * k4v + _D5 * k5v
               + _D6 * k6v + _D7 * k7v)
    return (y1u, y1v, k7u, k7v, erru, errv,
            (u, cu1, cu2, cu3, cu4), (v, cv1, cv2, cv3, cv4))


def _dense(cf, theta):
    c0, c1, c2, c3, c4 = cf
    om = 1.0 - theta
    return c0 + theta * (c1 + om * (c2 + theta * (c3 + om * c4)))


def integrate_path(field, a, b, c, p4, u0, v0, t_end, rtol, atol,
                   max_steps=5_000_000, t_eval=None,
                   stop_at_equilibrium=False, max_step=0.0):
    """Integrate from (u0, v0) over [0, t_end].

    Returns (t, u, v, status) with samples at the accepted steps, or at
    the requested ``t_eval`` times (dense output).  Status is STATUS_OK
    when t_end was reached, STATUS_CONVERGED when ``stop_at_equilibrium``
    triggered, STATUS_UNDERFLOW on step-size collapse or non-finite state.
    ``max_step > 0`` caps the step size (useful near equilibria, where
    error control alone lets steps outgrow the rotation scale).
    """
    u, v = float(u0), float(v0)
    k1u, k1v = rhs_eval(field, a, b, c, p4, u, v)
    ts, us, vs = [0.0], [u], [v]
    eval_mode = t_eval is not None
    if eval_mode:
        t_req = [float(te) for te in t_eval]
        ts, us, vs = [], [], []
        ireq = 0
        while ireq < len(t_req) and t_req[ireq] <= 0.0:
            ts.append(t_req[ireq]); us.append(u); vs.append(v)
            ireq += 1
    t = 0.0
    h = _initial_step(field, a, b, c, p4, u, v, k1u, k1v, t_end, rtol, atol)
    status = STATUS_OK
    rejected = False
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            status = STATUS_UNDERFLOW
            break
        steps += 1
        if h < 1e-14 * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        if max_step > 0.0 and h > max_step:
            h = max_step
        if t + h > t_end:
            h = t_end - t
        (y1u, y1v, k7u, k7v, erru, errv, cfu, cfv) = _step(
            field, a, b, c, p4, u, v, k1u, k1v, h)
        scu = atol + rtol * max(abs(u), abs(y1u))
        scv = atol + rtol * max(abs(v), abs(y1v))
        err = math.sqrt(0.5 * ((erru / scu) ** 2 + (errv / scv) ** 2))
        if not (math.isfinite(y1u) and math.isfinite(y1v) and math.isfinite(err)):
            h *= 0.25
            rejected = True
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected = True
            continue
        t_new = t + h
        if eval_mode:
            while ireq < len(t_req) and t_req[ireq] <= t_new + 1e-15 * max(1.0, t_new):
                theta = (t_req[ireq] - t) / h
                ts.append(t_req[ireq])
                us.append(_dense(cfu, theta))
                vs.append(_dense(cfv, theta))
                ireq += 1
        else:
            ts.append(t_new); us.append(y1u); vs.append(y1v)
        t, u, v = t_new, y1u, y1v
        k1u, k1v = k7u, k7v
        if stop_at_equilibrium:
            speed = math.hypot(k1u, k1v)
            if speed < _SPEED_FACTOR * (atol + rtol * (1.0 + math.hypot(u, v))):
                status = STATUS_CONVERGED
                break
        fac = min(5.0 if not rejected else 1.0, max(0.2, 0.9 * err ** -0.2 if err > 0.0 else 5.0))
        h *= fac
        rejected = False
    return (np.asarray(ts), np.asarray(us), np.asarray(vs), status)


def ray_return(field, a, b, c, p4, ox, oy, dx, dy, r0, rtol, atol,
               t_max=500.0, max_steps=5_000_000, orientation=0):
    """First return of the flow to the ray {origin + r*d, r > 0}.

    Starts at origin + r0*d and integrates until the winding angle of the
    state around the origin accumulates a full turn in the departure
    sense; the crossing time is then bisected to floating-point resolution
    on the dense output.  Returns (r_next, period, status, residual),
    where residual is the perpendicular section coordinate at the located
    crossing (|residual| < 1e-12 in practice), r_next the coordinate along
    the ray.  Status CONVERGED means the orbit settled at an equilibrium
    without completing a turn; TMAX means no return within t_max.
    ``orientation`` fixes the sign of the crossing sense; 0 infers it from
    the transversal velocity at departure.
    """
    nrm = math.hypot(dx, dy)
    dxn, dyn = dx / nrm, dy / nrm
    u = ox + r0 * dxn
    v = oy + r0 * dyn
    k1u, k1v = rhs_eval(field, a, b, c, p4, u, v)
    sense = float(orientation)
    gp0 = dxn * k1v - dyn * k1u
    if sense == 0.0:
        if gp0 > 0.0:
            sense = 1.0
        elif gp0 < 0.0:
            sense = -1.0
    two_pi = 2.0 * math.pi
    phase = 0.0
    t = 0.0
    h = _initial_step(field, a, b, c, p4, u, v, k1u, k1v, t_max, rtol, atol)
    rejected = False
    steps = 0
    while True:
        if t >= t_max:
            return 0.0, t, STATUS_TMAX, 0.0
        if steps >= max_steps:
            return 0.0, t, STATUS_TMAX, 0.0
        steps += 1
        if h < 1e-14 * max(1.0, abs(t)):
            return 0.0, t, STATUS_UNDERFLOW, 0.0
        if t + h > t_max:
            h = t_max - t
        (y1u, y1v, k7u, k7v, erru, errv, cfu, cfv) = _step(
            field, a, b, c, p4, u, v, k1u, k1v, h)
        scu = atol + rtol * max(abs(u), abs(y1u))
        scv = atol + rtol * max(abs(v), abs(y1v))
        err = math.sqrt(0.5 * ((erru / scu) ** 2 + (errv / scv) ** 2))
        if not (math.isfinite(y1u) and math.isfinite(y1v) and math.isfinite(err)):
            h *= 0.25
            rejected = True
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected = True
            continue
        wxo, wyo = u - ox, v - oy
        wxn, wyn = y1u - ox, y1v - oy
        crossp = wxo * wyn - wyo * wxn
        dotp = wxo * wxn + wyo * wyn
        delta = math.atan2(crossp, dotp)
        if abs(delta) > _MAX_ANGLE_PER_STEP:
            h *= 0.5
            rejected = True
            continue
        if sense == 0.0 and delta != 0.0:
            sense = 1.0 if delta > 0.0 else -1.0
        if sense != 0.0 and (phase + delta) * sense >= two_pi:
            # Crossing inside this step: earliest bracket, then bisection.
            def wind(theta):
                wu = _dense(cfu, theta) - ox
                wv = _dense(cfv, theta) - oy
                return (phase + math.atan2(wxo * wv - wyo * wu,
                                           wxo * wu + wyo * wv)) * sense - two_pi
            lo, glo = 0.0, phase * sense - two_pi
            hi = 1.0
            for i in range(1, 17):
                th = i / 16.0
                gv = wind(th)
                if glo < 0.0 <= gv:
                    hi = th
                    break
                lo, glo = th, gv
            for _ in range(90):
                mid = 0.5 * (lo + hi)
                if mid == lo or mid == hi:
                    break
                if wind(mid) >= 0.0:
                    hi = mid
                else:
                    lo = mid
            theta = hi
            wu = _dense(cfu, theta) - ox
            wv = _dense(cfv, theta) - oy
            r_next = wu * dxn + wv * dyn
            resid = dxn * wv - dyn * wu
            return r_next, t + theta * h, STATUS_OK, resid
        phase += delta
        t += h
        u, v = y1u, y1v
        k1u, k1v = k7u, k7v
        speed = math.hypot(k1u, k1v)
        rad = math.hypot(u - ox, v - oy)
        if speed < _SPEED_FACTOR * (atol + rtol * (1.0 + math.hypot(u, v))):
            return rad, t, STATUS_CONVERGED, 0.0
        if rad < 1e-13 * (1.0 + abs(r0)):
            return rad, t, STATUS_CONVERGED, 0.0
        fac = min(5.0 if not rejected else 1.0,
                  max(0.2, 0.9 * err ** -0.2 if err > 0.0 else 5.0))
        h *= fac
        rejected = False
