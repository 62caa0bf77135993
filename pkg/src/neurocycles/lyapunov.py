"""First three focal (Lyapunov) quantities of a weak focus, three ways.

A steady state with zero trace and positive determinant is a complex
focus; its stability is decided by the first nonzero focal quantity.
This module evaluates those quantities by three independent routes:

* ``lyapunov_generic`` - the generic Lienard-form combinations of the
  Taylor coefficients p_k, q_k (exact coefficients from
  :mod:`neurocycles.lienard`);
* ``lyapunov_closed`` - closed-form polynomials in theta = exp(4*u0) and
  d = a - b specialized to this model;
* ``focal_oracle`` - a simulated Poincare displacement on a ray from the
  focus, fitted against the expected leading power.

Each route is defined only up to its own positive factor, so cross-route
comparisons are sign-only.  The closed-form l3 uses the reciprocal
(palindromic) coefficient reading: the theta^4 and theta^6 coefficients
share the -2*(903 - 1904d - 384d^2) form, which is what the theta -> 1/theta
model symmetry at fixed d forces on every one of these polynomials.

The zero set of l1 inside the zero-trace manifold is a curve with the
explicit parametrization ``bautin_curve``; on it l2 reduces exactly to
the sixth-degree polynomial ``l2bar``, whose two positive roots
(``l2bar_roots``) pin the two parameter points carrying a focus of
multiplicity three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import kernel
from .lienard import LienardCoeffs, taylor_coeffs
from .model import Equilibrium, Params

__all__ = [
    "LyapunovSource",
    "LyapunovCoeffs",
    "BautinPoint",
    "OracleResult",
    "NotAFocusError",
    "FitInconclusiveError",
    "lyapunov_generic",
    "lyapunov_closed",
    "l2bar",
    "l2bar_roots",
    "bautin_curve",
    "focal_oracle",
]


class NotAFocusError(ValueError):
    """The supplied steady state is not a complex focus."""


class FitInconclusiveError(RuntimeError):
    """The displacement ladder does not support a clean power-law fit."""


class LyapunovSource(Enum):
    GENERIC = "generic"
    CLOSED_FORM = "closed_form"
    ORACLE = "oracle"


@dataclass(frozen=True)
class LyapunovCoeffs:
    """Focal quantities (l1, l2, l3), each up to a positive factor."""

    l1: float
    l2: float
    l3: float
    source: LyapunovSource


@dataclass(frozen=True)
class BautinPoint:
    """Point of the l1 = 0 curve inside the zero-trace manifold."""

    vartheta: float
    a: float
    b: float
    c: float
    u0: float

    @property
    def params(self) -> Params:
        return Params(a=self.a, b=self.b, c=self.c)


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a displacement-ladder fit around a weak focus."""

    sign: int
    coefficient: float
    slope: float
    r2: float
    n_points: int
    confident: bool


def lyapunov_generic(lc: LienardCoeffs) -> LyapunovCoeffs:
    """Generic Lienard-form focal quantities from Taylor coefficients.

    Requires p1 < 0 (complex focus); the three quantities are the
    standard polynomial combinations of p1..p6, q1..q6.
    """
    if lc.p1 >= 0.0:
        raise NotAFocusError(f"p1 must be negative for a complex focus, got {lc.p1}")
    p1, p2, p3, p4, p5, p6 = lc.p[:6]
    q1, q2, q3, q4, q5, q6 = lc.q[:6]
    l1 = p2 * q1 - p1 * q2
    l2 = 5.0 * (p2 * q3 - p3 * q2) + 3.0 * (p4 * q1 - p1 * q4)
    l3 = (14.0 * p2 * (p2 * q4 - p4 * q2)
          + 21.0 * p1 * (p3 * q4 - p4 * q3)
          + 35.0 * p1 * (p5 * q2 - p2 * q5)
          + 15.0 * p1 * (p1 * q6 - p6 * q1))
    return LyapunovCoeffs(l1=l1, l2=l2, l3=l3, source=LyapunovSource.GENERIC)


def lyapunov_closed(theta: float, d: float) -> LyapunovCoeffs:
    """Closed-form focal quantities in theta = exp(4*u0), d = a - b.

    All three are self-reciprocal polynomials in theta (degrees 4, 6, 10)
    at fixed d, matching the model's theta -> 1/theta point symmetry.
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    t = theta
    l1 = 1.0 - 2.0 * t - (6.0 - 8.0 * d) * t**2 - 2.0 * t**3 + t**4
    l2 = (3.0 - 72.0 * t + (45.0 + 8.0 * d) * t**2
          + (240.0 - 368.0 * d) * t**3 + (45.0 + 8.0 * d) * t**4
          - 72.0 * t**5 + 3.0 * t**6)
    c1 = -4.0 * (29.0 + d)
    c2 = 717.0 + 160.0 * d
    c3 = 16.0 * (102.0 - 205.0 * d - 6.0 * d * d)
    c4 = -2.0 * (903.0 - 1904.0 * d - 384.0 * d * d)
    c5 = 8.0 * (651.0 + 1813.0 * d - 1608.0 * d * d)
    l3 = (1.0 + c1 * t + c2 * t**2 + c3 * t**3 + c4 * t**4 + c5 * t**5
          + c4 * t**6 + c3 * t**7 + c2 * t**8 + c1 * t**9 + t**10)
    return LyapunovCoeffs(l1=l1, l2=l2, l3=l3, source=LyapunovSource.CLOSED_FORM)


def l2bar(vartheta: float) -> float:
    """Second focal quantity restricted to the l1 = 0 curve.

    Equals lyapunov_closed(theta, d).l2 with d taken from the curve;
    the restriction collapses to 2*(1+v)^2*(1 - 14v + 6v^2 - 14v^3 + v^4).
    """
    if vartheta <= 0.0:
        raise ValueError(f"vartheta must be positive, got {vartheta}")
    v = vartheta
    return 2.0 * (1.0 + v) ** 2 * (1.0 - 14.0 * v + 6.0 * v**2 - 14.0 * v**3 + v**4)


def l2bar_roots() -> tuple[float, float]:
    """Both positive roots of 1 - 14v + 6v^2 - 14v^3 + v^4.

    The quartic is reciprocal: with w = v + 1/v it becomes
    w^2 - 14w + 4 = 0, and only the branch w = 7 + 3*sqrt(5) >= 2 yields
    real v.  The roots are a reciprocal pair (product exactly 1).
    """
    w = 7.0 + 3.0 * math.sqrt(5.0)
    root = math.sqrt(w * w - 4.0)
    return (w + root) / 2.0, (w - root) / 2.0


def bautin_curve(vartheta: float) -> BautinPoint:
    """Parameter point of the l1 = 0 curve at parameter vartheta.

    a = (1+v)^2/(2v), b = (1+v)^2(1+v^2)/(8v^2),
    c = (1 - 3v - 3v^2 + v^3 + 2v*ln(v))/(8v), with the steady state at
    u0 = ln(v)/4.  v = 1 is excluded: there p1 = -(v-1)^2/(2v) vanishes
    and the steady state stops being a complex focus.
    """
    v = vartheta
    if v <= 0.0:
        raise ValueError(f"vartheta must be positive, got {v}")
    if abs(v - 1.0) < 1e-12:
        raise ValueError("vartheta = 1 is a degenerate (non-focus) point")
    a = (1.0 + v) ** 2 / (2.0 * v)
    b = (1.0 + v) ** 2 * (1.0 + v * v) / (8.0 * v * v)
    c = (1.0 - 3.0 * v - 3.0 * v * v + v**3 + 2.0 * v * math.log(v)) / (8.0 * v)
    return BautinPoint(vartheta=v, a=a, b=b, c=c, u0=0.25 * math.log(v))


_DEFAULT_LADDER = tuple(1e-3 * 2.0**j for j in range(9))
_NOISE_FACTOR = 20.0
_RATIO_SLACK = 0.2  # admissible deviation of a between-rung log2 ratio


def focal_oracle(p: Params, eq: Equilibrium, k: int,
                 radii: tuple[float, ...] | None = None,
                 rtol: float = 1e-12, atol: float = 1e-14,
                 t_max: float = 200.0,
                 trace_tol: float = 1e-8,
                 field: int | None = None,
                 field_p4: float | None = None) -> OracleResult:
    """Sign of the leading focal quantity by simulated displacement.

    Integrates the Lienard form of the system around the weak focus and
    measures the Poincare displacement d(x0) = P(x0) - x0 on the +x ray
    for a geometric ladder of radii.  For order k the displacement must
    follow c*x0**(2k+1); the log-log slope check doubles as the
    confirmation that all lower-order terms are consistent with zero
    (a surviving lower-order term would drag the slope down).  Rungs
    drowned by the integrator noise floor and edge rungs contaminated by
    the next order (between-rung log2 ratio off 2k+1 by more than 0.2)
    are discarded before fitting.  Returns the common sign of the kept
    displacements (positive = repelling focus, matching the sign
    convention of the symbolic routes).

    Raises NotAFocusError when the steady state is not a weak focus and
    FitInconclusiveError when fewer than five rungs survive, the rung
    signs disagree, or the fitted slope/R^2 miss 2k+1 +- 0.1 / 0.999.
    The ``field``/``field_p4`` hook substitutes a different kernel vector
    field (used by tests to drive a linear center through the same code
    path).
    """
    if k not in (1, 2, 3):
        raise ValueError(f"order k must be 1, 2, or 3, got {k}")
    if field is None:
        if abs(eq.trace) > trace_tol:
            raise NotAFocusError(f"trace {eq.trace} is not within {trace_tol} of zero")
        if eq.det <= 0.0:
            raise NotAFocusError(f"determinant {eq.det} must be positive")
        lc = taylor_coeffs(p, eq)
        if lc.p1 >= 0.0:
            raise NotAFocusError(f"p1 = {lc.p1} >= 0: not a complex focus")
        field = kernel.FIELD_LIENARD
        field_p4 = eq.u0
    ladder = _DEFAULT_LADDER if radii is None else tuple(radii)
    xs: list[float] = []
    ds: list[float] = []
    for x0 in ladder:
        r_next, _period, status, _resid = kernel.ray_return(
            field, p.a, p.b, p.c, field_p4, 0.0, 0.0, 1.0, 0.0, x0,
            rtol, atol, t_max)
        if status != kernel.STATUS_OK:
            continue
        disp = r_next - x0
        if abs(disp) < _NOISE_FACTOR * (atol + rtol * x0):
            continue
        xs.append(x0)
        ds.append(disp)
    expected = 2 * k + 1

    def edge_ratio_bad(i: int, j: int) -> bool:
        ratio = (math.log(abs(ds[j] / ds[i]))
                 / math.log(xs[j] / xs[i]))
        return abs(ratio - expected) > _RATIO_SLACK

    while len(xs) > 5 and ds[-1] * ds[-2] > 0.0 and edge_ratio_bad(-2, -1):
        xs.pop(); ds.pop()
    while len(xs) > 5 and ds[0] * ds[1] > 0.0 and edge_ratio_bad(0, 1):
        xs.pop(0); ds.pop(0)
    if len(xs) < 5:
        raise FitInconclusiveError(
            f"only {len(xs)} usable rungs; adjust the ladder or the "
            f"integrator tolerance")
    signs = {1 if d > 0 else -1 for d in ds}
    if len(signs) != 1:
        raise FitInconclusiveError("displacement changes sign along the ladder")
    sign = signs.pop()
    lx = [math.log(x) for x in xs]
    ly = [math.log(abs(d)) for d in ds]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    sxx = sum((x - mx) ** 2 for x in lx)
    sxy = sum((x - mx) * (y - my) for x, y in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(lx, ly))
    ss_tot = sum((y - my) ** 2 for y in ly)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    confident = abs(slope - expected) <= 0.1 and r2 >= 0.999
    if not confident:
        raise FitInconclusiveError(
            f"log-log slope {slope:.3f} (R^2 {r2:.5f}) does not match the "
            f"expected power {expected}")
    return OracleResult(sign=sign, coefficient=sign * math.exp(intercept),
                        slope=slope, r2=r2, n_points=n, confident=confident)
