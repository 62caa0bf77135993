"""Reduction of the planar model to a Lienard system around a steady state.

Shifting a steady state (u0, v0) to the origin with x = u - u0,
y = du/dt turns the model into

    dx/dt = y,   dy/dt = p(x) + y*q(x),

with

    p(x) = c + (a-b)*phi(u0 + x) - u0 - x,
    q(x) = -2 + 4a*phi(u0 + x)*(1 - phi(u0 + x)).

All x-derivatives of p and q reduce to derivatives of the logistic
function, and those satisfy the exact polynomial recurrence

    phi' = P1(phi),  P1(s) = 4s(1-s),  P_{k+1} = P_k' * P1,

so the Taylor coefficients of p and q at the origin come out in closed
form, with no differencing.  That exactness is what makes the high-order
focal quantities (which involve 6th/7th order terms) computable at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Equilibrium, Params, sigmoid

__all__ = [
    "LienardCoeffs",
    "HopfPoint",
    "MAX_P_ORDER",
    "MAX_Q_ORDER",
    "sigmoid_derivative_polys",
    "eval_poly",
    "to_lienard",
    "taylor_coeffs",
    "hopf_manifold",
]

# Orders fixed at what the third focal quantity needs, plus one guard
# order on p for the numerical oracle.
MAX_P_ORDER = 7
MAX_Q_ORDER = 6


@dataclass(frozen=True)
class LienardCoeffs:
    """Taylor data of the reduced system at a steady state.

    ``p[k-1]`` and ``q[k-1]`` hold the coefficients of x**k (so p covers
    x^1..x^7 and q covers x^1..x^6).  ``theta = exp(4*u0)`` and
    ``d = a - b`` are carried along because every closed-form focal
    quantity is a polynomial in exactly these two.
    """

    p: tuple[float, ...]
    q: tuple[float, ...]
    theta: float
    d: float

    @property
    def p1(self) -> float:
        return self.p[0]


@dataclass(frozen=True)
class HopfPoint:
    """Point of the zero-trace manifold, parametrized by (u0, b).

    a = (1+theta)^2/(2*theta) with theta = exp(4*u0) forces the trace to
    vanish at the steady state u0, and c places the steady state there.
    ``is_focus`` records whether the determinant is positive (a genuine
    complex focus rather than a double-zero point).
    """

    u0: float
    theta: float
    a: float
    b: float
    c: float
    is_focus: bool

    @property
    def params(self) -> Params:
        return Params(a=self.a, b=self.b, c=self.c)


def sigmoid_derivative_polys(n: int) -> list[list[int]]:
    """Polynomials P_1..P_n with phi^(k)(u) = P_k(phi(u)).

    Coefficient lists are in ascending powers of s and exactly integer:
    P1 = 4s - 4s^2 and the recurrence P_{k+1} = P_k' * P1 preserves
    integrality.  Every P_k vanishes at s = 0 and s = 1.
    """
    if not 1 <= n <= MAX_P_ORDER + 1:
        raise ValueError(f"order must be in 1..{MAX_P_ORDER + 1}, got {n}")
    p1 = [0, 4, -4]
    polys = [p1]
    for _ in range(n - 1):
        prev = polys[-1]
        deriv = [k * ck for k, ck in enumerate(prev)][1:]
        nxt = [0] * (len(deriv) + len(p1) - 1)
        for i, di in enumerate(deriv):
            if di:
                for j, pj in enumerate(p1):
                    nxt[i + j] += di * pj
        polys.append(nxt)
    return polys


def eval_poly(coeffs: list[int], s: float) -> float:
    """Horner evaluation of an ascending-power coefficient list."""
    acc = 0.0
    for ck in reversed(coeffs):
        acc = acc * s + ck
    return acc


_POLYS = sigmoid_derivative_polys(MAX_P_ORDER + 1)


def to_lienard(p: Params, eq: Equilibrium):
    """Return the reduced system's (p(x), q(x)) as evaluable closures."""
    a, b, c, u0 = p.a, p.b, p.c, eq.u0

    def p_func(x: float) -> float:
        return c + (a - b) * sigmoid(u0 + x) - u0 - x

    def q_func(x: float) -> float:
        s = sigmoid(u0 + x)
        return -2.0 + 4.0 * a * s * (1.0 - s)

    return p_func, q_func


def taylor_coeffs(p: Params, eq: Equilibrium) -> LienardCoeffs:
    """Exact Taylor coefficients of p and q at the steady state.

    p_k = (a-b)*P_k(s)/k! for k >= 2 and p_1 = (a-b)*P_1(s) - 1;
    q_k = a*P_{k+1}(s)/k!, with s = phi(u0).  Exact up to floating-point
    rounding of the polynomial evaluation.
    """
    d = p.a - p.b
    s = sigmoid(eq.u0)
    vals = [eval_poly(poly, s) for poly in _POLYS]
    fact = 1.0
    pc = []
    qc = []
    for k in range(1, MAX_P_ORDER + 1):
        fact *= k
        coeff = d * vals[k - 1] / fact
        pc.append(coeff - 1.0 if k == 1 else coeff)
        if k <= MAX_Q_ORDER:
            qc.append(p.a * vals[k] / fact)
    return LienardCoeffs(p=tuple(pc), q=tuple(qc),
                         theta=math.exp(4.0 * eq.u0), d=d)


def hopf_manifold(u0: float, b: float) -> HopfPoint:
    """Construct the zero-trace parameter point over (u0, b).

    a = (1+theta)^2/(2*theta) >= 2 (minimum at u0 = 0), and
    c = (b-a)*phi(u0) + u0 puts the steady state at u0.  The focus
    inequality 4(a-b)*theta/(1+theta)^2 < 1 reduces to b > a/2.
    """
    if b <= 0.0:
        raise ValueError(f"b must be positive, got {b}")
    theta = math.exp(4.0 * u0)
    a = (1.0 + theta) ** 2 / (2.0 * theta)
    c = (b - a) * sigmoid(u0) + u0
    p1 = 4.0 * (a - b) * theta / (1.0 + theta) ** 2 - 1.0
    return HopfPoint(u0=u0, theta=theta, a=a, b=b, c=c, is_focus=p1 < 0.0)
