"""Planar two-neuron firing-rate model and its equilibrium analysis.

The model is the three-parameter planar system

    du/dt = -u + a*phi(u) - b*v + c
    dv/dt = -v + phi(u)

with the logistic activation phi(u) = 1/(1 + exp(-4u)) and gains a, b > 0.
It is the reduction of a five-parameter two-cell network obtained by
rescaling the second cell's activity (see :func:`reduce_original`).

Everything in this module is a pure function of its inputs; all value types
are frozen dataclasses and safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "OriginalParams",
    "Params",
    "State",
    "EquilibriumKind",
    "Equilibrium",
    "sigmoid",
    "sigmoid_weight",
    "reduce_original",
    "vector_field",
    "mirror_state",
    "symmetry_conjugate",
    "equilibrium_residual",
    "equilibria",
    "classify_equilibrium",
    "fold_points",
    "fold_residual",
    "bt_condition",
]

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class OriginalParams:
    """Parameters of the five-parameter two-cell network."""

    q11: float
    q12: float
    q21: float
    e1: float
    e2: float

    def __post_init__(self):
        if not (self.q11 > 0 and self.q12 > 0 and self.q21 > 0):
            raise ValueError("coupling gains q11, q12, q21 must be positive")


@dataclass(frozen=True)
class Params:
    """Parameter point (a, b, c) of the reduced planar system."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"gains must be positive, got a={self.a}, b={self.b}")
        if not (math.isfinite(self.a) and math.isfinite(self.b) and math.isfinite(self.c)):
            raise ValueError("parameters must be finite")


@dataclass(frozen=True)
class State:
    """Phase-plane point (u, v)."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError("state components must be finite")


class EquilibriumKind(Enum):
    STABLE_NODE = "stable_node"
    UNSTABLE_NODE = "unstable_node"
    STABLE_FOCUS = "stable_focus"
    UNSTABLE_FOCUS = "unstable_focus"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"

    @property
    def is_stable(self) -> bool:
        return self in (EquilibriumKind.STABLE_NODE, EquilibriumKind.STABLE_FOCUS)


@dataclass(frozen=True)
class Equilibrium:
    """Steady state (u0, v0) with its linearization data."""

    u0: float
    v0: float
    kind: EquilibriumKind
    trace: float
    det: float


def sigmoid(u: float) -> float:
    """Logistic activation 1/(1 + exp(-4u)).

    Branches on the sign of u so that exp never overflows; the result is
    always in [0, 1] (reaching the endpoints only by floating-point
    rounding for |u| large).
    """
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-4.0 * u))
    e = math.exp(4.0 * u)
    return e / (1.0 + e)


def sigmoid_weight(u: float) -> float:
    """phi(u)*(1 - phi(u)), the factor carried by every Jacobian entry."""
    s = sigmoid(u)
    return s * (1.0 - s)


def reduce_original(p: OriginalParams):
    """Reduce the five-parameter network to the three-parameter system.

    Returns the reduced ``Params(a=q11, b=q12*q21, c=e1-q12*e2)`` together
    with the state map (u1, u2) -> (u, v) = (u1, (u2 - e2)/q21) that
    conjugates the two flows.
    """
    reduced = Params(a=p.q11, b=p.q12 * p.q21, c=p.e1 - p.q12 * p.e2)
    e2, q21 = p.e2, p.q21

    def state_map(u1: float, u2: float) -> State:
        return State(u=u1, v=(u2 - e2) / q21)

    return reduced, state_map


def vector_field(p: Params, s: State) -> State:
    """Right-hand side of the system evaluated at a state."""
    phi = sigmoid(s.u)
    return State(u=-s.u + p.a * phi - p.b * s.v + p.c, v=-s.v + phi)


def mirror_state(s: State) -> State:
    """Point reflection (u, v) -> (-u, 1-v) about (0, 1/2)."""
    return State(u=-s.u, v=1.0 - s.v)


def symmetry_conjugate(p: Params):
    """Conjugate parameter point under the model's point symmetry.

    If (u(t), v(t)) solves the system at (a, b, c), then
    (-u(t), 1-v(t)) solves it at (a, b, -a+b-c).  Returns the conjugate
    Params and the state involution; applying the operation twice is the
    identity, and parameter points with a-b+2c = 0 are fixed.
    """
    return Params(a=p.a, b=p.b, c=-p.a + p.b - p.c), mirror_state


def equilibrium_residual(p: Params, u: float) -> float:
    """f(u) = u - (a-b)*phi(u) - c, whose roots are the steady states."""
    return u - (p.a - p.b) * sigmoid(u) - p.c


def _fprime(p: Params, u: float) -> float:
    return 1.0 - 4.0 * (p.a - p.b) * sigmoid_weight(u)


def fold_points(p: Params) -> list[float]:
    """Critical points of f, in closed form.

    f'(u) = 1 - 4(a-b)*phi(1-phi) vanishes only when a-b > 1, at
    phi = (1 +- sqrt(1 - 1/(a-b)))/2; otherwise f is strictly increasing.
    Returned sorted by u.
    """
    d = p.a - p.b
    if d <= 1.0:
        return []
    root = math.sqrt(1.0 - 1.0 / d)
    out = []
    for phi in ((1.0 - root) / 2.0, (1.0 + root) / 2.0):
        if 0.0 < phi < 1.0:
            out.append(0.25 * math.log(phi / (1.0 - phi)))
    out.sort()
    return out


def _bisect_newton(p: Params, lo: float, hi: float, tol: float) -> float:
    """Refine a sign change of f on [lo, hi] to |f| < tol."""
    flo = equilibrium_residual(p, lo)
    fhi = equilibrium_residual(p, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    # Bisection until the bracket is narrow enough for safe Newton.
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        fm = equilibrium_residual(p, mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo < 1e-6 * (1.0 + abs(mid)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = equilibrium_residual(p, x)
        if abs(fx) < tol:
            return x
        dfx = _fprime(p, x)
        if dfx == 0.0:
            break
        step = fx / dfx
        x_new = x - step
        if not (lo <= x_new <= hi):
            x_new = 0.5 * (lo + hi)
        if equilibrium_residual(p, lo) * equilibrium_residual(p, x_new) < 0.0:
            hi = x_new
        else:
            lo = x_new
        x = x_new
    return x


def _expand_left(p: Params, hi: float) -> float:
    lo = min(hi, p.c - abs(p.a - p.b)) - 1.0
    while equilibrium_residual(p, lo) >= 0.0:
        lo -= 2.0 * (hi - lo + 1.0)
    return lo


def _expand_right(p: Params, lo: float) -> float:
    hi = max(lo, p.c + abs(p.a - p.b)) + 1.0
    while equilibrium_residual(p, hi) <= 0.0:
        hi += 2.0 * (hi - lo + 1.0)
    return hi


def equilibria(p: Params, tol: float = DEFAULT_ROOT_TOL,
               degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> list[Equilibrium]:
    """All steady states, refined to |f(u0)| < tol and classified.

    f runs from -inf to +inf, so at least one root always exists; when
    a-b > 1 the two fold points split the line into monotone intervals and
    every sign change is bracketed there, which guarantees all one-to-three
    roots are found without scanning.  A critical point sitting on the axis
    (|f| < tol) is reported as a double root with kind DEGENERATE.  With
    three roots the middle one is always a saddle.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    crit = fold_points(p)
    roots: list[float] = []
    if not crit:
        lo = _expand_left(p, 0.0)
        hi = _expand_right(p, lo)
        roots.append(_bisect_newton(p, lo, hi, tol))
    else:
        u_lo, u_hi = crit
        f_lo = equilibrium_residual(p, u_lo)
        f_hi = equilibrium_residual(p, u_hi)
        # a-b > 1 makes f increase-decrease-increase: f_lo is the local max,
        # f_hi the local min.
        if abs(f_lo) < tol:
            roots.append(u_lo)
        elif f_lo > 0.0:
            roots.append(_bisect_newton(p, _expand_left(p, u_lo), u_lo, tol))
        if f_lo > tol and f_hi < -tol:
            roots.append(_bisect_newton(p, u_lo, u_hi, tol))
        if abs(f_hi) < tol:
            if not roots or abs(roots[-1] - u_hi) > tol:
                roots.append(u_hi)
        elif f_hi < 0.0:
            roots.append(_bisect_newton(p, u_hi, _expand_right(p, u_hi), tol))
    roots.sort()
    # A tangency root has det = f' ~ 0, so classification already reports
    # the fold point of a double root as DEGENERATE.
    return [classify_equilibrium(p, u0, degeneracy_tol=degeneracy_tol) for u0 in roots]


def classify_equilibrium(p: Params, u0: float,
                         degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> Equilibrium:
    """Classify the steady state at u0 from its linearization.

    trace = -2 + 4a*phi(1-phi), det = 1 - 4(a-b)*phi(1-phi).  Boundary
    cases (|trace| or |det| below ``degeneracy_tol``) are reported as
    DEGENERATE rather than guessed.
    """
    w = sigmoid_weight(u0)
    trace = -2.0 + 4.0 * p.a * w
    det = 1.0 - 4.0 * (p.a - p.b) * w
    if abs(det) < degeneracy_tol or abs(trace) < degeneracy_tol:
        kind = EquilibriumKind.DEGENERATE
    elif det < 0.0:
        kind = EquilibriumKind.SADDLE
    elif trace * trace - 4.0 * det >= 0.0:
        kind = EquilibriumKind.STABLE_NODE if trace < 0.0 else EquilibriumKind.UNSTABLE_NODE
    else:
        kind = EquilibriumKind.STABLE_FOCUS if trace < 0.0 else EquilibriumKind.UNSTABLE_FOCUS
    return Equilibrium(u0=u0, v0=sigmoid(u0), kind=kind, trace=trace, det=det)


def fold_residual(p: Params, u0: float) -> tuple[float, float]:
    """(f(u0), f'(u0)); both vanish exactly on the saddle-node set."""
    return equilibrium_residual(p, u0), _fprime(p, u0)


def bt_condition(p: Params, u0: float) -> tuple[float, float, float]:
    """(f, f', trace) at u0; the triple vanishes at a Bogdanov-Takens point.

    Dividing the zero-trace condition 4a*phi(1-phi) = 2 by the fold
    condition 4(a-b)*phi(1-phi) = 1 shows any exact solution has a = 2b.
    """
    f, fp = fold_residual(p, u0)
    trace = -2.0 + 4.0 * p.a * sigmoid_weight(u0)
    return f, fp, trace
