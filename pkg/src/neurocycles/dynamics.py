"""Trajectory integration, Poincare return maps, and limit-cycle detection.

Limit cycles are located by shooting: the displacement g(r) = P(r) - r of
the first-return map on a ray from an anchor point changes sign exactly
at a cycle crossing, so a log-spaced radius scan plus bracket refinement
recovers every cycle the ray meets transversally.  Same-sign dips of g
between grid points are resolved by minimizing the signed dip: a crossing
dip recovers a nearly-merged cycle pair the grid stepped over, and a
non-crossing dip that bottoms out near zero is the semi-stable double
cycle living on the fold-of-cycles curves of the parameter plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernel
from .model import Equilibrium, EquilibriumKind, Params, State

__all__ = [
    "TerminationReason",
    "Trajectory",
    "SectionRay",
    "CycleStability",
    "LimitCycle",
    "NoReturnError",
    "StepSizeUnderflowError",
    "integrate",
    "poincare_return",
    "find_cycles",
    "big_cycle_scan",
    "cycle_enclosure",
    "cycle_r_max",
]

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_T_MAX = 500.0
DEFAULT_GRID = 200
DEFAULT_R_MIN = 1e-4


class StepSizeUnderflowError(RuntimeError):
    """Step size collapsed or the state left the finite plane."""


class NoReturnError(RuntimeError):
    """The orbit never returned to the section.

    ``reason`` is "converged" (settled at an equilibrium) or "time_limit"
    (no full turn within t_max).  Reported, not fatal: cycle scans treat
    the two cases differently.
    """

    def __init__(self, reason: str, t: float):
        super().__init__(f"no return ({reason}) after t={t:.6g}")
        self.reason = reason
        self.t = t


class TerminationReason(Enum):
    TIME_LIMIT = "time_limit"
    CONVERGED = "converged"
    ESCAPED = "escaped"


@dataclass(frozen=True)
class Trajectory:
    """Integrated orbit samples with the tolerances that produced them."""

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    rtol: float
    atol: float
    reason: TerminationReason

    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.t.tolist(), self.u.tolist(), self.v.tolist()))

    def to_csv(self, file) -> None:
        """Write t,u,v rows (17 significant digits) to a path or stream."""
        close = False
        if not hasattr(file, "write"):
            file = open(file, "w", newline="")
            close = True
        try:
            file.write("t,u,v\r\n")
            for t, u, v in zip(self.t, self.u, self.v):
                file.write(f"{t:.17g},{u:.17g},{v:.17g}\r\n")
        finally:
            if close:
                file.close()


@dataclass(frozen=True)
class SectionRay:
    """Half-line section for return maps.

    ``origin`` is normally the focus whose cycles are being scanned (the
    big-cycle scan anchors it at the equilibrium centroid instead).
    ``orientation`` fixes the admitted sign of the transversal velocity at
    crossings; 0 infers it from the departure direction.
    """

    origin: State
    direction: tuple[float, float] = (1.0, 0.0)
    orientation: int = 0

    def __post_init__(self):
        dx, dy = self.direction
        nrm = math.hypot(dx, dy)
        if nrm == 0.0:
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "direction", (dx / nrm, dy / nrm))

    @classmethod
    def at_angle(cls, origin: State, angle: float, orientation: int = 0) -> "SectionRay":
        return cls(origin=origin, direction=(math.cos(angle), math.sin(angle)),
                   orientation=orientation)


class CycleStability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SEMI_STABLE = "semi_stable"


@dataclass(frozen=True)
class LimitCycle:
    """Cycle located as a fixed point of the ray return map."""

    radius: float
    period: float
    stability: CycleStability
    floquet_slope: float


def _check_tols(rtol: float, atol: float) -> None:
    if not (0.0 < rtol <= 1e-3 and 0.0 < atol <= 1e-3):
        raise ValueError(f"tolerances must be in (0, 1e-3], got rtol={rtol}, atol={atol}")


def integrate(p: Params, s0: State, t_end: float,
              rtol: float = 1e-9, atol: float = DEFAULT_ATOL,
              t_eval=None, stop_at_equilibrium: bool = False,
              max_steps: int = 5_000_000, max_step: float = 0.0) -> Trajectory:
    """Integrate the model from s0 over [0, t_end].

    Adaptive 5(4) embedded Runge-Kutta with dense output; deterministic
    for fixed inputs.  Samples fall at the accepted steps unless
    ``t_eval`` requests specific times.  Raises StepSizeUnderflowError on
    step collapse or blowup (not expected for this vector field, whose
    linear part is contracting and whose nonlinearity is bounded).
    """
    if t_end <= 0.0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    _check_tols(rtol, atol)
    if t_eval is not None:
        t_eval = np.asarray(t_eval, dtype=float)
        if np.any(t_eval < 0.0) or np.any(t_eval > t_end) or np.any(np.diff(t_eval) <= 0.0):
            raise ValueError("t_eval must be increasing within [0, t_end]")
    t, u, v, status = kernel.integrate_path(
        kernel.FIELD_MODEL, p.a, p.b, p.c, 0.0, s0.u, s0.v, t_end,
        rtol, atol, max_steps=max_steps, t_eval=t_eval,
        stop_at_equilibrium=stop_at_equilibrium, max_step=max_step)
    if status == kernel.STATUS_UNDERFLOW:
        raise StepSizeUnderflowError(
            f"integration stalled at t={t[-1] if len(t) else 0.0:.6g}")
    reason = (TerminationReason.CONVERGED if status == kernel.STATUS_CONVERGED
              else TerminationReason.TIME_LIMIT)
    return Trajectory(t=t, u=u, v=v, rtol=rtol, atol=atol, reason=reason)


def poincare_return(p: Params, ray: SectionRay, r: float,
                    rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                    t_max: float = DEFAULT_T_MAX) -> tuple[float, float]:
    """(P(r), return time) of the first return to the ray.

    The departure crossing is excluded by construction: the return event
    is a full winding turn around the ray origin, located on the dense
    output to a section-coordinate residual below 1e-12.  Raises
    NoReturnError when the orbit settles at an equilibrium or fails to
    complete a turn within t_max.
    """
    if r <= 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    _check_tols(rtol, atol)
    dx, dy = ray.direction
    r_next, period, status, _resid = kernel.ray_return(
        kernel.FIELD_MODEL, p.a, p.b, p.c, 0.0,
        ray.origin.u, ray.origin.v, dx, dy, r, rtol, atol,
        t_max=t_max, orientation=ray.orientation)
    if status == kernel.STATUS_OK:
        return r_next, period
    if status == kernel.STATUS_CONVERGED:
        raise NoReturnError("converged", period)
    if status == kernel.STATUS_TMAX:
        raise NoReturnError("time_limit", period)
    raise StepSizeUnderflowError(f"return map integration stalled at t={period:.6g}")


def cycle_r_max(p: Params, eq: Equilibrium, cap: float = 50.0) -> float:
    """Default outer scan radius for cycles around eq.

    10x the farthest intersection of the u-nullcline with the section
    line through the focus (both directions), capped.  The system is
    eventually inward so cycles live at moderate radii.
    """
    # u-nullcline along v = v0: u = a*phi(u) - b*v0 + c; bracket and bisect
    # on both sides of u0.
    base = p.c - p.b * eq.v0

    def resid(u: float) -> float:
        return u - p.a * _phi(u) - base

    far = 1.0
    for lo, hi in ((eq.u0 - 1e3, eq.u0), (eq.u0, eq.u0 + 1e3)):
        glo, ghi = resid(lo), resid(hi)
        if glo * ghi > 0.0:
            continue
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            gm = resid(mid)
            if gm * glo <= 0.0:
                hi = mid
            else:
                lo, glo = mid, gm
        far = max(far, abs(0.5 * (lo + hi) - eq.u0))
    return min(cap, 10.0 * far)


def _phi(u: float) -> float:
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-4.0 * u))
    e = math.exp(4.0 * u)
    return e / (1.0 + e)


class _Displacement:
    """Displacement g(r) = P(r) - r with no-return bookkeeping.

    An orbit that sinks into an equilibrium well inside the launch radius
    is treated as g = -r (collapsed inward), which keeps brackets
    meaningful around cycles enclosing a non-rotating node.  An orbit
    that settles at a distant attractor instead (it escaped the anchor's
    winding neighborhood sideways) carries no displacement information,
    and is recorded as None like a time-limit failure; brackets never
    span such points.
    """

    def __init__(self, p: Params, ray: SectionRay, rtol: float, atol: float,
                 t_max: float):
        self.p = p
        self.ray = ray
        self.rtol = rtol
        self.atol = atol
        self.t_max = t_max
        self.periods: dict[float, float] = {}

    def __call__(self, r: float) -> float | None:
        dx, dy = self.ray.direction
        r_next, period, status, _resid = kernel.ray_return(
            kernel.FIELD_MODEL, self.p.a, self.p.b, self.p.c, 0.0,
            self.ray.origin.u, self.ray.origin.v, dx, dy, r,
            self.rtol, self.atol, t_max=self.t_max,
            orientation=self.ray.orientation)
        if status == kernel.STATUS_OK:
            self.periods[r] = period
            return r_next - r
        if status == kernel.STATUS_CONVERGED:
            return -r if r_next <= 0.5 * r else None
        if status == kernel.STATUS_TMAX:
            return None
        raise StepSizeUnderflowError(f"return map stalled at r={r:.6g}")


def _refine_root(g: _Displacement, ra: float, ga: float, rb: float, gb: float,
                 rel_tol: float) -> tuple[float, float]:
    """Bisection with secant acceleration on a sign-change bracket."""
    gm = 0.0
    for _ in range(120):
        mid = 0.5 * (ra + rb)
        if gb != ga:
            sec = rb - gb * (rb - ra) / (gb - ga)
            if ra + 0.05 * (rb - ra) < sec < rb - 0.05 * (rb - ra):
                mid = sec
        gm = g(mid)
        if gm is None:
            mid = 0.5 * (ra + rb)
            gm = g(mid)
            if gm is None:
                break
        if abs(gm) < rel_tol * mid or (rb - ra) < 1e-13 * mid:
            return mid, gm
        if (ga > 0.0) == (gm > 0.0):
            ra, ga = mid, gm
        else:
            rb, gb = mid, gm
    return 0.5 * (ra + rb), gm


def _golden_min(g: _Displacement, ra: float, rb: float,
                sign: float) -> tuple[float, float]:
    """Golden-section minimum of sign*g on [ra, rb]; returns (r, g(r)).

    Minimizing the signed dip (rather than |g|) keeps the search unimodal
    when the dip bottom crosses zero, which is how a nearly-merged cycle
    pair looks to a coarse grid.
    """

    def dip(r: float) -> float:
        gv = g(r)
        return math.inf if gv is None else sign * gv

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = rb - invphi * (rb - ra)
    x2 = ra + invphi * (rb - ra)
    f1 = dip(x1)
    f2 = dip(x2)
    for _ in range(60):
        if rb - ra < 1e-11 * max(1.0, ra):
            break
        if f1 <= f2:
            rb, x2, f2 = x2, x1, f1
            x1 = rb - invphi * (rb - ra)
            f1 = dip(x1)
        else:
            ra, x1, f1 = x1, x2, f2
            x2 = ra + invphi * (rb - ra)
            f2 = dip(x2)
    return (x1, sign * f1) if f1 <= f2 else (x2, sign * f2)


def _scan_cycles(g: _Displacement, r_min: float, r_max: float, n_grid: int,
                 refine_rel: float, semi_rel: float,
                 max_densify: int = 2) -> list[LimitCycle]:
    for attempt in range(max_densify + 1):
        n = n_grid * 2**attempt
        radii = np.geomspace(r_min, r_max, n)
        vals = [g(r) for r in radii]
        change_idx = []
        prev_i = None
        for i, gv in enumerate(vals):
            if gv is None:
                continue
            if prev_i is not None and prev_i == i - 1 and vals[prev_i] * gv < 0.0:
                change_idx.append(i)
            prev_i = i
        if len(change_idx) < 2 or min(np.diff(change_idx)) >= 3:
            break
        # two sign changes within 3 cells: densify and rescan
    cycles = []

    def emit_root(ra, ga, rb, gb):
        root, _g_root = _refine_root(g, ra, ga, rb, gb, refine_rel)
        delta = max(1e-5 * root, 1e-7 * abs(rb - ra))
        g_lo = g(root - delta)
        g_hi = g(root + delta)
        if g_lo is None or g_hi is None:
            g_lo, g_hi = ga, gb
            delta = 0.5 * (rb - ra)
        slope = 1.0 + (g_hi - g_lo) / (2.0 * delta)
        stability = CycleStability.STABLE if ga > 0.0 else CycleStability.UNSTABLE
        period = g.periods.get(root)
        if period is None:
            g(root)
            period = g.periods.get(root, math.nan)
        cycles.append(LimitCycle(radius=root, period=period,
                                 stability=stability, floquet_slope=slope))

    for i in change_idx:
        emit_root(float(radii[i - 1]), float(vals[i - 1]),
                  float(radii[i]), float(vals[i]))
    # Same-sign dips of g between grid points hide either a nearly-merged
    # cycle pair (dip bottom crosses zero) or a genuine double cycle (dip
    # bottom tangent to zero).  Resolve each by minimizing the signed dip.
    for i in range(1, len(vals) - 1):
        triple = vals[i - 1], vals[i], vals[i + 1]
        if any(t is None for t in triple):
            continue
        if triple[0] * triple[1] < 0.0 or triple[1] * triple[2] < 0.0:
            continue
        if abs(triple[1]) < abs(triple[0]) and abs(triple[1]) < abs(triple[2]):
            sgn = 1.0 if triple[1] > 0.0 else -1.0
            r_t, g_t = _golden_min(g, float(radii[i - 1]), float(radii[i + 1]), sgn)
            if g_t * sgn < 0.0:
                # hidden pair: the dip crosses zero between the grid points
                emit_root(float(radii[i - 1]), float(triple[0]), r_t, g_t)
                emit_root(r_t, g_t, float(radii[i + 1]), float(triple[2]))
            elif abs(g_t) < semi_rel * r_t:
                period = g.periods.get(r_t, math.nan)
                cycles.append(LimitCycle(radius=r_t, period=period,
                                         stability=CycleStability.SEMI_STABLE,
                                         floquet_slope=1.0))
    cycles.sort(key=lambda cyc: cyc.radius)
    return cycles


def find_cycles(p: Params, eq: Equilibrium, r_max: float | None = None,
                r_min: float = DEFAULT_R_MIN, n_grid: int = DEFAULT_GRID,
                angle: float = 0.0, rtol: float = DEFAULT_RTOL,
                atol: float = DEFAULT_ATOL, t_max: float = DEFAULT_T_MAX,
                refine_rel: float = 1e-10,
                semi_rel: float = 1e-6) -> list[LimitCycle]:
    """Limit cycles around one steady state, sorted inner to outer.

    Scans the return-map displacement on a log-spaced radius grid,
    brackets every sign change, and refines each to |g| < refine_rel*r.
    Stability comes from the displacement sign on each side; brackets
    tighter than 3 grid cells trigger automatic grid doubling.  The
    anchor may be a node (returns then exist only outside any enclosing
    cycle; the inward side of such a bracket registers as collapse).
    """
    if eq.kind is EquilibriumKind.SADDLE:
        raise ValueError("cannot anchor a cycle scan at a saddle")
    if r_max is None:
        r_max = cycle_r_max(p, eq)
    if not (0.0 < r_min < r_max):
        raise ValueError(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    ray = SectionRay.at_angle(State(eq.u0, eq.v0), angle)
    g = _Displacement(p, ray, rtol, atol, t_max)
    return _scan_cycles(g, r_min, r_max, n_grid, refine_rel, semi_rel)


def _winding_around(us: np.ndarray, vs: np.ndarray, x: float, y: float) -> float:
    wx = us - x
    wy = vs - y
    ang = np.arctan2(wx[:-1] * wy[1:] - wy[:-1] * wx[1:],
                     wx[:-1] * wx[1:] + wy[:-1] * wy[1:])
    return float(np.sum(ang))


def cycle_enclosure(p: Params, anchor: State, direction: tuple[float, float],
                    cycle: LimitCycle, eqs: list[Equilibrium],
                    rtol: float = DEFAULT_RTOL,
                    atol: float = DEFAULT_ATOL) -> list[bool]:
    """Which equilibria the cycle's loop winds around.

    Integrates one period from the ray crossing and measures the winding
    number of the loop around each supplied equilibrium.  A cycle found
    on a ray from one steady state may in fact enclose all of them (the
    return map at the anchor has a fixed point wherever a cycle winds
    around the anchor), so attribution needs this check.
    """
    dx, dy = direction
    s0 = State(anchor.u + cycle.radius * dx, anchor.v + cycle.radius * dy)
    t_eval = np.linspace(0.0, cycle.period, 600)[1:]
    traj = integrate(p, s0, cycle.period, rtol=rtol, atol=atol, t_eval=t_eval)
    out = []
    for eq in eqs:
        w = _winding_around(traj.u, traj.v, eq.u0, eq.v0)
        out.append(abs(abs(w) - 2.0 * math.pi) <= 0.5)
    return out


def big_cycle_scan(p: Params, equilibria: list[Equilibrium],
                   r_max: float = 50.0, n_grid: int = DEFAULT_GRID,
                   angle: float = 0.0, rtol: float = DEFAULT_RTOL,
                   atol: float = DEFAULT_ATOL, t_max: float = 150.0,
                   refine_rel: float = 1e-10,
                   semi_rel: float = 1e-6) -> list[LimitCycle]:
    """Cycles enclosing every steady state, sorted inner to outer.

    Anchors the section at the equilibrium centroid and starts the radius
    grid just beyond the equilibrium hull, so departures are transversal.
    Candidate fixed points whose loops do not wind around all equilibria
    (local cycles large enough to enclose the centroid) are discarded.
    Delegates to find_cycles when a single equilibrium is supplied.
    """
    if not equilibria:
        raise ValueError("need at least one equilibrium")
    if len(equilibria) == 1:
        return find_cycles(p, equilibria[0], r_max, n_grid=n_grid, angle=angle,
                           rtol=rtol, atol=atol, t_max=t_max,
                           refine_rel=refine_rel, semi_rel=semi_rel)
    uc = sum(eq.u0 for eq in equilibria) / len(equilibria)
    vc = sum(eq.v0 for eq in equilibria) / len(equilibria)
    anchor = State(uc, vc)
    hull = max(math.hypot(eq.u0 - uc, eq.v0 - vc) for eq in equilibria)
    r_start = 1.02 * hull + 1e-3
    if r_start >= r_max:
        return []
    ray = SectionRay.at_angle(anchor, angle)
    g = _Displacement(p, ray, rtol, atol, t_max)
    candidates = _scan_cycles(g, r_start, r_max, n_grid, refine_rel, semi_rel)
    out = []
    for cyc in candidates:
        if not math.isfinite(cyc.period):
            continue
        if all(cycle_enclosure(p, anchor, ray.direction, cyc, equilibria,
                               rtol, atol)):
            out.append(cyc)
    return out
