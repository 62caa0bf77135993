"""Analytic bifurcation curves and numerical parameter-plane scans.

The local bifurcation sets of the model have closed parametrizations:
saddle-node curves by the fold abscissa u0, zero-trace (Andronov-Hopf)
lines by u0 with b free, their degenerate points by the curve parameter
vartheta, and double-zero (Bogdanov-Takens) points by the a = 2b
condition.  The fold-of-cycles curves have no formula and are located by
bisection on the limit-cycle count; region maps classify a (b, c) grid at
fixed a into symbolic portrait codes.  Together these reconstruct the
parameter-plane diagram as data (curve polylines, point sets, and a cell
map) rather than as a picture.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import CycleStability, LimitCycle, find_cycles
from .lienard import hopf_manifold
from .lyapunov import bautin_curve, l2bar
from .model import Params, bt_condition, equilibria, fold_residual, sigmoid
from .portrait import DegenerateParametersError, classify_portrait

__all__ = [
    "CurveKind",
    "CurveSample",
    "RegionMap",
    "CountNotMonotoneError",
    "NoHopfError",
    "sn_curve",
    "hopf_curve",
    "bautin_points",
    "bt_points",
    "snpo_locate",
    "region_scan",
    "curves_to_csv",
]

DEGENERATE_MARK = "degenerate"
FAILED_MARK = "failed"


class CountNotMonotoneError(RuntimeError):
    """More than one cycle-count transition inside the search segment."""


class NoHopfError(ValueError):
    """The slice a = const misses the zero-trace manifold (a < 2)."""


class CurveKind(Enum):
    SADDLE_NODE = "saddle_node"
    HOPF = "hopf"
    BAUTIN = "bautin"
    BOGDANOV_TAKENS = "bogdanov_takens"
    DOUBLE_CYCLE = "double_cycle"


@dataclass(frozen=True)
class CurveSample:
    """One point of a bifurcation set.

    ``aux`` is the parametrization value (u0 for folds/Hopf/BT, vartheta
    for Bautin points, None for located double cycles); ``residuals``
    hold the defining equations evaluated at the sample; ``l2bar`` is
    attached to Bautin points and to nothing else.
    """

    kind: CurveKind
    params: Params
    aux: float | None = None
    residuals: tuple[float, ...] = ()
    l2bar: float | None = None
    merged_pair: str | None = None
    is_focus: bool | None = None


def sn_curve(a: float, u0_range: tuple[float, float] | None = None,
             n: int = 200) -> list[CurveSample]:
    """Saddle-node curve at fixed a, parametrized by the fold abscissa.

    f'(u0) = 0 gives b = a - 1/(4*phi(1-phi)) and f(u0) = 0 then gives
    c = u0 - (a-b)*phi(u0).  Samples with b <= 0 fall outside the
    parameter domain and are dropped; the two u0 branches (phi above and
    below 1/2) merge at u0 = 0 where a - b = 1 (the fold-set cusp).
    """
    if u0_range is None:
        if a <= 1.0:
            return []
        # b > 0 bound: 4*phi*(1-phi) > 1/a
        phi_hi = 0.5 * (1.0 + math.sqrt(1.0 - 1.0 / a)) if a > 1.0 else 0.5
        lim = 0.25 * math.log(phi_hi / (1.0 - phi_hi))
        u0_range = (-lim + 1e-9, lim - 1e-9)
    out = []
    for u0 in np.linspace(u0_range[0], u0_range[1], n):
        s = sigmoid(u0)
        w = s * (1.0 - s)
        b = a - 1.0 / (4.0 * w)
        if b <= 0.0:
            continue
        c = u0 - (a - b) * s
        p = Params(a=a, b=b, c=c)
        out.append(CurveSample(kind=CurveKind.SADDLE_NODE, params=p,
                               aux=float(u0), residuals=fold_residual(p, u0)))
    return out


def hopf_curve(a_fixed: float, b_range: tuple[float, float] | None = None,
               n: int = 200) -> list[CurveSample]:
    """Zero-trace lines at fixed a: straight lines in the (b, c) plane.

    a = (1+theta)^2/(2*theta) >= 2, so the slice is empty below a = 2 and
    has two reciprocal theta branches above; each branch sweeps b with
    c = (b-a)*phi(u0) + u0.  ``is_focus`` marks the samples where the
    determinant is positive (b > a/2).
    """
    if a_fixed < 2.0:
        raise NoHopfError(f"no zero-trace set for a < 2, got a={a_fixed}")
    root = math.sqrt(max(0.0, (a_fixed - 1.0) ** 2 - 1.0))
    thetas = {a_fixed - 1.0 + root, a_fixed - 1.0 - root}
    if b_range is None:
        b_range = (max(1e-6, a_fixed / 2.0 - 10.0), 2.0 * a_fixed + 30.0)
    out = []
    for theta in sorted(thetas):
        u0 = 0.25 * math.log(theta)
        for b in np.linspace(b_range[0], b_range[1], n):
            hp = hopf_manifold(u0, float(b))
            p = hp.params
            eqr = u0 - (p.a - p.b) * sigmoid(u0) - p.c
            trace = -2.0 + 4.0 * p.a * sigmoid(u0) * (1.0 - sigmoid(u0))
            out.append(CurveSample(kind=CurveKind.HOPF, params=p, aux=u0,
                                   residuals=(eqr, trace),
                                   is_focus=hp.is_focus))
    return out


def bautin_points(a_fixed: float) -> list[CurveSample]:
    """Degenerate-Hopf points on the slice a = a_fixed.

    Intersects the l1 = 0 curve with the slice: vartheta solves
    (1+v)^2/(2v) = a, a reciprocal pair.  The sign of l2bar is attached;
    it decides on which side the cycle fold emanates.  Empty for
    a_fixed <= 2 (at 2 the only solution is the excluded v = 1).
    """
    if a_fixed <= 2.0:
        return []
    root = math.sqrt((a_fixed - 1.0) ** 2 - 1.0)
    out = []
    for v in (a_fixed - 1.0 - root, a_fixed - 1.0 + root):
        if abs(v - 1.0) < 1e-12:
            continue  # a barely above 2: the excluded degenerate endpoint
        bp = bautin_curve(v)
        p = bp.params
        eqr = bp.u0 - (p.a - p.b) * sigmoid(bp.u0) - p.c
        trace = -2.0 + 4.0 * p.a * sigmoid(bp.u0) * (1.0 - sigmoid(bp.u0))
        out.append(CurveSample(kind=CurveKind.BAUTIN, params=p, aux=v,
                               residuals=(eqr, trace), l2bar=l2bar(v)))
    return out


def bt_points(a_fixed: float) -> list[CurveSample]:
    """Double-zero points on the slice: fold + zero trace force a = 2b.

    Requires a >= 2 for real fold abscissas; returns the symmetric pair.
    """
    if a_fixed < 2.0:
        return []
    b = a_fixed / 2.0
    disc = 1.0 - 2.0 / a_fixed
    out = []
    for phi in (0.5 * (1.0 - math.sqrt(disc)), 0.5 * (1.0 + math.sqrt(disc))):
        if not 0.0 < phi < 1.0:
            continue
        u0 = 0.25 * math.log(phi / (1.0 - phi))
        c = u0 - (a_fixed - b) * phi
        p = Params(a=a_fixed, b=b, c=c)
        out.append(CurveSample(kind=CurveKind.BOGDANOV_TAKENS, params=p,
                               aux=u0, residuals=bt_condition(p, u0)))
    return out


def _focus_cycle_count(p: Params, r_max: float, n_grid: int) -> tuple[int, list[LimitCycle]]:
    eqs = equilibria(p)
    if len(eqs) != 1:
        raise ValueError("double-cycle location expects a unique steady state")
    cycles = find_cycles(p, eqs[0], r_max, n_grid=n_grid)
    regular = [cyc for cyc in cycles if cyc.stability is not CycleStability.SEMI_STABLE]
    return len(regular), cycles


def snpo_locate(p_start: Params, p_end: Params, tol: float,
                r_max: float = 50.0, n_grid: int = 200) -> CurveSample:
    """Bisect a parameter segment on the limit-cycle count.

    The endpoints must differ by exactly two cycles (a fold of cycles
    annihilates a stable-unstable pair).  Returns the bracket midpoint
    once the parameter-space bracket is shorter than tol, tagged with
    which pair merged: "inner" (double cycle stable from inside) or
    "outer" (stable from outside).  Raises CountNotMonotoneError when a
    midpoint count falls outside the endpoint counts, which signals more
    than one transition in the segment.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    n_lo, _ = _focus_cycle_count(p_start, r_max, n_grid)
    n_hi, _ = _focus_cycle_count(p_end, r_max, n_grid)
    if abs(n_lo - n_hi) != 2:
        raise ValueError(
            f"endpoint cycle counts must differ by 2, got {n_lo} and {n_hi}")
    lo = np.array([p_start.a, p_start.b, p_start.c])
    hi = np.array([p_end.a, p_end.b, p_end.c])
    rich_count = max(n_lo, n_hi)
    rich = lo if n_lo > n_hi else hi
    while float(np.linalg.norm(hi - lo)) > tol:
        mid = 0.5 * (lo + hi)
        n_mid, _ = _focus_cycle_count(Params(*mid), r_max, n_grid)
        if n_mid not in (n_lo, n_hi):
            raise CountNotMonotoneError(
                f"cycle count {n_mid} at segment midpoint is outside "
                f"({n_lo}, {n_hi}); subdivide the segment")
        if n_mid == n_lo:
            lo = mid
        else:
            hi = mid
        if n_mid == rich_count:
            rich = mid
    mid = 0.5 * (lo + hi)
    # Identify the merging pair on the cycle-rich side of the bracket: the
    # closest pair of radii when three cycles survive, the only pair when
    # two do.  A (stable, unstable) pair collapses onto a double cycle
    # stable from inside ("inner"); (unstable, stable) gives one stable
    # from outside ("outer").
    _, cycles = _focus_cycle_count(
        Params(float(rich[0]), float(rich[1]), float(rich[2])), r_max, n_grid)
    merged = None
    regular = [cyc for cyc in cycles if cyc.stability is not CycleStability.SEMI_STABLE]
    if len(regular) >= 2:
        i = 0
        if len(regular) > 2:
            gaps = [regular[j + 1].radius - regular[j].radius
                    for j in range(len(regular) - 1)]
            i = gaps.index(min(gaps))
        merged = ("inner" if regular[i].stability is CycleStability.STABLE
                  else "outer")
    return CurveSample(kind=CurveKind.DOUBLE_CYCLE,
                       params=Params(float(mid[0]), float(mid[1]), float(mid[2])),
                       aux=None, merged_pair=merged)


@dataclass(frozen=True)
class RegionMap:
    """Portrait codes over a (b, c) grid at fixed a.

    ``codes[i][j]`` is the code string at (b_values[i], c_values[j]), or
    one of the ``degenerate``/``failed`` markers; degenerate cells are
    data, not errors.
    """

    a: float
    b_values: np.ndarray
    c_values: np.ndarray
    codes: tuple[tuple[str, ...], ...]

    def distinct_codes(self) -> set[str]:
        return {code for row in self.codes for code in row
                if code not in (DEGENERATE_MARK, FAILED_MARK)}

    def to_csv(self, file) -> None:
        """Grid as CSV: header row of c values, one row per b value."""
        close = False
        if not hasattr(file, "write"):
            file = open(file, "w", newline="")
            close = True
        try:
            header = ",".join(f"{c:.17g}" for c in self.c_values)
            file.write("b\\c," + header + "\r\n")
            for b, row in zip(self.b_values, self.codes):
                file.write(f"{b:.17g}," + ",".join(row) + "\r\n")
        finally:
            if close:
                file.close()

    def legend_json(self) -> str:
        counts: dict[str, int] = {}
        for row in self.codes:
            for code in row:
                counts[code] = counts.get(code, 0) + 1
        legend = {
            "a": self.a,
            "b_range": [float(self.b_values[0]), float(self.b_values[-1])],
            "c_range": [float(self.c_values[0]), float(self.c_values[-1])],
            "resolution": [len(self.b_values), len(self.c_values)],
            "codes": dict(sorted(counts.items())),
            "markers": {"degenerate": DEGENERATE_MARK, "failed": FAILED_MARK},
        }
        return json.dumps(legend, indent=2, sort_keys=True)


def _classify_cell(args) -> str:
    a, b, c, r_max, n_grid = args
    try:
        code = classify_portrait(Params(a=a, b=b, c=c), r_max, n_grid=n_grid)
        return str(code)
    except DegenerateParametersError:
        return DEGENERATE_MARK
    except Exception:
        return FAILED_MARK


def region_scan(a_fixed: float, b_range: tuple[float, float],
                c_range: tuple[float, float],
                resolution: int | tuple[int, int],
                r_max: float | None = None, n_grid: int = 120,
                jobs: int = 1) -> RegionMap:
    """Classify a (b, c) grid at fixed a into portrait codes.

    Cells where classification refuses (near a bifurcation set) are
    marked degenerate; unexpected per-cell failures are marked failed.
    Work items are independent; ``jobs > 1`` runs them on a process pool
    with a deterministic merge by grid index.
    """
    nb, nc = (resolution, resolution) if isinstance(resolution, int) else resolution
    if nb < 2 or nc < 2 or b_range[0] >= b_range[1] or c_range[0] >= c_range[1]:
        raise ValueError("need positive extents and at least 2x2 resolution")
    b_values = np.linspace(b_range[0], b_range[1], nb)
    c_values = np.linspace(c_range[0], c_range[1], nc)
    tasks = [(a_fixed, float(b), float(c), r_max, n_grid)
             for b in b_values for c in c_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(_classify_cell, tasks, chunksize=8))
    else:
        flat = [_classify_cell(t) for t in tasks]
    codes = tuple(tuple(flat[i * nc:(i + 1) * nc]) for i in range(nb))
    return RegionMap(a=a_fixed, b_values=b_values, c_values=c_values, codes=codes)


def curves_to_csv(samples: list[CurveSample], file) -> None:
    """Flat CSV export of curve samples: kind, aux, a, b, c, residuals, l2bar."""
    close = False
    if not hasattr(file, "write"):
        file = open(file, "w", newline="")
        close = True
    try:
        file.write("kind,aux,a,b,c,res1,res2,res3,l2bar,is_focus,merged_pair\r\n")
        for s in samples:
            res = list(s.residuals) + [None] * (3 - len(s.residuals))
            cells = [
                s.kind.value,
                "" if s.aux is None else f"{s.aux:.17g}",
                f"{s.params.a:.17g}", f"{s.params.b:.17g}", f"{s.params.c:.17g}",
            ]
            cells += ["" if r is None else f"{r:.17g}" for r in res[:3]]
            cells.append("" if s.l2bar is None else f"{s.l2bar:.17g}")
            cells.append("" if s.is_focus is None else str(s.is_focus).lower())
            cells.append(s.merged_pair or "")
            file.write(",".join(cells) + "\r\n")
    finally:
        if close:
            file.close()
