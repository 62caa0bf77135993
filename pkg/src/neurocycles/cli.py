"""Command-line front end.

Every library capability is exposed as a subcommand with machine-readable
output: JSON objects (validating against the schema shipped in
``schemas/cli-output.schema.json``) or RFC-4180 CSV with full
round-trip-precision numbers.  Exit codes: 0 success, 1 numerical
failure (a reported JSON object), 2 usage error.  The only environment
knob is NEUROCYCLES_OUTPUT_DIR, which rebases relative ``-o`` paths.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .dynamics import find_cycles, integrate
from .lienard import taylor_coeffs
from .lyapunov import (
    FitInconclusiveError,
    NotAFocusError,
    bautin_curve,
    l2bar,
    lyapunov_closed,
    lyapunov_generic,
)
from .model import (
    EquilibriumKind,
    Params,
    State,
    classify_equilibrium,
    equilibria,
)
from .portrait import DegenerateParametersError, classify_portrait
from .scan import (
    bautin_points,
    bt_points,
    curves_to_csv,
    hopf_curve,
    region_scan,
    sn_curve,
)

__all__ = ["main"]


def _open_output(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    base = os.environ.get("NEUROCYCLES_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    return open(path, "w", newline=""), True


def _emit_json(obj, path: str | None) -> None:
    out, close = _open_output(path)
    try:
        json.dump(obj, out, indent=2, sort_keys=True)
        out.write("\n")
    finally:
        if close:
            out.close()


def _fail(obj) -> int:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 1


def _params(args) -> Params:
    return Params(a=args.a, b=args.b, c=args.c)


def _eq_json(eq) -> dict:
    return {"u0": eq.u0, "v0": eq.v0, "kind": eq.kind.value,
            "trace": eq.trace, "det": eq.det}


def _cmd_equilibria(args) -> int:
    p = _params(args)
    eqs = equilibria(p, tol=args.tol, degeneracy_tol=args.degeneracy_tol)
    _emit_json({
        "params": {"a": p.a, "b": p.b, "c": p.c},
        "count": len(eqs),
        "equilibria": [_eq_json(eq) for eq in eqs],
    }, args.output)
    return 0


def _cmd_lyapunov(args) -> int:
    if args.theta is not None:
        theta = args.theta
        u0 = 0.25 * math.log(theta)
    else:
        u0 = args.u0
        theta = math.exp(4.0 * u0)
    if args.bautin:
        bp = bautin_curve(theta)
        d = bp.a - bp.b
        b = bp.b
    elif args.d is not None:
        a = (1.0 + theta) ** 2 / (2.0 * theta)
        d = args.d
        b = a - d
    elif args.b is not None:
        a = (1.0 + theta) ** 2 / (2.0 * theta)
        b = args.b
        d = a - b
    else:
        print("one of --d, --b, --bautin is required", file=sys.stderr)
        return 2
    closed = lyapunov_closed(theta, d)
    a = (1.0 + theta) ** 2 / (2.0 * theta)
    out = {
        "theta": theta,
        "u0": u0,
        "d": d,
        "a": a,
        "b": b,
        "c": (b - a) * (theta / (1.0 + theta)) + u0,
        "bautin": bool(args.bautin),
        "closed": {"l1": closed.l1, "l2": closed.l2, "l3": closed.l3},
        "generic": None,
        "sign_agreement": None,
        "l2bar": l2bar(theta) if args.bautin else None,
    }
    if b is not None and b > 0.0:
        p = Params(a=a, b=b, c=out["c"])
        eq = classify_equilibrium(p, u0)
        try:
            gen = lyapunov_generic(taylor_coeffs(p, eq))
            out["generic"] = {"l1": gen.l1, "l2": gen.l2, "l3": gen.l3}
            floor = 1e-8 * max(1.0, 2.0 * theta, abs(6.0 - 8.0 * d) * theta**2,
                               2.0 * theta**3, theta**4)
            if abs(closed.l1) > floor:
                out["sign_agreement"] = (gen.l1 > 0) == (closed.l1 > 0)
            else:
                out["sign_agreement"] = abs(gen.l1) < 1e-6 * max(
                    abs(x) for x in (gen.l2, gen.l3, 1.0))
        except NotAFocusError:
            pass
    _emit_json(out, args.output)
    return 0


def _cmd_bautin(args) -> int:
    out, close = _open_output(args.output)
    try:
        out.write("vartheta,a,b,c,u0,l2bar\r\n")
        for v in np.geomspace(args.theta_min, args.theta_max, args.samples):
            if abs(v - 1.0) < 1e-9:
                continue
            bp = bautin_curve(float(v))
            out.write(f"{bp.vartheta:.17g},{bp.a:.17g},{bp.b:.17g},"
                      f"{bp.c:.17g},{bp.u0:.17g},{l2bar(bp.vartheta):.17g}\r\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_cycles(args) -> int:
    p = _params(args)
    eqs = equilibria(p)
    non_saddle = [eq for eq in eqs if eq.kind is not EquilibriumKind.SADDLE]
    if len(non_saddle) != 1:
        return _fail({"error": "ambiguous_anchor",
                      "detail": f"{len(eqs)} equilibria; pick one via the library API"})
    try:
        cycles = find_cycles(p, non_saddle[0], args.r_max, angle=args.angle,
                             rtol=args.rtol, atol=args.atol)
    except Exception as exc:  # numerical failure is data, not a crash
        return _fail({"error": "cycle_scan_failed", "detail": str(exc)})
    _emit_json({
        "params": {"a": p.a, "b": p.b, "c": p.c},
        "equilibrium": _eq_json(non_saddle[0]),
        "count": len(cycles),
        "cycles": [{"section_radius": cyc.radius, "period": cyc.period,
                    "stability": cyc.stability.value,
                    "floquet_slope": cyc.floquet_slope} for cyc in cycles],
    }, args.output)
    return 0


def _cmd_portrait(args) -> int:
    p = _params(args)
    try:
        code = classify_portrait(p, args.r_max)
    except DegenerateParametersError as exc:
        return _fail({"error": "degenerate_parameters", "detail": exc.what})
    out, close = _open_output(args.output)
    try:
        out.write(str(code) + "\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_scan(args) -> int:
    rmap = region_scan(args.a, (args.b_min, args.b_max), (args.c_min, args.c_max),
                       (args.res_b, args.res_c), r_max=args.r_max,
                       jobs=args.jobs)
    out, close = _open_output(args.output)
    try:
        rmap.to_csv(out)
    finally:
        if close:
            out.close()
    if args.legend:
        lout, lclose = _open_output(args.legend)
        try:
            lout.write(rmap.legend_json() + "\n")
        finally:
            if lclose:
                lout.close()
    return 0


def _cmd_curves(args) -> int:
    samples = (sn_curve(args.a, n=args.samples)
               + hopf_curve(args.a, n=args.samples)
               + bautin_points(args.a)
               + bt_points(args.a))
    out, close = _open_output(args.output)
    try:
        curves_to_csv(samples, out)
    finally:
        if close:
            out.close()
    return 0


def _cmd_integrate(args) -> int:
    p = _params(args)
    t_eval = None
    if args.dt is not None:
        t_eval = np.arange(0.0, args.t_end + 0.5 * args.dt, args.dt)
        t_eval = t_eval[t_eval <= args.t_end]
    traj = integrate(p, State(args.u0, args.v0), args.t_end,
                     rtol=args.rtol, atol=args.atol, t_eval=t_eval)
    out, close = _open_output(args.output)
    try:
        traj.to_csv(out)
    finally:
        if close:
            out.close()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="neurocycles",
        description="Bifurcation analysis of the planar two-neuron model")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_abc(sp):
        sp.add_argument("-a", type=float, required=True, help="gain a (> 0)")
        sp.add_argument("-b", type=float, required=True, help="gain b (> 0)")
        sp.add_argument("-c", type=float, required=True, help="input offset c")

    def add_out(sp):
        sp.add_argument("-o", "--output", default=None,
                        help="output path (default: stdout)")

    sp = sub.add_parser("equilibria", help="steady states and their kinds")
    add_abc(sp); add_out(sp)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--degeneracy-tol", type=float, default=1e-9)
    sp.set_defaults(func=_cmd_equilibria)

    sp = sub.add_parser("lyapunov", help="focal quantities at a zero-trace point")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float, help="theta = exp(4*u0)")
    g.add_argument("--u0", type=float, help="steady-state abscissa")
    sp.add_argument("--d", type=float, default=None, help="d = a - b")
    sp.add_argument("--b", type=float, default=None, help="gain b")
    sp.add_argument("--bautin", action="store_true",
                    help="take d from the l1 = 0 curve")
    add_out(sp)
    sp.set_defaults(func=_cmd_lyapunov)

    sp = sub.add_parser("bautin", help="CSV of the l1 = 0 curve")
    sp.add_argument("--theta-min", type=float, default=1e-2)
    sp.add_argument("--theta-max", type=float, default=1e2)
    sp.add_argument("--samples", type=int, default=200)
    add_out(sp)
    sp.set_defaults(func=_cmd_bautin)

    sp = sub.add_parser("cycles", help="limit cycles around the unique focus")
    add_abc(sp); add_out(sp)
    sp.add_argument("--r-max", type=float, default=None)
    sp.add_argument("--angle", type=float, default=0.0,
                    help="section ray angle in radians")
    sp.add_argument("--rtol", type=float, default=1e-10)
    sp.add_argument("--atol", type=float, default=1e-12)
    sp.set_defaults(func=_cmd_cycles)

    sp = sub.add_parser("portrait", help="symbolic phase-portrait code")
    add_abc(sp); add_out(sp)
    sp.add_argument("--r-max", type=float, default=None)
    sp.set_defaults(func=_cmd_portrait)

    sp = sub.add_parser("scan", help="portrait-code map over a (b, c) window")
    sp.add_argument("-a", type=float, required=True)
    sp.add_argument("--b-min", type=float, required=True)
    sp.add_argument("--b-max", type=float, required=True)
    sp.add_argument("--c-min", type=float, required=True)
    sp.add_argument("--c-max", type=float, required=True)
    sp.add_argument("--res-b", type=int, default=50)
    sp.add_argument("--res-c", type=int, default=50)
    sp.add_argument("--r-max", type=float, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--legend", default=None,
                    help="also write a JSON legend to this path")
    add_out(sp)
    sp.set_defaults(func=_cmd_scan)

    sp = sub.add_parser("curves", help="CSV of analytic bifurcation sets at fixed a")
    sp.add_argument("-a", type=float, required=True)
    sp.add_argument("--samples", type=int, default=200)
    add_out(sp)
    sp.set_defaults(func=_cmd_curves)

    sp = sub.add_parser("integrate", help="CSV trajectory of the model")
    add_abc(sp); add_out(sp)
    sp.add_argument("--u0", type=float, required=True)
    sp.add_argument("--v0", type=float, required=True)
    sp.add_argument("-T", "--t-end", type=float, required=True, dest="t_end")
    sp.add_argument("--dt", type=float, default=None,
                    help="sample spacing (default: accepted steps)")
    sp.add_argument("--rtol", type=float, default=1e-9)
    sp.add_argument("--atol", type=float, default=1e-12)
    sp.set_defaults(func=_cmd_integrate)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, NotAFocusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FitInconclusiveError as exc:
        return _fail({"error": "fit_inconclusive", "detail": str(exc)})


if __name__ == "__main__":
    sys.exit(main())
