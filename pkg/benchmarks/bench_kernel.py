#!/usr/bin/env python3
"""Benchmark: compiled kernel vs pure-Python twin.

Times the two hot entry points on the three-nested-cycle witness
parameters: a long trajectory integration and a batch of Poincare
returns (the workload that dominates region scans).

Usage: python benchmarks/bench_kernel.py [--returns N] [--t-end T]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from neurocycles import _kernel_py

try:
    from neurocycles import _kernel
    IMPLS = [("compiled", _kernel), ("python", _kernel_py)]
except ImportError:
    print("compiled kernel not built; benchmarking the pure-Python twin only")
    IMPLS = [("python", _kernel_py)]

A, B, C = 16.0, 130.0, 111.165
EQ_U, EQ_V = 0.8497825889046928, 0.9676773457113624


def bench_trajectory(impl, t_end: float) -> tuple[float, int]:
    t0 = time.perf_counter()
    ts, us, vs, status = impl.integrate_path(
        impl.FIELD_MODEL, A, B, C, 0.0, 0.5, 0.6, t_end, 1e-10, 1e-12)
    assert status == impl.STATUS_OK
    return time.perf_counter() - t0, len(ts)


def bench_returns(impl, n: int) -> tuple[float, float]:
    radii = np.geomspace(1e-3, 30.0, n)
    t0 = time.perf_counter()
    acc = 0.0
    for r in radii:
        r_next, period, status, resid = impl.ray_return(
            impl.FIELD_MODEL, A, B, C, 0.0, EQ_U, EQ_V, 1.0, 0.0, float(r),
            1e-10, 1e-12)
        assert status == impl.STATUS_OK
        acc += r_next
    return time.perf_counter() - t0, acc


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--returns", type=int, default=200)
    ap.add_argument("--t-end", type=float, default=200.0)
    args = ap.parse_args()

    results = {}
    for name, impl in IMPLS:
        dt_traj, n_steps = bench_trajectory(impl, args.t_end)
        dt_ret, acc = bench_returns(impl, args.returns)
        results[name] = (dt_traj, dt_ret)
        print(f"{name:>8}: trajectory t_end={args.t_end:g} "
              f"({n_steps} samples) {dt_traj * 1e3:9.2f} ms | "
              f"{args.returns} returns {dt_ret * 1e3:9.2f} ms "
              f"(checksum {acc:.12g})")
    if len(results) == 2:
        st = results["python"][0] / results["compiled"][0]
        sr = results["python"][1] / results["compiled"][1]
        print(f"speedup: trajectory {st:.1f}x, returns {sr:.1f}x")


if __name__ == "__main__":
    main()
