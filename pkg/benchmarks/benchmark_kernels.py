#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

The two hot paths are the method-of-lines RK4 loop and the fixed-step RK4
profile tabulation.  Both implementations perform identical floating-point
operations, so besides timing this script asserts the outputs agree
bit for bit.

Run:
    python benchmarks/benchmark_kernels.py [--steps N] [--n POINTS]

The numba path is used only when available and not disabled via
HGF_NO_NUMBA; the script reports which paths were timed.
"""

import argparse
import time
from timeit import repeat

import numpy as np

from hgf import _kernels as K
from hgf import calculus, reduction, solutions


def _mol_inputs(n):
    tf63 = solutions.make_tf63(0.1, 0.35, a3=1.0, d3=3.0)
    grid = calculus.SpaceGrid(-40.0, 60.0, n)
    F0 = np.stack(tf63.evaluate(0.0, grid.x()))
    dco = np.asarray(tf63.params.diffusivities)
    aco = np.asarray(tf63.params.a_coefficients)
    bc = np.zeros((1, 3, 3, 2))
    for c in range(3):
        bc[0, :, c, 0] = F0[c, 0]
        bc[0, :, c, 1] = F0[c, -1]
    return F0, dco, aco, grid.h, bc


def bench_mol(steps, n):
    F0, dco, aco, h, bc = _mol_inputs(n)
    dt = 0.4 * h * h / (2.0 * max(dco))
    snap_steps = np.array([steps], dtype=np.int64)

    def run(kernel):
        snaps = np.empty((2, 3, n))
        snaps[0] = F0
        status = kernel(F0.copy(), dco, aco, h, dt, steps, 0, bc,
                        snap_steps, snaps)
        assert status == -1
        return snaps

    results = {}
    timings = {}
    paths = [("numpy", K.mol_run_numpy)]
    if K.USING_NUMBA:
        run(K.mol_run_loop)  # compile before timing
        paths.append(("numba", K.mol_run_loop))
    for name, kernel in paths:
        timings[name] = min(repeat(lambda: run(kernel), number=1, repeat=3))
        results[name] = run(kernel)
    if len(results) == 2:
        assert np.array_equal(results["numba"], results["numpy"]), \
            "kernel paths diverged"
    return timings


def bench_ode_table(nsteps):
    tf63 = solutions.make_tf63(0.1, 0.35, a3=1.0, d3=3.0)
    sys = reduction.reduced_system("R58", alpha=tf63.speed,
                                   params=tf63.params)
    y0 = np.array([0.93, 0.0, 0.7, 0.0, 0.0, 0.0])
    step = 40.0 / nsteps

    def run(kernel):
        out = np.empty((nsteps + 1, sys.dim))
        kernel(sys.code, sys.kcoeffs, y0, -20.0, step, nsteps + 1, out)
        return out

    timings = {}
    results = {}
    paths = [("numpy", K.ode_rk4_table.py_func if K.USING_NUMBA
              else K.ode_rk4_table)]
    if K.USING_NUMBA:
        run(K.ode_rk4_table)
        paths.insert(0, ("numba", K.ode_rk4_table))
    for name, kernel in paths:
        timings[name] = min(repeat(lambda: run(kernel), number=1, repeat=3))
        results[name] = run(kernel)
    return timings


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=int, default=20000,
                    help="RK4 time steps for the MOL benchmark")
    ap.add_argument("--n", type=int, default=2001,
                    help="grid points for the MOL benchmark")
    ap.add_argument("--ode-steps", type=int, default=100000,
                    help="fixed RK4 steps for the profile benchmark")
    args = ap.parse_args()

    print(f"numba available and enabled: {K.USING_NUMBA}"
          + (f" ({K.NUMBA_DISABLED_REASON})" if not K.USING_NUMBA else ""))

    t0 = time.time()
    mol = bench_mol(args.steps, args.n)
    print(f"\nmethod-of-lines RK4, {args.steps} steps x {args.n} points:")
    for name, sec in sorted(mol.items()):
        rate = args.steps * args.n / sec / 1e6
        print(f"  {name:<6} {sec * 1e3:9.1f} ms   "
              f"{rate:8.1f} Mcell-steps/s")
    if len(mol) == 2:
        print(f"  speedup numba/numpy: {mol['numpy'] / mol['numba']:.1f}x "
              f"(outputs bit-identical)")

    ode = bench_ode_table(args.ode_steps)
    print(f"\nfixed-step RK4 profile table, {args.ode_steps} steps (dim 6):")
    for name, sec in sorted(ode.items()):
        print(f"  {name:<6} {sec * 1e3:9.1f} ms")
    if len(ode) == 2:
        print(f"  speedup numba/numpy: {ode['numpy'] / ode['numba']:.1f}x")
    print(f"\ntotal benchmark time: {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
