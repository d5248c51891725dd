#!/usr/bin/env python3
"""Benchmark the compiled sign-refinement kernel against the numpy fallback.

Times one full coordinate pass at margin-system shapes matching the SER
sweeps, then an end-to-end precode (relaxation solve + pass) with each
backend, and verifies the two backends agree bit for bit.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from onebitprec import build_relaxation, build_system, qam_spec, solve
from onebitprec._kernels import BACKEND, get_backend
from onebitprec.sim import STREAM_CHANNEL, STREAM_MESSAGE, sample_channel, stream_rng

# (users, antennas, qam exponent): shapes from the experiment grid
SHAPES = [(8, 16, 2), (8, 32, 2), (8, 64, 2), (8, 128, 2), (8, 128, 3)]


def backends():
    out = {"python": get_backend("python")}
    try:
        out["cython"] = get_backend("cython")
    except ImportError:
        pass
    return out


def time_pass(impl, lam_t, margins, x, repeats):
    best = np.inf
    for _ in range(repeats):
        m, v = margins.copy(), x.copy()
        t0 = time.perf_counter()
        impl.greedy_coordinate_pass(lam_t, m, v)
        best = min(best, time.perf_counter() - t0)
    return best * 1e6  # us


def time_precode(impl, sysm, repeats):
    lam_t = np.ascontiguousarray(sysm.lam.T)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        sol = solve(build_relaxation(sysm))
        x = np.ascontiguousarray(sol.values[:-1])
        tau = max(float(sol.values[-1]), 0.0)
        margins = sysm.lam @ x - tau * sysm.lam_b
        impl.greedy_coordinate_pass(lam_t, margins, x)
        best = min(best, time.perf_counter() - t0)
    return best * 1e3  # ms


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=30)
    args = parser.parse_args()

    impls = backends()
    print(f"default backend: {BACKEND}; available: {sorted(impls)}")
    if "cython" not in impls:
        print("compiled kernel missing; run 'pip install -e . --no-build-isolation'")

    print(f"\nkernel pass only ({args.repeats} repeats, best):")
    header = f"{'k':>3s} {'nt':>5s} {'n':>3s} {'rows':>5s} {'coords':>7s}"
    header += "".join(f" {name + '_us':>11s}" for name in sorted(impls))
    if len(impls) == 2:
        header += f" {'speedup':>8s}"
    print(header)

    rng = np.random.default_rng(0)
    for k, nt, n in SHAPES:
        m, d = 2 * n * k, 2 * nt
        lam_t = np.ascontiguousarray(rng.standard_normal((d, m)))
        margins = rng.standard_normal(m)
        x = rng.uniform(-1, 1, d)
        us = {name: time_pass(impl, lam_t, margins, x, args.repeats)
              for name, impl in impls.items()}
        row = f"{k:3d} {nt:5d} {n:3d} {m:5d} {d:7d}"
        row += "".join(f" {us[name]:11.1f}" for name in sorted(us))
        if len(us) == 2:
            row += f" {us['python'] / us['cython']:8.1f}x"
        print(row)

    print(f"\nend-to-end precode (relaxation + pass), best of {max(3, args.repeats // 3)}:")
    reps = max(3, args.repeats // 3)
    for k, nt, n in SHAPES:
        spec = qam_spec(n)
        H = sample_channel(k, nt, stream_rng(0, 0, STREAM_CHANNEL))
        msg = stream_rng(0, 0, STREAM_MESSAGE).integers(0, 4, (k, n))
        sysm = build_system(H, msg, spec)
        ms = {name: time_precode(impl, sysm, reps) for name, impl in impls.items()}
        row = f"{k:3d} {nt:5d} {n:3d}" + "".join(f" {ms[name]:11.3f}ms" for name in sorted(ms))
        print(row)

    if len(impls) == 2:
        rng = np.random.default_rng(1)
        for _ in range(50):
            m = int(rng.integers(2, 49))
            d = int(rng.integers(2, 257))
            lam_t = np.ascontiguousarray(rng.standard_normal((d, m)))
            margins = rng.standard_normal(m)
            x = rng.uniform(-1, 1, d)
            m1, x1 = margins.copy(), x.copy()
            m2, x2 = margins.copy(), x.copy()
            c1, r1 = impls["python"].greedy_coordinate_pass(lam_t, m1, x1)
            c2, r2 = impls["cython"].greedy_coordinate_pass(lam_t, m2, x2)
            assert np.array_equal(x1, x2) and np.array_equal(m1, m2)
            assert np.array_equal(c1, c2) and np.array_equal(r1, r2)
        print("\nbackends bit-identical on 50 random instances")


if __name__ == "__main__":
    main()
