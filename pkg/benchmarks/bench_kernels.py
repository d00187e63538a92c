#!/usr/bin/env python3
"""Wall-clock comparison of the JIT kernels against the interpreted
fallbacks.

The package picks its kernel path at import time from LATDET_NUMBA; this
script ignores the flag's "0" setting for the comparison itself by calling
the undecorated originals kept in PURE_PYTHON. Workloads mirror one sweep
trial: a channel draw, sorted QR, reduction, and the searches at a
mid-range SNR.

Usage:
    python3 benchmarks/bench_kernels.py [--m N] [--reps R] [--seed S]
"""

import argparse
import time

import numpy as np

from latdet import _kernels
from latdet.channel import draw, trial_rng
from latdet.constellation import build


def make_workload(m, reps, seed):
    cst = build(16)
    problems = []
    for trial in range(reps):
        inst = draw(trial_rng(seed, 0, trial), m, cst, snr_db=9.0)
        g = np.ascontiguousarray(inst.generator)
        q, r, perm, bad = _kernels.sqrd_kernel(g)
        rt = np.ascontiguousarray(np.conj(q.T) @ inst.target)
        problems.append((g, q, r, rt))
    return cst, problems


def bench(label, fn, args_list, reps):
    start = time.perf_counter()
    for args in args_list:
        fn(*args)
    elapsed = time.perf_counter() - start
    per = elapsed / reps * 1e6
    print(f"  {label:<28s} {elapsed:8.3f} s total   {per:10.1f} us/call")
    return elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()

    if not _kernels.NUMBA_ENABLED:
        print("numba path is disabled (LATDET_NUMBA=0 or numba missing); "
              "only the fallback timings below are meaningful")
    else:
        _kernels.warmup()

    cst, problems = make_workload(args.m, args.reps, args.seed)
    kmin, kmax = cst.k_min, cst.k_max
    codes = np.empty(0, np.int64)
    pd2 = np.empty(0, np.float64)

    cases = [
        ("sqrd_kernel", [(g,) for g, q, r, rt in problems]),
        ("lll_kernel", [(q.copy(), r.copy(), 0.75)
                        for g, q, r, rt in problems]),
        ("sesd_finite_kernel", [(r, rt, kmin, kmax, 0, codes, pd2)
                                for g, q, r, rt in problems]),
        ("sesd_relaxed_kernel", [(r, rt) for g, q, r, rt in problems]),
        ("sic_kernel", [(r, rt, 1, kmin, kmax)
                        for g, q, r, rt in problems]),
    ]

    print(f"m={args.m}, reps={args.reps}, 16-QAM, 9 dB")
    speedups = []
    for name, arglist in cases:
        print(name)
        t_slow = bench("pure python", _kernels.PURE_PYTHON[name], arglist,
                       args.reps)
        if _kernels.NUMBA_ENABLED:
            t_fast = bench("numba njit", getattr(_kernels, name), arglist,
                           args.reps)
            speedups.append((name, t_slow / t_fast))
    if speedups:
        print("speedups")
        for name, s in speedups:
            print(f"  {name:<28s} {s:8.1f}x")


if __name__ == "__main__":
    main()
