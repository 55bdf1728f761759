"""Compare the compiled and numpy rank kernels on random GF(2^e) matrices.

    python3 benchmarks/bench_kernels.py [--reps 3]
"""
import argparse
import time

import numpy as np

from mcrel import gf, kernels

CASES = [(2, 400, 800), (4, 800, 1600), (6, 1500, 3000), (8, 1000, 2000)]


def best_of(fn, reps):
    best = float("inf")
    out = None
    for _ in range(reps):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    if kernels.BACKEND != "compiled":
        print("compiled core not built; only the numpy kernel is timed")
    print(f"{'field':>8} {'shape':>11} {'compiled s':>11} {'python s':>9} {'speedup':>8}")
    for e, R, C in CASES:
        ctx = gf.make_field(2, e, 1)
        M = ctx.random(rng, (R, C))
        py_rank, t_py = best_of(lambda: kernels.gf2e_rank(ctx, M, backend="python"), args.reps)
        if kernels.BACKEND == "compiled":
            c_rank, t_c = best_of(lambda: kernels.gf2e_rank(ctx, M, backend="compiled"), args.reps)
            assert c_rank == py_rank, (c_rank, py_rank)
            print(f"GF(2^{e}) {R:>5}x{C:<5} {t_c:11.3f} {t_py:9.3f} {t_py / t_c:7.1f}x")
        else:
            print(f"GF(2^{e}) {R:>5}x{C:<5} {'-':>11} {t_py:9.3f} {'-':>8}")


if __name__ == "__main__":
    main()
