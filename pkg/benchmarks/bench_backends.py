"""Compare the numba kernels with the pure-numpy fallback.

Runs the same batch of searches on both backends, checks that the outcomes
agree exactly and prints agent updates per second.

    python3 benchmarks/bench_backends.py [--runs 50] [--n 12] [--k 4]
"""

import argparse
import time

import numpy as np

from nkimit import landscape as nk
from nkimit.harness import replication_seed
from nkimit.search import run_batch


def timed(landscape, m, p, seeds, backend):
    run_batch(landscape, m, p, seeds[:2], backend=backend)  # compile / warm caches
    start = time.perf_counter()
    success, t_star = run_batch(landscape, m, p, seeds, backend=backend)
    return time.perf_counter() - start, success, t_star


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=50)
    parser.add_argument("--n", type=int, default=12)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    landscape = nk.generate(args.n, args.k, args.seed)
    nk.find_global_maximum(landscape)
    print(f"{'m':>5} {'p':>5} {'numba s':>9} {'numpy s':>9} {'speedup':>8} {'numba upd/s':>12}  same")
    for m, p in [(1, 0.0), (10, 0.0), (100, 0.0), (1, 0.5), (10, 0.5), (100, 0.5)]:
        seeds = [replication_seed(0, m, 0, r) for r in range(args.runs)]
        t_jit, ok_jit, ts_jit = timed(landscape, m, p, seeds, "numba")
        t_np, ok_np, ts_np = timed(landscape, m, p, seeds, "numpy")
        same = np.array_equal(ok_jit, ok_np) and np.array_equal(ts_jit, ts_np)
        updates = m * ts_jit.sum()
        print(f"{m:5d} {p:5.2f} {t_jit:9.3f} {t_np:9.3f} {t_np / t_jit:8.1f} {updates / t_jit:12.3g}  {same}")


if __name__ == "__main__":
    main()
