"""Time the accelerated kernels against the pure-numpy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 20x5,50x20,100x20]
                                        [--repeats 5] [--seed 0]

Each kernel is warmed up once per backend (the first numba call pays JIT
compilation), then timed as the best of --repeats runs over a fixed batch
of permutations. Output is one table row per (size, kernel).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from neutralscape._kernels import IMPLEMENTATIONS, as_jobseq, as_ptimes
from neutralscape.instance import generate_instance

BATCH = 200


def parse_sizes(text: str) -> list[tuple[int, int]]:
    sizes = []
    for token in text.split(","):
        n, m = token.lower().split("x")
        sizes.append((int(n), int(m)))
    return sizes


def bench_kernel(fn, calls, repeats: int) -> float:
    fn(*calls[0])  # warmup / JIT
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for args in calls:
            fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="20x5,50x20,100x20")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    for n, m in parse_sizes(args.sizes):
        inst = generate_instance(n, m, seed=args.seed)
        p = as_ptimes(inst.processing_times)
        perms = [as_jobseq(rng.permutation(n)) for _ in range(BATCH)]
        cases = {
            "makespan": [(p, s) for s in perms],
            "full_scan": [(p, s) for s in perms[:20]],
            "remove_insert_scan": [
                (p, s, int(rng.integers(n))) for s in perms[:50]
            ],
        }
        for kernel, calls in cases.items():
            timings = {
                name: bench_kernel(impl[kernel], calls, args.repeats)
                for name, impl in IMPLEMENTATIONS.items()
            }
            rows.append((f"{n}x{m}", kernel, len(calls), timings))

    print(f"{'size':>8} {'kernel':<20} {'calls':>5} "
          f"{'numpy':>12} {'numba':>12} {'speedup':>8}")
    for size, kernel, calls, timings in rows:
        speedup = timings["numpy"] / timings["numba"]
        print(f"{size:>8} {kernel:<20} {calls:>5} "
              f"{timings['numpy'] * 1e3:>10.2f}ms {timings['numba'] * 1e3:>10.2f}ms "
              f"{speedup:>7.1f}x")


if __name__ == "__main__":
    main()
