"""Benchmark the numba-jitted kernels against the pure-numpy fallback.

Times the three hot kernels on Monte Carlo shaped workloads plus an
end-to-end ``run_mc``, for every backend available in this environment.

Usage:
    python benchmarks/bench_backends.py [--draws 100000] [--batch 200000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from subchan import _kernels
from subchan.channel import ChannelSpec, RankDefDist
from subchan.gf import GF
from subchan.mc import run_mc


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def kernel_workloads(batch: int):
    f = GF(2)
    tables = (f.add_table, f.mul_table, f.inv_table, f.neg_table)
    rng = np.random.default_rng(0)
    square = rng.integers(0, 2, size=(batch, 2, 2), dtype=np.uint8)
    wide = rng.integers(0, 2, size=(batch, 2, 3), dtype=np.uint8)
    return [
        ("rank_batch (Nx2x2)", lambda impl: impl.rank_batch(square, *tables)),
        ("rref_batch (Nx2x3)", lambda impl: impl.rref_batch(wide, *tables)),
        ("matmul_batch (2x2 @ 2x3)", lambda impl: impl.matmul_batch(square, wide, *tables[:2])),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=200_000, help="matrices per kernel call")
    parser.add_argument("--draws", type=int, default=100_000, help="run_mc draws per input")
    args = parser.parse_args()

    names = sorted(_kernels.BACKENDS)
    print(f"available backends: {', '.join(names)} (active: {_kernels.BACKEND})")
    print(f"batch = {args.batch}, run_mc draws per input = {args.draws}\n")

    spec = ChannelSpec(GF(2), 3, 2, RankDefDist(2, [0.5, 0.3, 0.2]))
    rows = []
    for label, call in kernel_workloads(args.batch):
        timings = {}
        for name in names:
            impl = _kernels.BACKENDS[name]
            call(impl)  # warm up (JIT compile / cache touch)
            timings[name] = best_of(lambda: call(impl))
        rows.append((label, timings))

    mc_timings = {}
    for name in names:
        with _kernels.use_backend(name):
            run_mc(spec, 1000, seed=0)  # warm up
            mc_timings[name] = best_of(lambda: run_mc(spec, args.draws, seed=0), repeats=2)
    rows.append((f"run_mc (7 inputs x {args.draws})", mc_timings))

    width = max(len(r[0]) for r in rows) + 2
    header = f"{'workload':<{width}}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, timings in rows:
        line = f"{label:<{width}}" + "".join(f"{timings[n] * 1e3:>10.1f}ms" for n in names)
        if len(names) == 2:
            a, b = (timings[n] for n in names)
            line += f"{max(a, b) / min(a, b):>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
