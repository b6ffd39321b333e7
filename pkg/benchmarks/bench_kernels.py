"""Benchmark: compiled Monte Carlo kernels vs the pure numpy fallback.

Run from the repository root after an editable install:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from rankstop import rng
from rankstop.kernels import _fast, pure  # type: ignore[attr-defined]
from rankstop.memoryless import CFamilySpec, phi_family


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    cases = [
        ("threshold n=1000 x 20k rows", "threshold", 1000, 20_000),
        ("threshold n=10000 x 4k rows", "threshold", 10_000, 4_000),
        ("cloud     n=1000 x 2k rows", "cloud", 1000, 2_000),
        ("cloud     n=4000 x 500 rows", "cloud", 4_000, 500),
    ]
    print(f"{'case':<35}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for label, kind, n, rows in cases:
        phi = phi_family(CFamilySpec(c=1.9469, n=n)).phi
        values = rng.stream(7, "bench", n).random((rows, n))
        if kind == "threshold":
            t_fast, out_fast = timeit(_fast.threshold_sim, values, phi)
            t_pure, out_pure = timeit(pure.threshold_sim, values, phi)
        else:
            args = (values, phi, 0.02, 3, 0.02, 3, 0.01)
            t_fast, out_fast = timeit(_fast.cloud_sim, *args, repeat=1)
            t_pure, out_pure = timeit(pure.cloud_sim, *args, repeat=1)
        assert np.array_equal(out_fast[0], out_pure[0])
        assert np.array_equal(out_fast[1], out_pure[1])
        print(f"{label:<35}{t_fast:>10.3f}s{t_pure:>10.3f}s{t_pure / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
