"""Compare the numba and numpy kernel backends.

Usage::

    python3 benchmarks/bench_backends.py [--repeat 5] [--size 1000000]

Times the per-mode kernels on random arrays and one full flat-grid solve
(about 4.8e5 modes).  numba timings exclude the first, compiling call.
"""

import argparse
import math
import time

import numpy as np

from bosonic_capacity import _backend
from bosonic_capacity.allocator import capacity
from bosonic_capacity.channel import FlatGrid, ResourceBudget


def best_of(fn, repeat):
    fn()  # warm up / compile
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(size):
    rng = np.random.default_rng(0)
    x = rng.lognormal(0.0, 3.0, size)
    omega = np.sort(rng.uniform(0.01, 5.0, size))
    eta = rng.uniform(1e-3, 1.0, size)
    grid = FlatGrid(0.5, 1e-4)
    budget = ResourceBudget(2 * math.pi * 1e4)
    return {
        "g_sum": lambda k: k.g_sum(x),
        "shannon_sum": lambda k: k.shannon_sum(x, 0.5),
        "holevo_energy": lambda k: k.holevo_energy(omega, eta, 0.7),
        "waterfill_energy": lambda k: k.waterfill_energy(omega, eta, 0.7, 1.0),
        "flat_solve_M1e4": lambda k: capacity(grid, budget),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--size", type=int, default=1_000_000)
    args = parser.parse_args()

    names = [n for n in _backend.AVAILABLE if n != "numba" or _backend.numba_available()]
    if "numba" not in names:
        print("numba not installed; timing the numpy backend only")

    print(f"{'case':<20}" + "".join(f"{n:>12}" for n in names) + "     speedup")
    for label, fn in cases(args.size).items():
        timings = {}
        for name in names:
            with _backend.use(name) as kernels:
                timings[name] = best_of(lambda: fn(kernels), args.repeat)
        row = f"{label:<20}" + "".join(f"{timings[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            row += f"{timings['numpy'] / timings['numba']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
