"""Benchmark the compiled integrator kernel against the pure-Python one.

Usage:
    python benchmarks/bench_kernels.py [--steps 100000] [--repeats 5]

Both backends run the identical fixed-step integration (same arithmetic,
bit-identical output); this script reports wall time and the speedup of
the compiled extension.
"""

import argparse
import time

import numpy as np

from atomlight import _kernels_py

try:
    from atomlight import _kernels
except ImportError:
    _kernels = None

ARGS = (0.6 + 0.1j, -100.0 + 0j, 0.8 - 0.2j, 1.0, 0.5, 5e-5, None, 100)


def run(kernel, n_steps, repeats):
    args = list(ARGS)
    args[6] = n_steps
    best = float("inf")
    out = None
    for _ in range(repeats):
        started = time.perf_counter()
        out = kernel.rk4_three_wave(*args)
        best = min(best, time.perf_counter() - started)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    pure_time, pure_out = run(_kernels_py, args.steps, args.repeats)
    print(f"pure-python : {pure_time * 1e3:9.2f} ms  ({args.steps} steps)")

    if _kernels is None:
        print("compiled    : unavailable (extension not built)")
        return

    fast_time, fast_out = run(_kernels, args.steps, args.repeats)
    print(f"compiled    : {fast_time * 1e3:9.2f} ms  ({args.steps} steps)")
    print(f"speedup     : {pure_time / fast_time:9.1f} x")

    identical = all(np.array_equal(a, b) for a, b in zip(fast_out, pure_out))
    print(f"bit-identical outputs: {identical}")


if __name__ == "__main__":
    main()
