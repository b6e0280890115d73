"""Compare the numba and numpy kernel backends.

Times the three hot kernels on frequency-batched inputs of increasing
size and prints a speed table.  The numba path is warmed up first so
JIT compilation is excluded.

    python3 benchmarks/bench_kernels.py [--points 201 2001 20001] [--repeat 20]
"""

import argparse
import time

import numpy as np

from mpcal import _kernels_nb, _kernels_np


def rand_c(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def make_inputs(rng, n_freq):
    a = rand_c(rng, (n_freq, 2, 2))
    b = rand_c(rng, (n_freq, 2, 2))
    m = rand_c(rng, (n_freq, 6, 6))
    rhs = rand_c(rng, (n_freq, 6, 2))
    phase = np.ascontiguousarray(
        np.angle(np.exp(-2j * np.pi * np.linspace(1e9, 9e9, n_freq) * 1e-9)))
    return a, b, m, rhs, phase


def bench(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, nargs="+",
                        default=[201, 2001, 20001])
    parser.add_argument("--repeat", type=int, default=20)
    opts = parser.parse_args()

    rng = np.random.default_rng(0)
    warm = make_inputs(rng, 16)
    _kernels_nb.cascade2(warm[0], warm[1])
    _kernels_nb.solve_small(warm[2], warm[3])
    _kernels_nb.track_root_signs(warm[4], 0.0, np.deg2rad(80.0))

    kernels = [
        ("cascade2 (2x2)", lambda k, i: k.cascade2(i[0], i[1])),
        ("solve_small (6x6)", lambda k, i: k.solve_small(i[2], i[3])),
        ("track_root_signs", lambda k, i: k.track_root_signs(
            i[4], 0.0, np.deg2rad(80.0))),
    ]

    print(f"{'kernel':<20} {'points':>8} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for n_freq in opts.points:
        inputs = make_inputs(rng, n_freq)
        for name, call in kernels:
            t_np = bench(lambda: call(_kernels_np, inputs), (), opts.repeat)
            t_nb = bench(lambda: call(_kernels_nb, inputs), (), opts.repeat)
            print(f"{name:<20} {n_freq:>8} {t_np * 1e3:>10.3f}ms "
                  f"{t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
