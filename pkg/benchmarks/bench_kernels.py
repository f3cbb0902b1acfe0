"""Compare the numba and numpy kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 20 60 120] [--repeat 5]

Both implementations are imported directly, so the ``WPB_DISABLE_NUMBA``
flag does not matter here.  The first numba call (compilation) is excluded.
"""
import argparse
import timeit

import numpy as np

from wpb._accel import HAVE_NUMBA
from wpb._kernels import (pair_matrices_jit, pair_matrices_numpy, packet_sum_jit,
                          packet_sum_numpy)


def _packets(n, rng):
    center = rng.uniform(-3, 3, n)
    momentum = rng.uniform(-3, 3, n)
    width = rng.uniform(0.3, 3, n) + 1j * rng.uniform(-2, 2, n)
    logc = rng.normal(size=n) * 0.1 + 0j
    return center, momentum, width, logc


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    ap.add_argument("--points", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; install the [fast] extra")

    rng = np.random.default_rng(0)
    xs = np.linspace(-12, 12, args.points)
    warm = _packets(3, rng)
    pair_matrices_jit(*warm, 1.0)
    packet_sum_jit(*warm, np.ones(3, complex), xs)

    print(f"{'kernel':<14}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for n in args.sizes:
        pk = _packets(n, rng)
        coeffs = rng.normal(size=n) + 1j * rng.normal(size=n)
        cases = {
            "pair_matrices": (lambda: pair_matrices_numpy(*pk, 1.0), lambda: pair_matrices_jit(*pk, 1.0)),
            "packet_sum": (lambda: packet_sum_numpy(*pk, coeffs, xs), lambda: packet_sum_jit(*pk, coeffs, xs)),
        }
        for name, (f_np, f_jit) in cases.items():
            t_np, t_jit = _best(f_np, args.repeat), _best(f_jit, args.repeat)
            print(f"{name:<14}{n:>6}{1e3 * t_np:>12.3f}{1e3 * t_jit:>12.3f}{t_np / t_jit:>10.2f}")


if __name__ == "__main__":
    main()
