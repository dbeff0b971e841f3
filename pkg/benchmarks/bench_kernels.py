"""Compiled vs numpy kernels: timings plus an agreement check on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 1000000]
"""

import argparse
import sys
import timeit

import numpy as np

from infoconc._backend import compiled_kernels, python_kernels
from infoconc.rng import stream_key


def cases(size: int):
    key = stream_key(0xC0FFEE, 3)
    x = np.linspace(-20.0, 20.0, 4001)
    U = np.abs(x) + 0.05 * x * x
    umin = float(U.min())
    w0, _, _ = python_kernels.pl_weights(x, U, 1.0, umin)
    cum = np.concatenate([[0.0], np.cumsum(w0)])
    u = python_kernels.uniforms(key, 0, size)
    xs = np.tile(x, max(1, size // x.size))
    Us = np.abs(xs) + 0.05 * xs * xs
    return {
        "uniforms": lambda k: k.uniforms(key, 0, size),
        "pl_weights": lambda k: k.pl_weights(xs, Us, 1.7, umin),
        "pl_inverse_cdf": lambda k: k.pl_inverse_cdf(x, U, 1.0, umin, cum, u),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=1_000_000)
    args = ap.parse_args(argv)
    if compiled_kernels is None:
        print("compiled extension not built; only the numpy backend is available")
        return 1

    print(f"{'kernel':<16} {'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8} {'max |diff|':>11}")
    for name, fn in cases(args.size).items():
        t_py = min(timeit.repeat(lambda: fn(python_kernels), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(compiled_kernels), number=1, repeat=args.repeat))
        a, b = fn(python_kernels), fn(compiled_kernels)
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        diff = max(float(np.max(np.abs(np.asarray(p) - np.asarray(q)) / np.maximum(1.0, np.abs(p))))
                   for p, q in zip(a, b))
        print(f"{name:<16} {1e3 * t_py:>11.2f} {1e3 * t_cy:>12.2f} {t_py / t_cy:>7.1f}x {diff:>11.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
