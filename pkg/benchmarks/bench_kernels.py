"""Time each kernel under both backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

The first numba call per kernel is a warm-up and is not timed.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hasse_forge import _kernels as K


def _cases():
    primes = K.sieve(200_000, backend="numpy")
    ls = primes[(primes > 17) & (primes < 20_000)]
    a = np.array([3 ** 12 % l for l in ls.tolist()])
    b = np.ones_like(a)
    pinv = np.array([pow(17, -1, l) for l in ls.tolist()])
    qs = primes[primes < 65_536]
    rng = np.random.default_rng(0)
    k0s = np.array([int(rng.integers(0, q)) for q in qs.tolist()])
    coeffs = rng.integers(0, 10_007, size=11).tolist()
    return {
        "sieve(10^7)": lambda be: K.sieve(10_000_000, backend=be),
        f"mordell_first_points({ls.size} primes)":
            lambda be: K.mordell_first_points(ls, a, b, pinv, 24, backend=be),
        f"fermat_first_points({ls.size} primes)":
            lambda be: K.fermat_first_points(ls, a, b, pinv, 24, backend=be),
        "hyperelliptic_affine_count(deg 10, q=1000003)":
            lambda be: K.hyperelliptic_affine_count(coeffs, 1_000_003, backend=be),
        f"progression_survivors({qs.size} sieve primes, 2^16 offsets)":
            lambda be: K.progression_survivors(qs, k0s, 1 << 16, backend=be),
    }


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"{'kernel':60s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fn in _cases().items():
        fn("numba")  # compile or load from cache
        t_nb = _time(lambda: fn("numba"), args.repeat)
        t_np = _time(lambda: fn("numpy"), args.repeat)
        print(f"{name:60s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
