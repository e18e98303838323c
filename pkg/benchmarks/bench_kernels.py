"""Compare the numba kernels with the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeat R]

Both backends are timed on the same random jets; the first numba call
(compilation, or loading from the on-disk cache) is excluded.
"""

import argparse
import timeit

import numpy as np

from hschwarz import _kernels


def _jets(rng, n):
    c = rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))
    c[1] += 3.0  # keep f' away from zero
    return np.ascontiguousarray(c)


def cases(n, seed=0):
    rng = np.random.default_rng(seed)
    a, b = _jets(rng, n), _jets(rng, n)
    h, g = _jets(rng, n), _jets(rng, n) * 0.2
    z = 0.8 * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))
    coeffs = rng.normal(size=8) + 1j * rng.normal(size=8)
    return {
        "mul": (a, b),
        "div": (a, b),
        "compose": (a, b),
        "poly": (coeffs, z),
        "schwarzian": (a,),
        "schwarzian_h": (h, g),
        "schwarzian_h_pointwise": (h, g),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    nb, npb = _kernels.numba_backend, _kernels.numpy_backend
    if nb is None:
        print("numba is not available; nothing to compare")
        return
    print(f"{'kernel':<24}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}{'max rel diff':>14}")
    for name, inputs in cases(args.points).items():
        f_np, f_nb = getattr(npb, name), getattr(nb, name)
        ref, got = f_np(*inputs), f_nb(*inputs)  # warm-up / compile
        diff = float((np.abs(ref - got) / np.maximum(1.0, np.abs(ref))).max())
        t_np = min(timeit.repeat(lambda: f_np(*inputs), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: f_nb(*inputs), number=1, repeat=args.repeat))
        print(f"{name:<24}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}x{diff:>14.2e}")


if __name__ == "__main__":
    main()
