"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported side by side, so no environment flag is needed;
outputs are checked for equality before timing.
"""

import argparse
import time

import numpy as np

from seqprec import _accel
from seqprec import distributions as D
from seqprec.permutations import perm_array0
from seqprec.quadrature import build_grid


def best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def chain_case(n, cells):
    dists = [D.weibull(1.5, s) for s in np.linspace(0.5, 2.5, n)]
    g = build_grid(dists, cells, 1e-9)
    return (g.dF, g.sf, g.lo_mass, g.hi_mass, perm_array0(n))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    have_numba = _accel.chain_numba is not None
    print(f"backend in use: {_accel.BACKEND}")
    print(f"{'kernel':<28}{'numpy [s]':>12}{'numba [s]':>12}{'speed-up':>10}")

    for n, cells in ((3, 8192), (4, 8192), (5, 8192), (6, 4096)):
        a = chain_case(n, cells)
        t_np = best_of(lambda: _accel.chain_numpy(*a), args.repeat)
        row = f"chain n={n} cells={cells}"
        if have_numba:
            assert all(np.array_equal(x, y) for x, y in zip(_accel.chain_numpy(*a), _accel.chain_numba(*a)))
            t_nb = best_of(lambda: _accel.chain_numba(*a), args.repeat)
            print(f"{row:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{row:<28}{t_np:>12.4f}{'-':>12}{'-':>10}")

    rng = np.random.default_rng(0)
    for n in (3, 4, 6):
        X = rng.exponential(size=(10**6, n))
        fact = _accel._factorials(n)
        t_np = best_of(lambda: _accel.classify_numpy(X, fact), args.repeat)
        row = f"classify n={n} draws=1e6"
        if have_numba:
            a, b = _accel.classify_numpy(X, fact), _accel.classify_numba(X, fact)
            assert np.array_equal(a[0], b[0]) and a[1] == b[1]
            t_nb = best_of(lambda: _accel.classify_numba(X, fact), args.repeat)
            print(f"{row:<28}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{row:<28}{t_np:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
