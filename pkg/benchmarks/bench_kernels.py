"""Compare the numba and numpy basis-pair sweep kernels.

    python3 benchmarks/bench_kernels.py [--q 2 3 4 5] [--repeat 5]

The inputs are the twisted first-order sweep of a seeded asymmetric torus,
i.e. the data the checkers feed to the kernel.
"""

import argparse
import time

import numpy as np

from multitwist import _kernels, models
from multitwist.numat import al_conjugate, inverse


def sweep_inputs(q):
    t, mt = models.asymmetric_torus(models.FuzzyModelParams(q=q, seed=0))
    s = mt.summands[0]
    nu_inv = inverse(s.nu)
    basis = t.algebra.basis
    cs = np.array([s.d @ a - a @ s.d for a in basis])
    ls = np.array([al_conjugate(t.j, s.nu @ b @ nu_inv) for b in basis])
    rs = np.array([al_conjugate(t.j, nu_inv @ b @ s.nu) for b in basis])
    return cs, ls, rs


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed")

    # compile outside the timed region
    _kernels.intertwine_grid_numba(*sweep_inputs(2))
    print(f"{'q':>3} {'dim H':>6} {'pairs':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'max diff':>9}")
    for q in args.q:
        data = sweep_inputs(q)
        t_np, g_np = best_of(_kernels.intertwine_grid_numpy, data, args.repeat)
        t_nb, g_nb = best_of(_kernels.intertwine_grid_numba, data, args.repeat)
        diff = float(np.abs(g_np - g_nb).max())
        print(f"{q:>3} {data[0].shape[1]:>6} {g_np.size:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.2f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
