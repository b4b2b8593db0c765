"""Compare the compiled extension against the numpy fallback on the two
hot kernels: the walk-on-spheres inner loop and projected SOR sweeps.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from fracops import _core_py
from fracops.discrete import Grid1D, assemble_operator

try:
    from fracops import _core

    BACKENDS = [("cython", _core), ("python", _core_py)]
except ImportError:
    BACKENDS = [("python", _core_py)]


def bench_walk(core, n_walkers=200_000, s=0.5):
    x0 = np.full((n_walkers, 1), 0.3)
    params = np.array([0.0, 1.0])  # unit ball at origin
    t0 = time.perf_counter()
    pos, steps, hit = core.walk_exit(x0, 0, params, s, 1.0, 1000, 1234, 0)
    dt = time.perf_counter() - t0
    return dt, float(np.mean(steps))


def bench_psor(core, N=1024, sweeps=200):
    grid = Grid1D(-1.0, 1.0, N)
    op = assemble_operator(0.5, grid)
    phi = 0.5 - grid.nodes**2
    b = np.zeros(N)
    v0 = np.maximum(phi, 0.0)
    t0 = time.perf_counter()
    v, done, res = core.psor(op.matrix, b, phi, v0, 1.8, 0.0, sweeps)
    dt = time.perf_counter() - t0
    return dt, done, res


def main():
    print(f"{'backend':8s} {'walk (200k walkers)':>22s} {'psor (N=1024, 200 sweeps)':>28s}")
    results = {}
    for name, core in BACKENDS:
        t_walk, mean_steps = bench_walk(core)
        t_psor, done, res = bench_psor(core)
        results[name] = (t_walk, t_psor)
        print(f"{name:8s} {t_walk:18.3f} s   {t_psor:24.3f} s")
    if len(results) == 2:
        sw = results["python"][0] / results["cython"][0]
        sp = results["python"][1] / results["cython"][1]
        print(f"speedup: walk {sw:.1f}x, psor {sp:.1f}x")


if __name__ == "__main__":
    main()
