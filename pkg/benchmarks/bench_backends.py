#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (adaptive shooting integration and the PDE
stepper) in subprocesses with SISFRONTS_NUMBA=1 and =0, since the
backend is chosen at import time.  JIT compilation is excluded by a
warm-up pass inside each timed process.

    python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

import os
import subprocess
import sys

WORKLOAD = r"""
import time
import numpy as np

from sisfronts._accel import NUMBA_ENABLED
from sisfronts.connect import full_system_connection
from sisfronts.model import make_params
from sisfronts.pdesim import Grid1D, initial_front, simulate, stable_dt


def bench(label, fn, repeats=3):
    fn()  # warm-up (includes JIT compilation when enabled)
    best = min(_timed(fn) for _ in range(repeats))
    print(f"{label:<42s} {best:8.3f} s")
    return best


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


backend = "numba" if NUMBA_ENABLED else "numpy"
print(f"backend: {backend}")

p_stiff = make_params(2, 1, 0, c=5.0, epsilon=0.005, regime="case2")
bench("shoot: case2 full system, c=5, eps=0.005", lambda: full_system_connection(p_stiff))

p_pde = make_params(2, 1, 0, c=1, epsilon=0.01, regime="case3")
grid = Grid1D(0.0, 400.0, 4000)
init = initial_front(grid, p_pde)
dt = stable_dt(p_pde, grid)
bench(
    "pde: 4000 nodes, horizon 20 (~5000 RK4 steps)",
    lambda: simulate(p_pde, grid, init, dt, 20.0, n_snapshots=2),
)
"""


def run_backend(enabled: bool) -> None:
    env = dict(os.environ, SISFRONTS_NUMBA="1" if enabled else "0")
    subprocess.run([sys.executable, "-c", WORKLOAD], env=env, check=True)


if __name__ == "__main__":
    for enabled in (True, False):
        run_backend(enabled)
        print()
