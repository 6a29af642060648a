"""Benchmark the compiled kernel backend against the pure-Python one.

Times the displaced-parity primitive, the four-point functional, a
batch grid evaluation and a full optimizer run on representative
states.  Run as ``python benchmarks/bench_kernels.py``.
"""

import time

import numpy as np

from phasetest import FockSpec, GaussianSpec, MixtureSpec, make_cat
from phasetest.eigenmax import LatticeProblem, max_eigen
from phasetest.kernels import get_backend
from phasetest.optimize import OptimConfig, optimize
from phasetest.states import compile_state

STATES = {
    "gaussian": GaussianSpec(alpha=0.3 - 0.2j, r=0.7, phi=0.4, nbar=0.2),
    "fock4": FockSpec(4),
    "cat": make_cat(1.2),
    "mixture": MixtureSpec(
        [(0.3, FockSpec(0)), (0.3, FockSpec(2)), (0.4, make_cat(0.9))]
    ),
    "lattice_n2": max_eigen(LatticeProblem.from_spacing_index(2)).state.to_superposition(),
}


def timeit(fn, min_time=0.2):
    n = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(n):
            fn()
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / n
        n = max(n * 2, int(n * min_time / max(dt, 1e-9)))


def main():
    backends = {name: get_backend(name) for name in ("python", "compiled")}
    rng = np.random.default_rng(0)
    grid = rng.normal(0, 1.0, (2000, 2))
    params = rng.normal(0, 0.8, (500, 7))
    params[:, 5] = np.abs(params[:, 5])

    print(f"{'case':32s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, spec in STATES.items():
        data = compile_state(spec)
        cases = {
            "parity_point": lambda b: b.parity_point(data, 0.31, -0.17, 0.4),
            "j_rectangle": lambda b: b.j_rectangle(data, 0.3, -0.2, 0.4, 0.1, 0.5, 0.6, 0.9),
            "grid_2000": lambda b: b.parity_grid(data, grid[:, 0], grid[:, 1], 0.2),
            "batch_500": lambda b: b.j_rectangle_batch(data, params),
        }
        for case, fn in cases.items():
            tp = timeit(lambda: fn(backends["python"]))
            tc = timeit(lambda: fn(backends["compiled"]))
            print(f"{name + '.' + case:32s} {tp * 1e6:10.2f}us {tc * 1e6:10.2f}us {tp / tc:8.1f}x")

    # whole-optimizer comparison on a small config
    import phasetest.kernels as kernels

    cfg = OptimConfig(mode="parallelogram", multistarts=8, prefilter=64, seed=0)
    spec = STATES["mixture"]
    results = {}
    for name, impl in backends.items():
        saved = {
            attr: getattr(kernels, attr)
            for attr in ("parity_point", "parity_grid", "j_rectangle", "j_triangle",
                         "j_rectangle_batch", "j_triangle_batch")
        }
        try:
            for attr in saved:
                setattr(kernels, attr, getattr(impl, attr))
            t0 = time.perf_counter()
            report = optimize(spec, cfg)
            results[name] = (time.perf_counter() - t0, report.value)
        finally:
            for attr, fn in saved.items():
                setattr(kernels, attr, fn)
    tp, vp = results["python"]
    tc, vc = results["compiled"]
    print(f"{'optimize(mixture, 8 starts)':32s} {tp * 1e3:10.1f}ms {tc * 1e3:10.1f}ms {tp / tc:8.1f}x")
    assert abs(vp - vc) < 1e-12, "backends disagree"


if __name__ == "__main__":
    main()
