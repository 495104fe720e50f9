"""Benchmark the numba kernels against their pure-numpy fallbacks.

Usage:  python benchmarks/bench_backends.py [--repeats 5]

Times the three hot kernels on the workloads the package actually runs:
the alternating product-overlap descent, the batched purity sum, and the
simplex concurrence minimization.  numba results only appear when numba
is importable; run with BOUNDENT_BACKEND=numpy to check the fallback is
selected by the environment flag.
"""

import argparse
import time

import numpy as np

from boundent import backend, kernels
from boundent.optimize import OptimizerOptions, product_starts, sphere_starts
from boundent.upb import q_basis, shifts_upb


def best_of(repeats, fn):
    results = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        results.append(time.perf_counter() - started)
    return min(results)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = ["numpy"] + (["numba"] if backend.NUMBA_AVAILABLE else [])
    opts = OptimizerOptions(restarts=64, seed=42)
    h = shifts_upb().projector_p().entries
    p_starts = product_starts(opts)
    basis = q_basis().matrix()
    s_starts = sphere_starts(opts, 4)
    psis_raw = np.random.default_rng(0).normal(size=(100_000, 8)) + 1j
    psis = psis_raw / np.linalg.norm(psis_raw, axis=1, keepdims=True)

    workloads = {
        "product overlap descent (64 restarts)": lambda name: kernels.alt_product_minimize(
            h, p_starts, 10_000, 1e-12, backend_name=name
        ),
        "purity sum batch (1e5 states)": lambda name: kernels.purity_sum_batch(
            psis, backend_name=name
        ),
        "concurrence simplex (64 restarts)": lambda name: kernels.nm_concurrence(
            basis, s_starts, 10_000, 1e-12, backend_name=name
        ),
    }

    if backend.NUMBA_AVAILABLE:
        kernels.warmup()  # compile before timing

    print(f"active default backend: {backend.ACTIVE_BACKEND}")
    print(f"{'kernel':42s} " + " ".join(f"{b:>12s}" for b in backends) + "  speedup")
    for label, run in workloads.items():
        times = {}
        for name in backends:
            run(name)  # one untimed pass (cache warmup, allocation)
            times[name] = best_of(args.repeats, lambda: run(name))
        cells = " ".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        if "numba" in times:
            cells += f"  {times['numpy'] / times['numba']:6.1f}x"
        print(f"{label:42s} {cells}")


if __name__ == "__main__":
    main()
