"""Benchmark the compiled kernels against the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--batch 200000]

Times the three batched primitives on representative matrix sizes and
prints one row per (function, size, backend) with the speedup factor.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qmetric._kernels import _numpy as numpy_impl

try:
    from qmetric._kernels import _core as core_impl
except ImportError:
    core_impl = None


def _time(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--batch", type=int, default=200_000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"batch = {args.batch}; times in ms (best of 3)")
    header = f"{'kernel':<22}{'k':>3}{'numpy':>12}{'compiled':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for k in (2, 3, 4, 6, 8):
        mats = rng.standard_normal((args.batch, k, k)) + 1j * rng.standard_normal(
            (args.batch, k, k)
        )
        herm = mats + np.conj(np.transpose(mats, (0, 2, 1)))
        bound = float(np.median(numpy_impl.sv_max_batch(mats[:1000])))
        cases = [
            ("sv_max_batch", (mats,)),
            ("herm_eig_bounds_batch", (herm,)),
            ("sv_max_le_batch", (mats, bound)),
        ]
        for name, call_args in cases:
            t_np = _time(getattr(numpy_impl, name), *call_args)
            if core_impl is not None:
                t_c = _time(getattr(core_impl, name), *call_args)
                ratio = f"{t_np / t_c:8.1f}x"
                t_c_str = f"{1e3 * t_c:12.2f}"
            else:
                t_c_str, ratio = f"{'n/a':>12}", f"{'n/a':>9}"
            print(f"{name:<22}{k:>3}{1e3 * t_np:>12.2f}{t_c_str}{ratio}")


if __name__ == "__main__":
    main()
