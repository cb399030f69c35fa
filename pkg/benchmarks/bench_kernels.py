"""Compare the compiled rectangle kernel against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times largest_rectangle on random masks at several sizes and densities,
checks both backends return identical rectangles, and prints the speedup.
"""

import argparse
import time

import numpy as np

from salbox import _kernels_py

try:
    from salbox import _kernels as _compiled
except ImportError:
    _compiled = None

SIZES = [(64, 64), (224, 224), (512, 512)]
DENSITIES = [0.3, 0.6, 0.9]


def _time(fn, masks, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = [fn(m) for m in masks]
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--masks-per-case", type=int, default=5)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled kernel not built (pip install -e . first); "
              "timing the pure backend only")

    rng = np.random.default_rng(20240817)
    header = f"{'size':>9}  {'density':>7}  {'pure [ms]':>10}  {'compiled [ms]':>13}  {'speedup':>7}"
    print(header)
    print("-" * len(header))
    for h, w in SIZES:
        for density in DENSITIES:
            masks = [
                (rng.random((h, w)) < density).astype(np.uint8)
                for _ in range(args.masks_per_case)
            ]
            t_pure, r_pure = _time(_kernels_py.largest_rectangle, masks, args.repeats)
            if _compiled is None:
                print(f"{h}x{w:>4}  {density:>7.1f}  {t_pure * 1e3:>10.2f}  "
                      f"{'n/a':>13}  {'n/a':>7}")
                continue
            t_comp, r_comp = _time(_compiled.largest_rectangle, masks, args.repeats)
            if r_pure != r_comp:
                print(f"BACKEND MISMATCH at {h}x{w} density {density}: "
                      f"{r_pure} vs {r_comp}")
                return 1
            print(f"{h}x{w:>4}  {density:>7.1f}  {t_pure * 1e3:>10.2f}  "
                  f"{t_comp * 1e3:>13.2f}  {t_pure / t_comp:>6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
