"""Compare the compiled coordinate-descent kernel against the pure-NumPy twin.

Times a warm-started lasso path and a multi-screen fit on synthetic data
with each kernel selected in-process:

    python benchmarks/kernel_benchmark.py --n 100 --p 500,2000 --grid 50
"""

import argparse
import time

import numpy as np

from mspreg import ScenarioConfig, gen_scenario, standardize
from mspreg.estimators import fit_msp, msp_default_lambda
from mspreg.experiments import lambda_grid, trace_path
from mspreg.solver import kernel_override


def time_kernel(kernel: str, data, grid_size: int) -> dict:
    design = standardize(data)
    grid = lambda_grid(design, design.y, grid_size)
    with kernel_override(kernel):
        t0 = time.perf_counter()
        trace_path(data, "lasso", grid)
        t_path = time.perf_counter() - t0
        lam = msp_default_lambda(design, design.y)
        t0 = time.perf_counter()
        fit_msp(design, design.y, lam, lam)
        t_msp = time.perf_counter() - t0
    return {"path": t_path, "msp": t_msp}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--p", default="500,2000", help="comma-separated column counts")
    parser.add_argument("--grid", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = [int(v) for v in args.p.split(",")]
    header = f"{'n':>6} {'p':>8} {'task':>6} {'compiled':>10} {'pure':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for p in sizes:
        config = ScenarioConfig(n=args.n, p=p, scenario=1, sigma=0.25, seed=args.seed)
        data = gen_scenario(config)
        try:
            compiled = time_kernel("compiled", data, args.grid)
        except RuntimeError:
            print("compiled kernel unavailable; build the extension first "
                  "(pip install -e . --no-build-isolation)")
            return
        pure = time_kernel("pure", data, args.grid)
        for task in ("path", "msp"):
            ratio = pure[task] / compiled[task] if compiled[task] > 0 else float("inf")
            print(f"{args.n:>6} {p:>8} {task:>6} {compiled[task]:>9.3f}s {pure[task]:>9.3f}s "
                  f"{ratio:>7.1f}x")


if __name__ == "__main__":
    main()
