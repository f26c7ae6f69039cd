"""Time the compiled pair-sum kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--reps 2000] [--sizes 10,50,200] [--repeat 5]

Each kernel is run on a ``(reps, N)`` block of exponential draws, which is
the shape the Monte Carlo loops feed it. Reported times are the best of
``--repeat`` runs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from spacegof import _pykernels

try:
    from spacegof import _core
except ImportError:  # pragma: no cover
    _core = None


def cases(x: np.ndarray):
    xs = np.sort(x, axis=1)
    return {
        "pair_power_sums r=1.5": (lambda m: m.pair_power_sums(x, 1.5)),
        "pair_power_sums r=1": (lambda m: m.pair_power_sums(x, 1.0)),
        "sq_diff_sums": (lambda m: m.sq_diff_sums(x)),
        "abs_diff_sums_sorted": (lambda m: m.abs_diff_sums_sorted(xs)),
    }


def best_time(func, repeat: int) -> float:
    timer = timeit.Timer(func)
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=loops)) / loops


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--sizes", default="10,50,200")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _core is None:
        print("compiled extension not built; only the numpy fallback is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<24}{'N':>6}{'numpy [ms]':>14}{'cython [ms]':>14}{'speedup':>10}{'max rel diff':>15}")
    for size in (int(s) for s in args.sizes.split(",")):
        x = rng.standard_exponential((args.reps, size))
        for name, call in cases(x).items():
            t_py = best_time(lambda: call(_pykernels), args.repeat)
            if _core is None:
                print(f"{name:<24}{size:>6}{t_py * 1e3:>14.3f}{'-':>14}{'-':>10}{'-':>15}")
                continue
            t_c = best_time(lambda: call(_core), args.repeat)
            a, b = call(_pykernels), call(_core)
            diff = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
            print(f"{name:<24}{size:>6}{t_py * 1e3:>14.3f}{t_c * 1e3:>14.3f}{t_py / t_c:>10.1f}{diff:>15.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
