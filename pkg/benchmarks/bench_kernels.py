"""Compare the compiled and pure-Python RK4 kernels.

    python3 benchmarks/bench_kernels.py [--steps N] [--repeat R]

Both backends integrate the same family V trajectory; the script checks that
their outputs are bit-identical and prints the best wall time of each.
"""

import argparse
import timeit

import numpy as np

from quadradyn.families import FamilySpec, build_family
from quadradyn.kernels import available_backends, rk4_poly


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    field = build_family(FamilySpec("V", b=-1.0, c=1.0, s=1))
    start, h = (0.5, 0.1), 1e-3
    results, timings = {}, {}
    for backend in available_backends():
        results[backend] = rk4_poly(field, start, h, args.steps, backend=backend)
        timings[backend] = min(timeit.repeat(
            lambda b=backend: rk4_poly(field, start, h, args.steps, backend=b),
            number=1, repeat=args.repeat))

    print(f"{args.steps} RK4 steps, best of {args.repeat}")
    for backend, seconds in timings.items():
        print(f"  {backend:7s} {seconds * 1e3:10.3f} ms  ({seconds / args.steps * 1e9:8.1f} ns/step)")
    if len(timings) == 2:
        (a, sa), (b, sb) = results["cython"], results["python"]
        same = sa == sb and np.array_equal(a, b)
        print(f"  speed-up {timings['python'] / timings['cython']:.1f}x, bit-identical: {same}")
    else:
        print("  compiled kernel not built; only the pure-Python backend ran")


if __name__ == "__main__":
    main()
