"""Time the compiled and pure-Python scheduling kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from tdflexsim import _kernels


def cases(rng):
    for n in (8, 64):
        for cells in (10, 100, 1000):
            nd = rng.integers(0, n + 1, cells + 1).astype(np.int64)
            yield f"tdflex_fill L={cells} N={n}", "tdflex_fill", (nd, n)
    for n in (8, 12):
        yield f"bruteforce_min_icr N={n}", "bruteforce_min_icr", (n // 2, n // 2 + 1, n, 1)
    row_a = rng.integers(2, 4, 64).astype(np.int8)
    row_b = rng.integers(2, 4, 64).astype(np.int8)
    yield "icr_count N=64", "icr_count", (row_a, row_b, 0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = _kernels.backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the Python kernels only")
    names = [n for n in ("compiled", "python") if n in backends]
    print(f"{'case':34s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn, fargs in cases(np.random.default_rng(0)):
        times = []
        for name in names:
            f = getattr(backends[name], fn)
            t = timeit.Timer(lambda: f(*fargs))
            number, _ = t.autorange()
            times.append(min(t.repeat(args.repeat, number)) / number)
        line = f"{label:34s}" + "".join(f"{x * 1e6:12.1f}us" for x in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:11.0f}x"
        print(line)


if __name__ == "__main__":
    main()
