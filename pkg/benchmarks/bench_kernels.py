"""Time the compiled and pure-Python kernel backends on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from jointspec import kernels


def cases(rng):
    for n in (8, 32, 64):
        cost = rng.uniform(0, 1, (n, n))
        yield f"lap_solve n={n}", lambda k, c=cost: k.lap_solve(c)
    for n in (16, 48):
        w = sum(t * np.eye(n)[rng.permutation(n)] for t in rng.dirichlet(np.ones(4)))
        yield f"perfect_matching n={n}", lambda k, w=w: k.perfect_matching(w, 1e-10)
    for n, m in ((4, 4), (8, 6)):
        masks = np.array([1 << j for j in range(m)], dtype=np.int64)
        blocks = rng.standard_normal((m, n, n)) + 1j * rng.standard_normal((m, n, n))
        yield f"materialize n={n} m={m}", lambda k, a=masks, b=blocks, n=n, m=m: k.materialize(a, b, m, n)
    pairs = [(int(a), int(b)) for a, b in rng.integers(0, 1 << 10, (2000, 2))]
    yield "blade_sign x2000 (m=10)", lambda k, p=pairs: [k.blade_sign(a, b) for a, b in p]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(np.random.default_rng(0)):
        times = {}
        for name in names:
            mod = backends[name]
            number = max(1, int(0.05 / max(timeit.timeit(lambda: fn(mod), number=1), 1e-6)))
            times[name] = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
        line = f"{label:28s}" + "".join(f"{times[n] * 1e3:12.3f}ms" for n in names)
        if "cython" in times and "python" in times:
            line += f"  {times['python'] / times['cython']:9.1f}x"
        print(line)
    if len(names) == 1:
        print("compiled backend unavailable; only the pure-Python kernels were timed")


if __name__ == "__main__":
    main()
