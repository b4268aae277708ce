"""Compiled versus pure-Python kernels on the workloads the package runs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--max-level M]
"""
import argparse
import random
import timeit
from fractions import Fraction

from oscspec import _pykernels
from oscspec.generators import GeneratorSet
from oscspec.kernels import common_scale, scaled

try:
    from oscspec import _ckernels
except ImportError:
    _ckernels = None


def workloads(max_level):
    gens = GeneratorSet.build(max_level)
    grid, dens, rows = gens.table(max_level)
    f = gens.phi(max_level)
    pts = sorted({Fraction(j, 20000) for j in range(20001)}.union(f.xs))
    den = common_scale(list(f.xs) + pts)
    X = scaled(f.xs, den)
    Yn = [y.numerator for y in f.ys]
    Yd = [y.denominator for y in f.ys]
    Q = scaled(pts, den)
    rng = random.Random(0)
    w = [rng.randint(-1024, 1024) for _ in rows]
    sums = _pykernels.dot_rows(w, rows)
    return {
        "interp_sorted": lambda k: k.interp_sorted(X, Yn, Yd, Q),
        "dot_rows": lambda k: k.dot_rows(w, rows),
        "argextrema": lambda k: k.argextrema(sums, dens),
    }, {"points": len(Q), "breakpoints": len(X), "grid": len(grid), "rows": len(rows)}


def _plain(result):
    # tuples of lists and lists of tuples compare equal after this
    if isinstance(result, (list, tuple)):
        return [_plain(r) for r in result]
    return result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--max-level", type=int, default=12)
    args = ap.parse_args()
    jobs, sizes = workloads(args.max_level)
    print("sizes:", ", ".join(f"{k}={v}" for k, v in sizes.items()))
    print(f"{'kernel':15s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, job in jobs.items():
        py = min(timeit.repeat(lambda: job(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:15s} {py:10.2f} {'n/a':>10s}")
            continue
        if _plain(job(_ckernels)) != _plain(job(_pykernels)):
            raise SystemExit(f"{name}: backends disagree")
        cy = min(timeit.repeat(lambda: job(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:15s} {py:10.2f} {cy:10.2f} {py / cy:7.2f}x")


if __name__ == "__main__":
    main()
