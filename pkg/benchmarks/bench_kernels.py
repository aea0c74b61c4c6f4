"""Benchmark the clustering kernels: numba path vs pure-numpy path.

Runs each kernel on the same random inputs through both implementations,
checks they agree, and reports best-of-N wall times plus the speedup.

Usage:
    python3 benchmarks/bench_kernels.py [--n 20000] [--dim 64] [--k 16] [--repeat 7]
"""
import argparse
import time

import numpy as np

from resumejudge import kernels


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="number of points")
    ap.add_argument("--dim", type=int, default=64, help="vector dimension")
    ap.add_argument("--k", type=int, default=16, help="number of centers")
    ap.add_argument("--repeat", type=int, default=7, help="timing repeats (best is kept)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    x = rng.normal(size=(args.n, args.dim))
    centers = rng.normal(size=(args.k, args.dim))
    labels = rng.integers(0, args.k, size=args.n).astype(np.int64)
    current = rng.uniform(1.0, 50.0, size=args.n)

    pairs = [
        (
            "assign_labels",
            lambda: kernels._assign_labels_nb(x, centers),
            lambda: kernels._assign_labels_np(x, centers),
        ),
        (
            "sum_by_label",
            lambda: kernels._sum_by_label_nb(x, labels, args.k),
            lambda: kernels._sum_by_label_np(x, labels, args.k),
        ),
        (
            "min_sqdist",
            lambda: kernels._min_sqdist_nb(x, centers[0], current),
            lambda: kernels._min_sqdist_np(x, centers[0], current),
        ),
    ]

    # compile outside the timed region, and confirm the paths agree
    for name, nb, np_ in pairs:
        got_nb, got_np = nb(), np_()
        if not isinstance(got_nb, tuple):
            got_nb, got_np = (got_nb,), (got_np,)
        for a, b in zip(got_nb, got_np):
            worst = float(np.max(np.abs(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))))
            if worst > 1e-9:
                raise SystemExit(f"{name}: paths disagree by {worst:.3e}")

    print(f"n={args.n} dim={args.dim} k={args.k} repeat={args.repeat} (best-of)")
    print(f"{'kernel':<16} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, nb, np_ in pairs:
        t_nb = best_of(nb, args.repeat)
        t_np = best_of(np_, args.repeat)
        print(f"{name:<16} {t_nb * 1e3:>10.3f}ms {t_np * 1e3:>10.3f}ms {t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()
