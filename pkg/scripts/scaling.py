"""Wall time of compute_all as n grows, numeric-only and with 50-level categoricals."""

import argparse
import time

import numpy as np

from stratimpact.dataset import Dataset, FeatureKind
from stratimpact.impact import compute_all


def make(n, n_cat, seed=0):
    rng = np.random.default_rng(seed)
    n_num = 10 - n_cat
    num = rng.uniform(size=(n, n_num))
    cat = rng.integers(0, 50, size=(n, n_cat)).astype(float)
    effects = rng.normal(size=(n_cat, 50))
    y = num @ np.arange(1.0, n_num + 1) + rng.normal(0, 0.1, n)
    for k in range(n_cat):
        y += effects[k][cat[:, k].astype(int)]
    kinds = (FeatureKind.NUMERIC,) * n_num + (FeatureKind.CATEGORICAL,) * n_cat
    return Dataset(tuple(f"f{i}" for i in range(10)), kinds, np.c_[num, cat], y)


def best_time(ds, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        compute_all(ds, jobs=1)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="2500,5000,10000,20000,40000")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    for n_cat in (0, 5):
        prev = None
        print(f"\n{n_cat} categorical features of cardinality 50, p=10")
        for n in sizes:
            t = best_time(make(n, n_cat), args.repeats)
            ratio = f"{t / prev:.2f}x" if prev else ""
            print(f"  n={n:>6}  {t:7.3f}s  {ratio}")
            prev = t


if __name__ == "__main__":
    main()
