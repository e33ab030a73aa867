"""Top-k forest MAE curves for several rankers on a CSV or the linear synth.

Prints one row per (method, k). For real data pass --data/--target; the same
comparison is available as `stratimpact topk`.
"""

import argparse

from stratimpact.dataset import load_csv
from stratimpact.evaluator import METHODS, compare_rankings
from stratimpact.forest import TreeParams
from stratimpact.synth import SynthSpec, gen_linear


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data")
    ap.add_argument("--target", default="y")
    ap.add_argument("--categorical", default="")
    ap.add_argument("--methods", default=",".join(METHODS))
    ap.add_argument("--kmax", type=int)
    ap.add_argument("--folds", type=int, default=5)
    ap.add_argument("--n-trees", type=int, default=40)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    if args.data:
        ds = load_csv(args.data, args.target, [c for c in args.categorical.split(",") if c])
    else:
        ds = gen_linear(SynthSpec("linear", 2000, args.seed, (1.0, 2.0, 4.0), ((0, 1),) * 3, 0.1))
    curves = compare_rankings(
        ds, args.methods.split(","), args.kmax or ds.p, args.folds, TreeParams(seed=args.seed), args.n_trees, args.seed
    )
    print(f"{'method':>24}  k  mae       sd")
    for c in curves:
        for k, m, s in zip(c.k_values, c.mae, c.mae_sd):
            print(f"{c.method:>24}  {k}  {m:.5f}  {s:.5f}")


if __name__ == "__main__":
    main()
