"""Mean and sd of normalized scores over resampled trials, e.g. 30 x 75% subsamples."""

import argparse

from stratimpact.dataset import load_csv
from stratimpact.impact import stability_trials
from stratimpact.synth import gen_quadratic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", help="CSV file (default: quadratic synth, n=1000)")
    ap.add_argument("--target", default="y")
    ap.add_argument("--categorical", default="")
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--frac", type=float, default=0.75)
    ap.add_argument("--mode", choices=("subsample", "bootstrap"), default="subsample")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    if args.data:
        ds = load_csv(args.data, args.target, [c for c in args.categorical.split(",") if c])
    else:
        ds = gen_quadratic(1000, seed=args.seed, with_noise_feature=True)
    r = stability_trials(ds, trials=args.trials, frac=args.frac, mode=args.mode, seed=args.seed)
    print(f"{'feature':>12}  impact_norm (sd)     importance_norm (sd)")
    for s in r.scores:
        print(f"{s.name:>12}  {s.impact_norm:.4f} ({s.impact_sd:.4f})   {s.importance_norm:.4f} ({s.importance_sd:.4f})")


if __name__ == "__main__":
    main()
