"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .dataset import load_csv, to_csv_text
from .errors import DataError, NumericError
from .evaluator import METHODS, evaluate_rankings, rank_features
from .export import atomic_write, catpd_csv, curves_csv, pd_curve_csv, rankings_csv, report_csv, report_json
from .forest import TreeParams
from .impact import compute_all, stability_trials
from .pd_estimation import StratParams, catstratpd, stratpd_numeric
from .synth import SynthSpec, gen_linear, gen_quadratic

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("stratimpact")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CliConfig:
    command: str
    data: str | None = None
    target: str | None = None
    categorical: list[str] = field(default_factory=list)
    min_samples_leaf: int = 20
    trials: int = 1
    sample_frac: float | None = None
    mode: str = "subsample"
    seed: int = 1
    output: str | None = None
    format: str = "csv"
    jobs: int = 1
    # command-specific
    feature: str | None = None
    rankers: list[str] = field(default_factory=list)
    kmax: int | None = None
    folds: int = 5
    n_trees: int = 40
    rankings_output: str | None = None
    kind: str | None = None
    n: int = 1000
    noise_feature: bool = False
    betas: list[float] = field(default_factory=list)
    ranges: list[tuple[float, float]] = field(default_factory=list)
    noise_sd: float = 0.0

    @property
    def effective_sample_frac(self) -> float:
        if self.sample_frac is not None:
            return self.sample_frac
        return 0.75 if self.trials > 1 else 1.0


def _csv_list(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _float_list(s: str) -> list[float]:
    try:
        return [float(x) for x in _csv_list(s)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None


def _range_list(s: str) -> list[tuple[float, float]]:
    out = []
    for part in _csv_list(s):
        try:
            lo, hi = part.split(":")
            out.append((float(lo), float(hi)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi ranges, got {part!r}") from None
    return out


def _default_jobs() -> int:
    env = os.environ.get("STRATIMPACT_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stratimpact", description="Nonparametric feature impact and importance from data.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def data_args(p):
        p.add_argument("--data", required=True, help="input CSV with a header row")
        p.add_argument("--target", required=True, help="response column")
        p.add_argument("--categorical", type=_csv_list, default=[], help="comma-separated categorical columns")
        p.add_argument("--min-samples-leaf", type=int, default=20)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("-o", "--output", help="output path (default: stdout)")
        p.add_argument("--jobs", type=int, default=None, help="worker threads (default: $STRATIMPACT_JOBS or core count)")

    p = sub.add_parser("importance", help="impact/importance report")
    data_args(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--sample-frac", type=float, default=None, help="default 0.75 when trials > 1, else 1.0")
    p.add_argument("--mode", choices=("subsample", "bootstrap"), default="subsample")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("pd", help="export one feature's partial dependence curve")
    data_args(p)
    p.add_argument("--feature", required=True)

    p = sub.add_parser("topk", help="top-k cross-validated error curves per ranking method")
    data_args(p)
    p.add_argument("--rankers", type=_csv_list, default=["stratimpact-importance", "spearman", "pca"], help=f"any of {','.join(METHODS)}")
    p.add_argument("--kmax", type=int, default=None, help="default: number of features")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--n-trees", type=int, default=40)
    p.add_argument("--rankings-output", help="also write per-method rankings CSV here")

    p = sub.add_parser("synth", help="write a synthetic dataset CSV")
    p.add_argument("kind", choices=("quadratic", "linear"))
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--noise-feature", action="store_true", help="quadratic: add unused x3")
    p.add_argument("--betas", type=_float_list, default=[1.0, 2.0, 4.0])
    p.add_argument("--ranges", type=_range_list, default=None, help="lo:hi per feature (default 0:1 each)")
    p.add_argument("--noise-sd", type=float, default=0.0)
    p.add_argument("-o", "--output")
    return parser


def parse_config(argv: list[str]) -> CliConfig:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(command=ns.command)
    for k, v in vars(ns).items():
        if k == "command" or v is None:
            continue
        if hasattr(cfg, k):
            setattr(cfg, k, v)
    if ns.command != "synth":
        cfg.jobs = ns.jobs if ns.jobs is not None else _default_jobs()
        if cfg.jobs < 1:
            raise UsageError("--jobs must be >= 1")
    if ns.command == "synth" and not cfg.ranges:
        cfg.ranges = [(0.0, 1.0)] * len(cfg.betas)
    return cfg


def _emit(cfg: CliConfig, text: str) -> None:
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def run(cfg: CliConfig) -> int:
    start = time.perf_counter()
    if cfg.command == "synth":
        if cfg.kind == "quadratic":
            ds = gen_quadratic(cfg.n, cfg.seed, cfg.noise_feature)
        else:
            ds = gen_linear(SynthSpec("linear", cfg.n, cfg.seed, tuple(cfg.betas), tuple(cfg.ranges), cfg.noise_sd))
        _emit(cfg, to_csv_text(ds))
        return EXIT_OK

    ds = load_csv(cfg.data, cfg.target, cfg.categorical)
    strat = StratParams(min_samples_leaf=cfg.min_samples_leaf, seed=cfg.seed)

    if cfg.command == "importance":
        if cfg.trials > 1 or cfg.sample_frac is not None:
            report = stability_trials(ds, strat, cfg.trials, cfg.effective_sample_frac, cfg.mode, cfg.seed, cfg.jobs)
        else:
            report = compute_all(ds, strat, cfg.jobs)
        if cfg.format == "json":
            meta = {"version": __version__, "data": os.path.basename(cfg.data), "target": cfg.target,
                    "wall_time_s": round(time.perf_counter() - start, 3)}
            _emit(cfg, report_json(report, meta))
        else:
            _emit(cfg, report_csv(report))
        return EXIT_OK

    if cfg.command == "pd":
        j = ds.index_of(cfg.feature)
        if ds.is_categorical(j):
            _emit(cfg, catpd_csv(catstratpd(ds, j, strat), ds))
        else:
            _emit(cfg, pd_curve_csv(stratpd_numeric(ds, j, strat)))
        return EXIT_OK

    if cfg.command == "topk":
        unknown = [m for m in cfg.rankers if m not in METHODS]
        if unknown or not cfg.rankers:
            raise UsageError(f"unknown rankers {unknown}; choose from {', '.join(METHODS)}")
        kmax = cfg.kmax if cfg.kmax is not None else ds.p
        if not 1 <= kmax <= ds.p:
            raise UsageError(f"--kmax must be in [1, {ds.p}]")
        if not 2 <= cfg.folds <= ds.n:
            raise UsageError(f"--folds must be in [2, {ds.n}]")
        tree = TreeParams(min_samples_leaf=cfg.min_samples_leaf, seed=cfg.seed)
        rankings = [rank_features(ds, m, tree, cfg.n_trees, cfg.folds, cfg.seed, strat) for m in cfg.rankers]
        curves = evaluate_rankings(ds, rankings, kmax, cfg.folds, tree, cfg.n_trees, cfg.seed)
        if cfg.rankings_output:
            atomic_write(cfg.rankings_output, rankings_csv(rankings, ds))
        _emit(cfg, curves_csv(curves))
        return EXIT_OK

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as e:
        print(f"stratimpact: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"stratimpact: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as e:
        print(f"stratimpact: numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
