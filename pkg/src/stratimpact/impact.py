"""Impact and importance scores from partial dependence curves.

Impact is the mean magnitude of a feature's PD curve over its unique values.
Importance weights the same magnitudes by how often each value occurs.
Categorical curves are mean-centered first, so the reference level drops out.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, Histogram, histogram, sample_rows
from .errors import DataError, NumericError
from .forest import tree_seeds
from .pd_estimation import CatPD, PDCurve, StratParams, catstratpd, stratpd_numeric

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureScore:
    feature: int
    name: str
    kind: str
    impact_raw: float
    impact_norm: float
    importance_raw: float
    importance_norm: float
    impact_sd: float = 0.0
    importance_sd: float = 0.0
    coverage: float = 0.0


@dataclass(frozen=True)
class ImportanceReport:
    scores: tuple[FeatureScore, ...]  # importance_norm descending, ties by feature index
    trials: int = 1
    sample_frac: float = 1.0
    mode: str = "single"
    seed: int = 1
    params: StratParams = StratParams()

    def by_feature(self) -> list[FeatureScore]:
        return sorted(self.scores, key=lambda s: s.feature)

    def column(self, attr: str) -> np.ndarray:
        """Per-feature values of one score field, in feature-index order."""
        return np.array([getattr(s, attr) for s in self.by_feature()])


def impact_numeric(curve: PDCurve) -> float:
    if len(curve.pd) == 0:
        raise DataError("empty partial dependence curve")
    return float(np.sum(np.abs(curve.pd)) / len(curve.pd))


def importance_numeric(curve: PDCurve, h: Histogram) -> float:
    if len(h.values) != len(curve.xs) or np.any(h.values != curve.xs):
        raise DataError("histogram values do not match the curve's x values")
    # same summation path as impact_numeric, so unit counts give identical results
    return float(np.sum(h.counts * np.abs(curve.pd)) / h.counts.sum())


def impact_categorical(c: CatPD) -> float:
    if not c.observed.any():
        raise DataError("no observed category levels")
    return float(np.sum(np.abs(c.pd_centered[c.observed])) / c.observed.sum())


def importance_categorical(c: CatPD, h: Histogram) -> float:
    """Count-weighted mean |centered PD|; unobserved levels add 0 but keep their mass in ``n``."""
    if not c.observed.any():
        raise DataError("no observed category levels")
    codes = h.values.astype(np.int64)
    if np.any(codes >= len(c.levels)) or np.any(codes < 0):
        raise DataError("histogram holds levels outside the curve")
    counts = np.zeros(len(c.levels))
    counts[codes] = h.counts
    if np.any(c.observed & (counts == 0)):
        raise DataError("histogram is missing an observed level")
    mag = np.where(c.observed, np.abs(c.pd_centered), 0.0)
    return float(np.sum(counts * mag) / counts.sum())


def normalize_scores(raw) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    if np.any(raw < 0):
        raise DataError("scores must be non-negative")
    total = raw.sum()
    if not total > 0:
        raise NumericError("all scores are zero; no signal to normalize")
    return raw / total


@dataclass(frozen=True)
class _Raw:
    impact: float
    importance: float
    coverage: float


def feature_curve(ds: Dataset, j: int, params: StratParams) -> PDCurve | CatPD:
    return catstratpd(ds, j, params) if ds.is_categorical(j) else stratpd_numeric(ds, j, params)


def _score_feature(ds: Dataset, j: int, params: StratParams) -> _Raw | None:
    h = histogram(ds, j)
    if h.n_unique < 2:
        log.warning("feature %s is constant; impact set to 0", ds.feature_names[j])
        return None
    if ds.is_categorical(j):
        c = catstratpd(ds, j, params)
        return _Raw(impact_categorical(c), importance_categorical(c, h), c.coverage)
    curve = stratpd_numeric(ds, j, params)
    return _Raw(impact_numeric(curve), importance_numeric(curve, h), curve.coverage)


def _raw_scores(ds: Dataset, params: StratParams, jobs: int = 1) -> list[_Raw | None]:
    if jobs > 1 and ds.p > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda j: _score_feature(ds, j, params), range(ds.p)))
    return [_score_feature(ds, j, params) for j in range(ds.p)]


def _sorted(scores: list[FeatureScore]) -> tuple[FeatureScore, ...]:
    return tuple(sorted(scores, key=lambda s: (-s.importance_norm, s.feature)))


def compute_all(ds: Dataset, params: StratParams = StratParams(), jobs: int = 1) -> ImportanceReport:
    """Impact and importance for every feature of ``ds``.

    Constant features score 0 with a warning; an error is raised only when no
    feature carries any signal.
    """
    raws = _raw_scores(ds, params, jobs)
    if all(r is None for r in raws):
        raise NumericError("every feature is constant; no signal")
    impact = np.array([r.impact if r else 0.0 for r in raws])
    importance = np.array([r.importance if r else 0.0 for r in raws])
    impact_norm = normalize_scores(impact)
    importance_norm = normalize_scores(importance)
    scores = [
        FeatureScore(
            feature=j,
            name=ds.feature_names[j],
            kind=ds.feature_kinds[j].value,
            impact_raw=float(impact[j]),
            impact_norm=float(impact_norm[j]),
            importance_raw=float(importance[j]),
            importance_norm=float(importance_norm[j]),
            coverage=raws[j].coverage if raws[j] else 0.0,
        )
        for j in range(ds.p)
    ]
    return ImportanceReport(_sorted(scores), 1, 1.0, "single", params.seed, params)


def stability_trials(
    ds: Dataset,
    params: StratParams = StratParams(),
    trials: int = 30,
    frac: float = 0.75,
    mode: str = "subsample",
    seed: int = 1,
    jobs: int = 1,
) -> ImportanceReport:
    """Mean and sample standard deviation of scores over resampled datasets.

    ``mode`` is ``"subsample"`` (without replacement) or ``"bootstrap"``.
    Each trial's resampling and stratification seeds derive from ``seed``.
    """
    if trials < 1:
        raise DataError("trials must be >= 1")
    if mode not in ("subsample", "bootstrap"):
        raise DataError(f"unknown resampling mode {mode!r}")
    if not 0.0 < frac <= 1.0:
        raise DataError(f"frac must be in (0, 1], got {frac}")
    if math.ceil(frac * ds.n) < 2:
        raise DataError("resample would hold fewer than 2 rows")

    runs = []
    for s in tree_seeds(seed, trials):
        sub = sample_rows(ds, frac, replace=(mode == "bootstrap"), seed=s)
        runs.append(compute_all(sub, replace(params, seed=s), jobs))

    def stack(attr):
        return np.array([r.column(attr) for r in runs])

    ddof = 1 if trials > 1 else 0
    cov = stack("coverage").mean(axis=0)
    imp_raw, imp_norm = stack("impact_raw").mean(axis=0), stack("impact_norm")
    ipt_raw, ipt_norm = stack("importance_raw").mean(axis=0), stack("importance_norm")
    scores = [
        FeatureScore(
            feature=j,
            name=ds.feature_names[j],
            kind=ds.feature_kinds[j].value,
            impact_raw=float(imp_raw[j]),
            impact_norm=float(imp_norm[:, j].mean()),
            importance_raw=float(ipt_raw[j]),
            importance_norm=float(ipt_norm[:, j].mean()),
            impact_sd=float(imp_norm[:, j].std(ddof=ddof)),
            importance_sd=float(ipt_norm[:, j].std(ddof=ddof)),
            coverage=float(cov[j]),
        )
        for j in range(ds.p)
    ]
    return ImportanceReport(_sorted(scores), trials, frac, mode, seed, params)
