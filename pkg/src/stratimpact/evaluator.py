"""Top-k evaluation: cross-validated forest error using each ranking's best k features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError
from .forest import TreeParams, fit_forest, permutation_importance
from .impact import compute_all
from .pd_estimation import StratParams
from .rankers import Ranking, cv_mae, drop_column_scores, fold_ids, ols_t_scores, pca_load_scores, spearman_scores

METHODS = (
    "stratimpact-importance",
    "stratimpact-impact",
    "spearman",
    "pca",
    "ols",
    "permutation",
    "dropcol",
)


@dataclass(frozen=True)
class MAECurve:
    method: str
    k_values: np.ndarray
    mae: np.ndarray
    mae_sd: np.ndarray


def topk_error_curve(
    ds: Dataset,
    ranking: Ranking,
    k_max: int,
    folds: int = 5,
    params: TreeParams = TreeParams(),
    n_trees: int = 40,
    seed: int = 1,
) -> MAECurve:
    """Fold-mean and fold-sd of forest MAE trained on the top ``k`` features, k = 1..k_max.

    Fold assignment and forest seeds depend only on ``(n, folds, seed)`` and
    ``params``, so curves from different rankings are directly comparable.
    Selected columns keep their dataset order; equal feature sets give
    identical models.
    """
    if not 1 <= k_max <= ds.p:
        raise DataError(f"k_max must be in [1, {ds.p}], got {k_max}")
    if len(ranking.scores) != ds.p:
        raise DataError("ranking does not match the dataset's feature count")
    ids = fold_ids(ds.n, folds, seed)
    order = ranking.order
    mae, sd = np.empty(k_max), np.empty(k_max)
    for k in range(1, k_max + 1):
        cols = np.sort(order[:k])
        errs = cv_mae(ds.X[:, cols], ds.y, ids, params, n_trees)
        mae[k - 1] = errs.mean()
        sd[k - 1] = errs.std(ddof=1)
    return MAECurve(ranking.method, np.arange(1, k_max + 1), mae, sd)


def permutation_ranking(ds: Dataset, params: TreeParams = TreeParams(), n_trees: int = 40, seed: int = 1, holdout: float = 0.2) -> Ranking:
    """Permutation importance of a forest trained on a seeded 80/20 split."""
    perm = np.random.default_rng(seed).permutation(ds.n)
    n_test = max(1, int(round(holdout * ds.n)))
    test, train = perm[:n_test], perm[n_test:]
    model = fit_forest(ds.X[train], ds.y[train], params, n_trees)
    scores = permutation_importance(model, ds.X[test], ds.y[test], n_repeats=5, seed=seed)
    return Ranking("permutation", np.maximum(scores, 0.0))


def rank_features(
    ds: Dataset,
    method: str,
    params: TreeParams = TreeParams(),
    n_trees: int = 40,
    folds: int = 5,
    seed: int = 1,
    strat: StratParams | None = None,
) -> Ranking:
    if method not in METHODS:
        raise DataError(f"unknown ranking method {method!r}; choose from {', '.join(METHODS)}")
    if method.startswith("stratimpact"):
        strat = strat or StratParams(min_samples_leaf=params.min_samples_leaf, seed=seed)
        report = compute_all(ds, strat)
        attr = "importance_raw" if method == "stratimpact-importance" else "impact_raw"
        return Ranking(method, report.column(attr))
    if method == "spearman":
        return spearman_scores(ds)
    if method == "pca":
        return pca_load_scores(ds)
    if method == "ols":
        return ols_t_scores(ds)
    if method == "permutation":
        return permutation_ranking(ds, params, n_trees, seed)
    return drop_column_scores(ds, params, n_trees, folds, seed)


def evaluate_rankings(
    ds: Dataset,
    rankings: list[Ranking],
    k_max: int,
    folds: int = 5,
    params: TreeParams = TreeParams(),
    n_trees: int = 40,
    seed: int = 1,
) -> list[MAECurve]:
    return [topk_error_curve(ds, r, k_max, folds, params, n_trees, seed) for r in rankings]


def compare_rankings(
    ds: Dataset,
    methods: list[str],
    k_max: int,
    folds: int = 5,
    params: TreeParams = TreeParams(),
    n_trees: int = 40,
    seed: int = 1,
    strat: StratParams | None = None,
) -> list[MAECurve]:
    """Rank with each method, then evaluate every ranking on the same folds and forest seeds."""
    if not methods:
        raise DataError("no ranking methods given")
    for m in methods:
        if m not in METHODS:
            raise DataError(f"unknown ranking method {m!r}; choose from {', '.join(METHODS)}")
    rankings = [rank_features(ds, m, params, n_trees, folds, seed, strat) for m in methods]
    return evaluate_rankings(ds, rankings, k_max, folds, params, n_trees, seed)
