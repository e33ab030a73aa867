"""Partial dependence estimated directly from data by stratification.

For feature ``j`` a tree is grown on every *other* column. Within each leaf the
other features are roughly constant, so changes in ``y`` across that leaf's
``x_j`` values estimate the partial derivative of ``y`` with respect to ``x_j``.
Numeric features integrate those local slopes; categorical features merge
within-leaf level deltas into one mean-centered curve.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError, NumericError
from .forest import TreeParams, fit_tree, leaf_groups, tree_seeds

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StratParams:
    min_samples_leaf: int = 20
    n_strat_trees: int = 1
    bootstrap_strata: bool = False
    seed: int = 1
    min_slopes_per_x: int = 10

    def __post_init__(self):
        if self.min_samples_leaf < 1:
            raise DataError("min_samples_leaf must be >= 1")
        if self.min_slopes_per_x < 1:
            raise DataError("min_slopes_per_x must be >= 1")
        if self.n_strat_trees < 1:
            raise DataError("n_strat_trees must be >= 1")


@dataclass(frozen=True)
class SlopeSegments:
    """Columnar batch of within-leaf finite-difference segments."""

    lo: np.ndarray
    hi: np.ndarray
    slope: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return len(self.slope)

    @staticmethod
    def concat(parts: list["SlopeSegments"]) -> "SlopeSegments":
        if not parts:
            e = np.empty(0)
            return SlopeSegments(e, e, e, np.empty(0, dtype=np.int64))
        return SlopeSegments(*(np.concatenate([getattr(s, a) for s in parts]) for a in ("lo", "hi", "slope", "weight")))


@dataclass(frozen=True)
class PDCurve:
    feature: int
    xs: np.ndarray
    pd: np.ndarray
    counts: np.ndarray
    support: np.ndarray  # per interval, total segment weight covering it

    @property
    def coverage(self) -> float:
        if len(self.support) == 0:
            return 0.0
        return float(np.mean(self.support > 0))


@dataclass(frozen=True)
class CatPD:
    feature: int
    levels: np.ndarray  # codes 0..K-1
    pd_centered: np.ndarray  # 0 for unobserved levels
    observed: np.ndarray  # bool per level
    counts: np.ndarray  # samples per level in the data

    @property
    def coverage(self) -> float:
        present = self.counts > 0
        return float(self.observed[present].mean()) if present.any() else 0.0


def leaf_slopes(x, y) -> SlopeSegments:
    """Finite differences between consecutive unique-x means of one leaf."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise DataError(f"x has {len(x)} values but y has {len(y)}")
    ux, inv, cnt = np.unique(x, return_inverse=True, return_counts=True)
    means = np.bincount(inv, weights=y) / cnt
    return SlopeSegments(
        lo=ux[:-1],
        hi=ux[1:],
        slope=np.diff(means) / np.diff(ux),
        weight=cnt[:-1] + cnt[1:],
    )


def merge_slopes(segments: SlopeSegments, xs, min_segments: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Weighted mean slope per interval ``[xs[k], xs[k+1]]``.

    Every segment contributes to each interval it spans. Intervals spanned by
    fewer than ``min_segments`` segments are treated as uncovered. Returns
    ``(interval_slopes, support)``; uncovered intervals get slope 0, support 0.
    """
    xs = np.asarray(xs, dtype=float)
    if len(xs) < 2 or np.any(np.diff(xs) <= 0):
        raise DataError("xs must be strictly increasing with at least two values")
    m = len(xs) - 1
    start = np.searchsorted(xs, segments.lo)
    stop = np.searchsorted(xs, segments.hi)
    if np.any(xs[np.minimum(start, m)] != segments.lo) or np.any(xs[np.minimum(stop, m)] != segments.hi):
        raise DataError("segment endpoints must be members of xs")
    w = segments.weight.astype(float)
    seg_id = np.arange(len(w), dtype=np.int64)

    def running(values, dtype=float):
        # difference array over [start, stop), then prefix sum
        d = np.zeros(m + 1, dtype=dtype)
        np.add.at(d, start, values)
        np.add.at(d, stop, -values)
        return np.cumsum(d)[:m]

    n_active = running(np.ones(len(w), dtype=np.int64), np.int64)
    id_sum = running(seg_id, np.int64)
    support = running(w)
    weighted = running(w * segments.slope)
    covered = (n_active >= max(min_segments, 1)) & (support > 0.5)
    slopes = np.where(covered, weighted / np.where(covered, support, 1.0), 0.0)
    # a lone covering segment gives its own slope, free of prefix-sum rounding
    alone = covered & (n_active == 1)
    slopes[alone] = segments.slope[id_sum[alone]]
    return slopes, np.where(covered, support, 0.0)


def integrate_slopes(xs, interval_slopes, feature: int = 0, counts=None, support=None) -> PDCurve:
    xs = np.asarray(xs, dtype=float)
    s = np.asarray(interval_slopes, dtype=float)
    if len(s) != len(xs) - 1:
        raise DataError(f"need {len(xs) - 1} interval slopes, got {len(s)}")
    pd = np.concatenate([[0.0], np.cumsum(s * np.diff(xs))])
    if counts is None:
        counts = np.ones(len(xs), dtype=np.int64)
    if support is None:
        support = np.ones(len(s))
    return PDCurve(feature, xs, pd, np.asarray(counts), np.asarray(support, dtype=float))


def strata(ds: Dataset, j: int, params: StratParams) -> list[np.ndarray]:
    """Row groups from trees fit on every column except ``j``."""
    X_other = np.delete(ds.X, j, axis=1)
    n = ds.n
    if params.n_strat_trees == 1 and not params.bootstrap_strata:
        seeds = [params.seed]
    else:
        seeds = tree_seeds(params.seed, params.n_strat_trees)
    groups = []
    for s in seeds:
        rows = np.random.default_rng(s).integers(0, n, size=n) if params.bootstrap_strata else None
        t = fit_tree(X_other, ds.y, TreeParams(params.min_samples_leaf, 1.0, s), rows)
        groups.extend(leaf_groups(t))
    return groups


def stratpd_numeric(ds: Dataset, j: int, params: StratParams = StratParams()) -> PDCurve:
    if ds.is_categorical(j):
        raise DataError(f"feature {ds.feature_names[j]!r} is categorical; use catstratpd")
    xs, counts = np.unique(ds.X[:, j], return_counts=True)
    if len(xs) < 2:
        raise NumericError(f"feature {ds.feature_names[j]!r} is constant; no partial dependence curve")
    x, y = ds.X[:, j], ds.y
    parts = [leaf_slopes(x[g], y[g]) for g in strata(ds, j, params)]
    parts = [s for s in parts if len(s)]
    # cannot demand more agreeing strata than exist
    min_segments = min(params.min_slopes_per_x, max(len(parts), 1))
    slopes, support = merge_slopes(SlopeSegments.concat(parts), xs, min_segments)
    return integrate_slopes(xs, slopes, j, counts, support)


def _leaf_level_deltas(codes: np.ndarray, y: np.ndarray):
    """Per-level (codes, mean y minus reference-level mean y, counts) for one leaf."""
    lv, inv, cnt = np.unique(codes, return_inverse=True, return_counts=True)
    means = np.bincount(inv, weights=y) / cnt
    ref = int(np.argmax(cnt))  # first max = lowest code among ties
    return lv.astype(np.int64), means - means[ref], cnt


def catstratpd(ds: Dataset, j: int, params: StratParams = StratParams()) -> CatPD:
    if not ds.is_categorical(j):
        raise DataError(f"feature {ds.feature_names[j]!r} is numeric; use stratpd_numeric")
    K = ds.n_levels(j)
    codes_all = ds.X[:, j].astype(np.int64)
    level_counts = np.bincount(codes_all, minlength=K)
    if K < 2:
        raise NumericError(f"feature {ds.feature_names[j]!r} has fewer than 2 levels")

    leaves = []
    for g in strata(ds, j, params):
        lv, delta, cnt = _leaf_level_deltas(codes_all[g], ds.y[g])
        if len(lv) >= 2:
            leaves.append((lv, delta, cnt))
    return merge_level_deltas(leaves, level_counts, j, ds.feature_names[j])


def merge_level_deltas(leaves, level_counts: np.ndarray, feature: int = 0, name: str = "") -> CatPD:
    """Merge within-leaf level deltas into one curve by breadth-first propagation.

    ``leaves`` is a list of ``(levels, deltas, counts)``. The anchor is the most
    populous level of the largest connected component; each newly reached leaf
    is aligned to the already-estimated levels it shares (count-weighted), and
    every level's value is the count-weighted average of its aligned estimates.
    """
    K = len(level_counts)
    present = level_counts > 0

    # connectivity over levels that co-occur in a leaf
    parent = np.arange(K)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for lv, _, _ in leaves:
        r0 = find(lv[0])
        for other in lv[1:]:
            r = find(other)
            if r != r0:
                parent[max(r, r0)] = min(r, r0)
                r0 = min(r, r0)
    roots = np.array([find(k) for k in range(K)])
    comp_mass = np.bincount(roots[present], weights=level_counts[present], minlength=K)
    best_root = int(np.argmax(comp_mass))
    observed = (roots == best_root) & present

    dropped = int(level_counts[present & ~observed].sum())
    if dropped:
        log.warning("feature %s: %d samples in levels disconnected from the main component were dropped", name or feature, dropped)
    if observed.sum() < 2:
        log.warning("feature %s: no leaf holds two or more levels; categorical impact is 0", name or feature)

    member_leaves = [[] for _ in range(K)]
    for i, (lv, _, _) in enumerate(leaves):
        for code in lv:
            member_leaves[code].append(i)

    anchor = int(np.argmax(np.where(observed, level_counts, -1)))
    total = np.zeros(K)
    weight = np.zeros(K)
    weight[anchor] = 1.0
    seen_leaf = np.zeros(len(leaves), dtype=bool)
    reached = np.zeros(K, dtype=bool)
    reached[anchor] = True
    queue = deque([anchor])
    while queue:
        level = queue.popleft()
        for i in member_leaves[level]:
            if seen_leaf[i]:
                continue
            seen_leaf[i] = True
            lv, delta, cnt = leaves[i]
            known = reached[lv]
            est = total[lv[known]] / weight[lv[known]]
            shift = np.average(est - delta[known], weights=cnt[known])
            for code, d, c in zip(lv, delta, cnt):
                if code == anchor:
                    continue
                total[code] += (d + shift) * c
                weight[code] += c
                if not reached[code]:
                    reached[code] = True
                    queue.append(int(code))

    pd = np.zeros(K)
    pd[observed] = total[observed] / weight[observed]
    pd[observed] -= pd[observed].mean()
    return CatPD(feature, np.arange(K), pd, observed, level_counts)
