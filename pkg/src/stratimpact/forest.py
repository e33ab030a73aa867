"""Minimal CART regression trees and a bagged forest.

Trees are grown greedily by variance reduction with ``min_samples_leaf`` as the
only regularizer. Leaves remember the training rows that landed in them, which
is what the stratification code needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

LEAF = -1


@dataclass(frozen=True)
class TreeParams:
    min_samples_leaf: int = 20
    max_features: float = 1.0
    seed: int = 1

    def __post_init__(self):
        if self.min_samples_leaf < 1:
            raise DataError("min_samples_leaf must be >= 1")
        if not 0.0 < self.max_features <= 1.0:
            raise DataError("max_features must be in (0, 1]")


@dataclass(frozen=True)
class RegressionTree:
    """Array-encoded binary tree. ``feature[i] == LEAF`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    members: tuple[np.ndarray, ...]  # per node; empty for internal nodes
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def leaf_ids(self) -> np.ndarray:
        return np.flatnonzero(self.feature == LEAF)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf node id reached by each row of ``X``."""
        X = _check_X(X, self.n_features)
        node = np.zeros(X.shape[0], dtype=np.intp)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


@dataclass(frozen=True)
class Forest:
    trees: tuple[RegressionTree, ...]
    oob_masks: tuple[np.ndarray, ...]
    params: TreeParams
    n_features: int

    @property
    def n_trees(self) -> int:
        return len(self.trees)


def _check_X(X, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if n_features == 1 else X.reshape(1, -1)
    if X.shape[1] != n_features:
        raise DataError(f"expected {n_features} columns, got {X.shape[1]}")
    return X


def _best_split(x_sorted: np.ndarray, y_sorted: np.ndarray, msl: int):
    """Best (score, position) over legal split positions of one sorted feature.

    ``score`` is the reduction in sum of squared errors; position ``i`` puts the
    first ``i`` sorted rows on the left.
    """
    m = len(y_sorted)
    if m < 2 * msl:
        return None
    csum = np.cumsum(y_sorted)
    total = csum[-1]
    pos = np.arange(msl, m - msl + 1)
    legal = x_sorted[pos - 1] < x_sorted[pos]
    if not legal.any():
        return None
    pos = pos[legal]
    left = csum[pos - 1]
    # y is centered at the node mean, so SSE reduction = L^2/nL + R^2/nR
    gain = left * left / pos + (total - left) ** 2 / (m - pos)
    k = int(np.argmax(gain))
    return gain[k], int(pos[k])


def fit_tree(X, y, params: TreeParams = TreeParams(), rows: np.ndarray | None = None) -> RegressionTree:
    """Grow a regression tree on ``X[rows], y[rows]``.

    ``rows`` (default: all rows) may contain repeats, as for a bootstrap sample.
    Leaf ``members`` hold entries of ``rows``, i.e. indices into the original X.
    Ties in split quality go to the lower feature index, then the lower threshold.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] != len(y):
        raise DataError(f"X has {X.shape[0]} rows but y has {len(y)}")
    if rows is None:
        rows = np.arange(len(y))
    rows = np.asarray(rows, dtype=np.intp)
    if len(rows) == 0:
        raise DataError("cannot fit a tree on empty input")

    p = X.shape[1]
    msl = params.min_samples_leaf
    n_try = max(1, int(round(params.max_features * p))) if p else 0
    rng = np.random.default_rng(params.seed)

    feature, threshold, left, right, value, members = [], [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(np.nan)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        members.append(idx)
        return len(feature) - 1

    stack = [new_node(rows)]
    while stack:
        nid = stack.pop()
        idx = members[nid]
        yi = y[idx]
        if len(idx) < 2 * msl or p == 0 or np.all(yi == yi[0]):
            continue
        yc = yi - yi.mean()
        if n_try < p:
            candidates = np.sort(rng.choice(p, size=n_try, replace=False))
        else:
            candidates = range(p)
        best = None
        for j in candidates:
            xj = X[idx, j]
            order = np.argsort(xj, kind="stable")
            xs = xj[order]
            found = _best_split(xs, yc[order], msl)
            if found is None:
                continue
            gain, pos = found
            if best is None or gain > best[0]:
                lo, hi = xs[pos - 1], xs[pos]
                thr = 0.5 * (lo + hi)
                if not lo <= thr < hi:
                    thr = lo
                best = (gain, j, thr)
        if best is None:
            continue
        _, j, thr = best
        go_left = X[idx, j] <= thr
        feature[nid] = j
        threshold[nid] = thr
        members[nid] = np.empty(0, dtype=np.intp)
        l_id = new_node(idx[go_left])
        r_id = new_node(idx[~go_left])
        left[nid], right[nid] = l_id, r_id
        # pop left child first so node ids follow depth-first order
        stack.append(r_id)
        stack.append(l_id)

    return RegressionTree(
        feature=np.array(feature, dtype=np.intp),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.intp),
        right=np.array(right, dtype=np.intp),
        value=np.array(value, dtype=float),
        members=tuple(members),
        n_features=p,
    )


def tree_seeds(seed: int, n: int) -> list[int]:
    """Independent per-tree seeds derived from one master seed."""
    ss = np.random.SeedSequence(seed)
    return [int(s.generate_state(1, dtype=np.uint64)[0] >> 1) for s in ss.spawn(n)]


def fit_forest(X, y, params: TreeParams = TreeParams(), n_trees: int = 40, bootstrap: bool = True) -> Forest:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if n_trees < 1:
        raise DataError("n_trees must be >= 1")
    n = len(y)
    if n == 0:
        raise DataError("cannot fit a forest on empty input")
    trees, oob = [], []
    if not bootstrap and n_trees == 1:
        seeds = [params.seed]
    else:
        seeds = tree_seeds(params.seed, n_trees)
    for s in seeds:
        tp = TreeParams(params.min_samples_leaf, params.max_features, s)
        if bootstrap:
            rows = np.random.default_rng(s).integers(0, n, size=n)
            mask = np.ones(n, dtype=bool)
            mask[rows] = False
        else:
            rows = np.arange(n)
            mask = np.zeros(n, dtype=bool)
        trees.append(fit_tree(X, y, tp, rows))
        oob.append(mask)
    return Forest(tuple(trees), tuple(oob), params, X.shape[1])


def predict(model: Forest | RegressionTree, X) -> np.ndarray:
    if isinstance(model, RegressionTree):
        return model.predict(X)
    X = _check_X(X, model.n_features)
    out = np.zeros(X.shape[0])
    for t in model.trees:
        out += t.predict(X)
    return out / model.n_trees


def oob_predict(f: Forest, X) -> np.ndarray:
    """Out-of-bag prediction per training row; NaN where a row was never OOB."""
    X = _check_X(X, f.n_features)
    total = np.zeros(X.shape[0])
    count = np.zeros(X.shape[0])
    for t, mask in zip(f.trees, f.oob_masks):
        if mask.any():
            total[mask] += t.predict(X[mask])
            count[mask] += 1
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(count > 0, total / np.maximum(count, 1), np.nan)


def leaf_groups(t: RegressionTree) -> list[np.ndarray]:
    """Training rows per leaf, in node-id order."""
    return [t.members[i] for i in t.leaf_ids]


def permutation_importance(f: Forest, X, y, n_repeats: int = 5, seed: int = 1) -> np.ndarray:
    """Mean increase in MAE when each column is shuffled, model held fixed."""
    X = _check_X(X, f.n_features)
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != len(y):
        raise DataError(f"X has {X.shape[0]} rows but y has {len(y)}")
    if n_repeats < 1:
        raise DataError("n_repeats must be >= 1")
    baseline = np.mean(np.abs(predict(f, X) - y))
    rng = np.random.default_rng(seed)
    scores = np.zeros(f.n_features)
    for j in range(f.n_features):
        Xp = X.copy()
        total = 0.0
        for _ in range(n_repeats):
            Xp[:, j] = X[rng.permutation(len(y)), j]
            total += np.mean(np.abs(predict(f, Xp) - y)) - baseline
        scores[j] = total / n_repeats
    return scores
