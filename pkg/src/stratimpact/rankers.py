"""Baseline feature rankers: Spearman, PCA loads, OLS t-scores, drop-column."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .dataset import Dataset
from .errors import DataError, NumericError
from .forest import TreeParams, fit_forest, predict

# returned for |t| when the least-squares fit is exact (se == 0)
PERFECT_FIT_SCORE = 1e300


@dataclass(frozen=True)
class Ranking:
    method: str
    scores: np.ndarray
    perfect_fit: bool = False

    @property
    def order(self) -> np.ndarray:
        """Feature indices by descending score; ties keep ascending index."""
        return np.lexsort((np.arange(len(self.scores)), -self.scores))


def spearman_scores(ds: Dataset) -> Ranking:
    """|Spearman rho| of each column with y, average ranks for ties."""
    if ds.n < 3:
        raise DataError("Spearman ranking needs n >= 3")
    ry = rankdata(ds.y)
    ry = ry - ry.mean()
    if not np.any(ry):
        raise NumericError("y is constant; rank correlation undefined")
    scores = np.zeros(ds.p)
    for j in range(ds.p):
        rx = rankdata(ds.X[:, j])
        rx = rx - rx.mean()
        denom = np.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
        scores[j] = abs(np.dot(rx, ry)) / denom if denom > 0 else 0.0
    return Ranking("spearman", np.minimum(scores, 1.0))


def power_iteration(A: np.ndarray, tol: float = 1e-10, max_iter: int = 10_000) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a symmetric positive semidefinite matrix.

    Two deterministic starts are tried (the all-ones vector and the largest
    column of ``A``) because either one alone can be orthogonal to the dominant
    eigenvector. The all-ones result wins ties.
    """
    starts = [np.ones(A.shape[0]), A[:, int(np.argmax(np.linalg.norm(A, axis=0)))].copy()]
    best = None
    for v0 in starts:
        lam, v = _power_from(A, v0, tol, max_iter)
        if best is None or lam > best[0] * (1 + 1e-12):
            best = (lam, v)
    return best


def _power_from(A, v, tol, max_iter):
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0, v
    v = v / norm
    for _ in range(max_iter):
        w = A @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v
        w /= norm
        # sign-invariant convergence test
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < tol:
            v = w
            break
        v = w
    return float(v @ A @ v), v


def pca_load_scores(ds: Dataset) -> Ranking:
    """|loading| of each column on the first principal component of standardized X."""
    if ds.n < 2:
        raise DataError("PCA ranking needs n >= 2")
    X = ds.X - ds.X.mean(axis=0)
    sd = X.std(axis=0)
    live = sd > 0
    Z = np.zeros_like(X)
    Z[:, live] = X[:, live] / sd[live]
    corr = Z.T @ Z / ds.n
    _, v = power_iteration(corr)
    scores = np.where(live, np.abs(v), 0.0)
    return Ranking("pca", scores)


def _cholesky(A: np.ndarray, pivot_tol: float) -> np.ndarray:
    """Lower Cholesky factor; raises NumericError on a pivot below ``pivot_tol``."""
    n = A.shape[0]
    L = np.zeros_like(A)
    for k in range(n):
        d = A[k, k] - L[k, :k] @ L[k, :k]
        if d <= pivot_tol:
            raise NumericError("design matrix is rank deficient")
        L[k, k] = np.sqrt(d)
        L[k + 1 :, k] = (A[k + 1 :, k] - L[k + 1 :, :k] @ L[k, :k]) / L[k, k]
    return L


def ols_t_scores(ds: Dataset) -> Ranking:
    """|beta_j / se(beta_j)| from least squares of y on [1, X]."""
    n, p = ds.n, ds.p
    if n <= p + 1:
        raise NumericError(f"OLS needs n > p + 1 (n={n}, p={p})")
    # center and scale columns so the pivot threshold is scale-free; t-stats are unchanged
    mu, sd = ds.X.mean(axis=0), ds.X.std(axis=0)
    if np.any(sd == 0):
        raise NumericError("design matrix is rank deficient (constant column)")
    A = np.column_stack([np.ones(n), (ds.X - mu) / sd])
    G = A.T @ A
    L = _cholesky(G, 1e-10 * np.max(np.diag(G)))
    Linv = np.linalg.solve(L, np.eye(p + 1))
    G_inv = Linv.T @ Linv
    beta = G_inv @ (A.T @ ds.y)
    resid = ds.y - A @ beta
    rss = float(resid @ resid)
    tss = float(np.sum((ds.y - ds.y.mean()) ** 2))
    if tss == 0:
        raise NumericError("y is constant; t-statistics undefined")
    if rss <= 1e-20 * tss:
        scores = np.where(np.abs(beta[1:]) > 1e-12 * np.abs(beta[1:]).max(), PERFECT_FIT_SCORE, 0.0)
        return Ranking("ols", scores, perfect_fit=True)
    sigma2 = rss / (n - p - 1)
    se = np.sqrt(sigma2 * np.diag(G_inv)[1:])
    return Ranking("ols", np.abs(beta[1:] / se))


def fold_ids(n: int, folds: int, seed: int) -> np.ndarray:
    """Fold label per row; depends only on (n, folds, seed)."""
    if folds < 2 or folds > n:
        raise DataError(f"folds must be in [2, n]; got {folds} with n={n}")
    perm = np.random.default_rng(seed).permutation(n)
    ids = np.empty(n, dtype=np.intp)
    for f, chunk in enumerate(np.array_split(perm, folds)):
        ids[chunk] = f
    return ids


def cv_mae(X: np.ndarray, y: np.ndarray, ids: np.ndarray, params: TreeParams, n_trees: int) -> np.ndarray:
    """Validation MAE per fold for the bagged forest."""
    folds = int(ids.max()) + 1
    out = np.empty(folds)
    for f in range(folds):
        test = ids == f
        model = fit_forest(X[~test], y[~test], TreeParams(params.min_samples_leaf, params.max_features, params.seed + f), n_trees)
        out[f] = np.mean(np.abs(predict(model, X[test]) - y[test]))
    return out


def drop_column_scores(ds: Dataset, params: TreeParams = TreeParams(), n_trees: int = 40, folds: int = 5, seed: int = 1) -> Ranking:
    """CV-MAE increase from removing each column, floored at 0."""
    if ds.p < 2:
        raise DataError("drop-column ranking needs p >= 2")
    ids = fold_ids(ds.n, folds, seed)
    base = cv_mae(ds.X, ds.y, ids, params, n_trees).mean()
    scores = np.empty(ds.p)
    for j in range(ds.p):
        scores[j] = cv_mae(np.delete(ds.X, j, axis=1), ds.y, ids, params, n_trees).mean() - base
    return Ranking("dropcol", np.maximum(scores, 0.0))
