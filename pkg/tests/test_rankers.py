import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratimpact.errors import DataError, NumericError
from stratimpact.forest import TreeParams
from stratimpact.rankers import (
    PERFECT_FIT_SCORE,
    Ranking,
    drop_column_scores,
    fold_ids,
    ols_t_scores,
    pca_load_scores,
    power_iteration,
    spearman_scores,
)

from conftest import numeric_ds

FAST = TreeParams(min_samples_leaf=5, seed=1)


def test_order_ties_by_index():
    np.testing.assert_array_equal(Ranking("m", np.array([1.0, 3.0, 1.0, 3.0])).order, [1, 3, 0, 2])


# -- Spearman ---------------------------------------------------------------


def test_spearman_examples():
    x = np.arange(1.0, 9.0)
    assert spearman_scores(numeric_ds(x, x**3)).scores[0] == 1.0
    assert spearman_scores(numeric_ds(x, -x)).scores[0] == 1.0
    assert spearman_scores(numeric_ds([1, 2, 3, 4], [1, 3, 2, 4])).scores[0] == pytest.approx(0.8, abs=1e-15)


def test_spearman_rank_difference_formula_no_ties():
    rng = np.random.default_rng(1)
    x, y = rng.permutation(30).astype(float), rng.permutation(30).astype(float)
    d = x - y  # values are already ranks 0..29
    rho = 1 - 6 * np.sum(d**2) / (30 * (30**2 - 1))
    assert spearman_scores(numeric_ds(x, y)).scores[0] == pytest.approx(abs(rho), rel=1e-12)


def test_spearman_constant_column_scores_zero():
    assert spearman_scores(numeric_ds(np.c_[np.ones(5), np.arange(5.0)], np.arange(5.0))).scores[0] == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_spearman_monotone_transform_invariant(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 6, size=(25, 3)).astype(float)
    y = X[:, 0] + rng.normal(size=25)
    a = spearman_scores(numeric_ds(X, y)).scores
    b = spearman_scores(numeric_ds(X, np.exp(y / 3) * 5 - 1)).scores
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


# -- PCA --------------------------------------------------------------------


def test_power_iteration_matches_eigh():
    rng = np.random.default_rng(0)
    for _ in range(20):
        B = rng.normal(size=(5, 5))
        A = B @ B.T
        lam, v = power_iteration(A)
        w, V = np.linalg.eigh(A)
        assert lam == pytest.approx(w[-1], rel=1e-8)
        assert abs(v @ V[:, -1]) == pytest.approx(1, abs=1e-6)


def test_power_iteration_ones_start_orthogonal():
    # dominant eigenvector (1, -1)/sqrt2 is orthogonal to the all-ones start
    A = np.array([[1.0, -0.9], [-0.9, 1.0]])
    lam, v = power_iteration(A)
    assert lam == pytest.approx(1.9, rel=1e-12)
    assert abs(v[0]) == pytest.approx(abs(v[1]), rel=1e-9)


def test_pca_collinear_pair_dominates():
    rng = np.random.default_rng(3)
    x1, x3 = rng.normal(size=500), rng.normal(size=500)
    ds = numeric_ds(np.c_[x1, 2 * x1, x3], rng.normal(size=500))
    s = pca_load_scores(ds).scores
    Z = (ds.X - ds.X.mean(0)) / ds.X.std(0)
    w, V = np.linalg.eigh(Z.T @ Z / 500)
    np.testing.assert_allclose(s, np.abs(V[:, -1]), atol=1e-6)
    assert s[0] == pytest.approx(s[1], abs=1e-9)
    assert s[0] >= s[2]


def test_pca_identical_columns_equal_and_constant_zero():
    rng = np.random.default_rng(5)
    x = rng.normal(size=50)
    s = pca_load_scores(numeric_ds(np.c_[x, x, np.full(50, 2.0)], x)).scores
    assert s[0] == s[1]
    assert s[2] == 0


# -- OLS --------------------------------------------------------------------


def t_oracle(X, y):
    A = np.c_[np.ones(len(y)), X]
    beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ beta
    sigma2 = resid @ resid / (len(y) - A.shape[1])
    se = np.sqrt(sigma2 * np.diag(np.linalg.inv(A.T @ A)))
    return np.abs(beta / se)[1:]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ols_matches_lstsq_oracle(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(60, 4)) * rng.uniform(0.1, 100, size=4)
    y = X @ rng.normal(size=4) + rng.normal(size=60)
    np.testing.assert_allclose(ols_t_scores(numeric_ds(X, y)).scores, t_oracle(X, y), rtol=1e-7)


def test_ols_column_rescale_keeps_order():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(100, 3))
    y = X @ [1.0, 0.2, 0.5] + rng.normal(size=100)
    a = ols_t_scores(numeric_ds(X, y))
    b = ols_t_scores(numeric_ds(X * [1e4, 1e-3, 7], y))
    np.testing.assert_array_equal(a.order, b.order)


def test_ols_perfect_fit_sentinel():
    x = np.linspace(0, 1, 20)
    r = ols_t_scores(numeric_ds(x, 3 * x))
    assert r.perfect_fit
    assert r.scores[0] == PERFECT_FIT_SCORE


def test_ols_errors():
    rng = np.random.default_rng(0)
    x = rng.normal(size=30)
    with pytest.raises(NumericError, match="rank"):
        ols_t_scores(numeric_ds(np.c_[x, x], rng.normal(size=30)))
    with pytest.raises(NumericError):
        ols_t_scores(numeric_ds(rng.normal(size=(3, 2)), [1.0, 2.0, 3.0]))


def test_ols_noise_t_small():
    ok = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        ok += np.all(ols_t_scores(numeric_ds(rng.normal(size=(500, 3)), rng.normal(size=500))).scores < 4)
    assert ok >= 18


# -- drop-column ------------------------------------------------------------


def test_fold_ids_balanced_and_seeded():
    ids = fold_ids(23, 5, 4)
    assert sorted(np.bincount(ids)) == [4, 4, 5, 5, 5]
    np.testing.assert_array_equal(ids, fold_ids(23, 5, 4))
    with pytest.raises(DataError):
        fold_ids(3, 5, 1)


def test_dropcol_informative_beats_noise():
    ok = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        X = rng.uniform(size=(150, 3))
        y = 5 * X[:, 0] + rng.normal(0, 0.1, 150)
        s = drop_column_scores(numeric_ds(X, y), FAST, n_trees=8, folds=3, seed=seed).scores
        ok += s[0] > max(s[1], s[2])
    assert ok >= 18


def test_dropcol_duplicate_covers():
    rng = np.random.default_rng(11)
    x = rng.uniform(size=200)
    X = np.c_[x, x, rng.uniform(size=200)]
    s = drop_column_scores(numeric_ds(X, 5 * x + rng.normal(0, 0.1, 200)), FAST, n_trees=8, folds=3).scores
    assert s[0] < 0.05 and s[1] < 0.05
    assert np.all(s >= 0)


def test_dropcol_needs_two_features():
    with pytest.raises(DataError):
        drop_column_scores(numeric_ds(np.arange(10.0), np.arange(10.0)))
