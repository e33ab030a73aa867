import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratimpact.dataset import Dataset, FeatureKind
from stratimpact.errors import DataError, NumericError
from stratimpact.pd_estimation import (
    SlopeSegments,
    StratParams,
    catstratpd,
    integrate_slopes,
    leaf_slopes,
    merge_level_deltas,
    merge_slopes,
    stratpd_numeric,
)
from stratimpact.synth import gen_quadratic

from conftest import numeric_ds
from oracles import finite_difference_pd, merged_interval_slopes


def segs(rows):
    lo, hi, slope, w = zip(*rows)
    return SlopeSegments(np.array(lo, float), np.array(hi, float), np.array(slope, float), np.array(w))


# -- leaf_slopes ------------------------------------------------------------


def test_leaf_slopes_example():
    s = leaf_slopes([1, 1, 2, 4], [2, 4, 5, 9])
    np.testing.assert_array_equal(s.lo, [1, 2])
    np.testing.assert_array_equal(s.hi, [2, 4])
    np.testing.assert_array_equal(s.slope, [2, 2])
    np.testing.assert_array_equal(s.weight, [3, 2])


def test_leaf_slopes_single_value_is_empty():
    assert len(leaf_slopes([7, 7, 7], [1, 2, 3])) == 0


def test_leaf_slopes_flat():
    s = leaf_slopes([0, 1], [4.2, 4.2])
    np.testing.assert_array_equal(s.slope, [0.0])


def test_leaf_slopes_length_mismatch():
    with pytest.raises(DataError):
        leaf_slopes([1, 2], [1])


# -- merge_slopes -----------------------------------------------------------


def test_merge_slopes_example():
    slopes, support = merge_slopes(segs([(0, 2, 1, 2), (1, 2, 3, 2)]), [0, 1, 2])
    np.testing.assert_array_equal(slopes, [1, 2])
    np.testing.assert_array_equal(support, [2, 4])


def test_merge_slopes_no_segments():
    slopes, support = merge_slopes(SlopeSegments.concat([]), [0, 1, 2, 3])
    np.testing.assert_array_equal(slopes, [0, 0, 0])
    np.testing.assert_array_equal(support, [0, 0, 0])


def test_merge_slopes_one_spanning_segment():
    slopes, _ = merge_slopes(segs([(0, 5, 1.5, 4)]), [0, 1, 3, 5])
    np.testing.assert_array_equal(slopes, [1.5, 1.5, 1.5])


def test_merge_slopes_unsorted():
    with pytest.raises(DataError):
        merge_slopes(segs([(0, 1, 1, 2)]), [1, 0])


def test_merge_slopes_min_segments_drops_thin_intervals():
    slopes, support = merge_slopes(segs([(0, 2, 1, 2), (1, 2, 3, 2)]), [0, 1, 2], min_segments=2)
    np.testing.assert_array_equal(slopes, [0, 2])
    np.testing.assert_array_equal(support, [0, 4])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 25))
def test_merge_slopes_matches_brute_force(seed, n_segs):
    rng = np.random.default_rng(seed)
    xs = np.unique(rng.integers(0, 30, size=12).astype(float))
    if len(xs) < 2:
        xs = np.array([0.0, 1.0])
    rows = []
    for _ in range(n_segs):
        a, b = np.sort(rng.choice(len(xs), size=2, replace=False))
        rows.append((xs[a], xs[b], float(rng.normal()), int(rng.integers(2, 9))))
    s = segs(rows) if rows else SlopeSegments.concat([])
    got, _ = merge_slopes(s, xs)
    np.testing.assert_allclose(got, merged_interval_slopes(rows, xs), rtol=1e-12, atol=1e-12)


# -- integrate_slopes -------------------------------------------------------


@pytest.mark.parametrize(
    "xs, slopes, pd",
    [
        ([0, 1, 2], [1, 2], [0, 1, 3]),
        ([0, 1, 2, 5], [0, 0, 0], [0, 0, 0, 0]),
        ([0, 2], [3], [0, 6]),
    ],
)
def test_integrate_slopes(xs, slopes, pd):
    np.testing.assert_array_equal(integrate_slopes(xs, slopes).pd, pd)


def test_integrate_slopes_length_mismatch():
    with pytest.raises(DataError):
        integrate_slopes([0, 1, 2], [1.0])


# -- stratpd_numeric --------------------------------------------------------


def test_stratpd_single_feature_linear_exact():
    x = np.linspace(0.5, 3, 40)
    curve = stratpd_numeric(numeric_ds(x, 2 * x), 0)
    np.testing.assert_allclose(curve.pd, 2 * (x - x.min()), rtol=0, atol=1e-12)
    assert curve.pd[0] == 0.0
    assert curve.coverage == 1.0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_stratpd_one_leaf_matches_oracle_exactly(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 12, size=30).astype(float)
    x[:2] = [0.0, 11.0]
    y = rng.normal(size=30)
    xs, pd = finite_difference_pd(x, y)
    curve = stratpd_numeric(numeric_ds(x, y), 0)
    np.testing.assert_array_equal(curve.xs, xs)
    np.testing.assert_array_equal(curve.pd, pd)


def test_stratpd_rejects_categorical_and_constant():
    ds = Dataset(("c", "x"), (FeatureKind.CATEGORICAL, FeatureKind.NUMERIC), [[0, 1], [1, 1], [0, 1]], [1, 2, 3])
    with pytest.raises(DataError, match="categorical"):
        stratpd_numeric(ds, 0)
    with pytest.raises(NumericError, match="constant"):
        stratpd_numeric(ds, 1)


@pytest.fixture(scope="module")
def quad():
    return gen_quadratic(1000, seed=1, with_noise_feature=True)


def test_stratpd_quadratic_pd1(quad):
    curve = stratpd_numeric(quad, 0)
    truth = curve.xs**2 - curve.xs.min() ** 2
    near_top = curve.xs > 2.9
    assert np.all(np.abs(curve.pd[near_top] - truth[near_top]) <= 0.75)
    assert abs(curve.pd[-1] - 9) <= 0.75


def test_stratpd_quadratic_pd2_slope(quad):
    curve = stratpd_numeric(quad, 1)
    slope = np.polyfit(curve.xs - curve.xs.min(), curve.pd, 1)[0]
    assert abs(slope - 1) <= 0.1


def test_stratpd_shift_and_scale(quad):
    base = stratpd_numeric(quad, 1)
    shifted = stratpd_numeric(quad.with_y(quad.y + 1234.5), 1)
    np.testing.assert_allclose(shifted.pd, base.pd, atol=1e-9)
    scaled = stratpd_numeric(quad.with_y(quad.y * 4.0), 1)
    np.testing.assert_array_equal(scaled.pd, 4.0 * base.pd)


def test_stratpd_row_permutation_invariant(quad):
    perm = np.random.default_rng(0).permutation(quad.n)
    a = stratpd_numeric(quad, 0)
    b = stratpd_numeric(quad.take(perm), 0)
    np.testing.assert_allclose(b.pd, a.pd, rtol=1e-12, atol=1e-12)


def test_stratpd_bagged_strata_deterministic(quad):
    params = StratParams(n_strat_trees=3, bootstrap_strata=True, seed=5)
    np.testing.assert_array_equal(stratpd_numeric(quad, 0, params).pd, stratpd_numeric(quad, 0, params).pd)


# -- catstratpd -------------------------------------------------------------


def cat_ds(codes, y, other=None):
    codes = np.asarray(codes, float)
    if other is None:
        return Dataset(("c",), (FeatureKind.CATEGORICAL,), codes.reshape(-1, 1), y)
    return Dataset(("c", "z"), (FeatureKind.CATEGORICAL, FeatureKind.NUMERIC), np.c_[codes, other], y)


def test_catstratpd_one_leaf():
    codes = np.repeat([0, 1, 2], 4)
    y = np.repeat([10.0, 11.0, 12.0], 4)
    c = catstratpd(cat_ds(codes, y), 0)
    np.testing.assert_allclose(c.pd_centered, [-1, 0, 1], atol=1e-12)
    assert c.observed.all()


def test_catstratpd_no_shared_leaves_warns(caplog):
    # z perfectly separates levels, so no leaf holds two levels
    codes = np.repeat([0, 1], 30)
    z = np.repeat([0.0, 1.0], 30)
    with caplog.at_level(logging.WARNING):
        c = catstratpd(cat_ds(codes, codes * 5.0 + z, z), 0)
    assert c.observed.sum() == 1
    np.testing.assert_array_equal(c.pd_centered, [0, 0])
    assert any("impact is 0" in r.message for r in caplog.records)


def test_catstratpd_shift_invariant():
    rng = np.random.default_rng(4)
    codes = rng.integers(0, 4, 200)
    y = np.array([3.0, -1.0, 2.0, 0.5])[codes] + rng.normal(0, 0.1, 200)
    a = catstratpd(cat_ds(codes, y), 0)
    b = catstratpd(cat_ds(codes, y + 77.0), 0)
    np.testing.assert_allclose(a.pd_centered, b.pd_centered, atol=1e-9)


def test_catstratpd_additive_multi_leaf_recovers_effects():
    # y = effect[level] + g(z); z has 4 well separated values so the tree
    # splits only on z and each leaf holds a subset of levels
    rng = np.random.default_rng(8)
    effect = np.array([0.0, 4.0, -2.0, 1.0, 7.0, 3.0])
    z = np.repeat([0.0, 10.0, 20.0, 30.0], 60)
    codes = np.concatenate([rng.choice(lv, 60) for lv in ([0, 1, 2], [2, 3], [3, 4], [4, 5, 0])])
    y = effect[codes] + 100 * z
    c = catstratpd(cat_ds(codes, y, z), 0, StratParams(min_samples_leaf=20))
    assert c.observed.all()
    np.testing.assert_allclose(c.pd_centered, effect - effect.mean(), atol=1e-9)
    assert abs(c.pd_centered.mean()) <= 1e-9


def test_catstratpd_disconnected_component_dropped(caplog):
    z = np.repeat([0.0, 10.0], 40)
    codes = np.concatenate([np.tile([0, 1], 20), np.tile([2, 3], 20)])
    y = np.array([0.0, 2.0, 5.0, 9.0])[codes] + 100 * z
    with caplog.at_level(logging.WARNING):
        c = catstratpd(cat_ds(codes, y, z), 0, StratParams(min_samples_leaf=20))
    # equal mass components: the one holding the lowest code wins
    np.testing.assert_array_equal(c.observed, [True, True, False, False])
    np.testing.assert_allclose(c.pd_centered, [-1, 1, 0, 0], atol=1e-12)
    assert any("disconnected" in r.message for r in caplog.records)


def test_catstratpd_errors():
    with pytest.raises(DataError, match="numeric"):
        catstratpd(numeric_ds([1.0, 2.0], [1.0, 2.0]), 0)
    with pytest.raises(NumericError):
        catstratpd(cat_ds([0, 0, 0], [1.0, 2.0, 3.0]), 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_merge_level_deltas_centered_and_shift_free(seed):
    rng = np.random.default_rng(seed)
    K = int(rng.integers(2, 7))
    leaves = []
    for _ in range(int(rng.integers(1, 6))):
        lv = np.sort(rng.choice(K, size=int(rng.integers(2, K + 1)), replace=False))
        leaves.append((lv, rng.normal(size=len(lv)), rng.integers(1, 10, size=len(lv))))
    counts = np.ones(K, dtype=int) * 5
    a = merge_level_deltas(leaves, counts)
    shifted = [(lv, d + rng.normal() * 10, c) for lv, d, c in leaves]
    b = merge_level_deltas(shifted, counts)
    assert abs(a.pd_centered[a.observed].mean()) <= 1e-9
    np.testing.assert_array_equal(a.observed, b.observed)
    np.testing.assert_allclose(a.pd_centered, b.pd_centered, atol=1e-9)
    assert np.all(a.pd_centered[~a.observed] == 0)
