import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronoseg.errors import DataError
from chronoseg.features import (
    FEATURE_NAMES,
    extract_features,
    featurize_corpus,
    read_feature_table,
    write_feature_table,
)
from chronoseg.segmentation import builtin_scheme

from oracles import naive_features

int_vectors = st.lists(st.integers(min_value=0, max_value=5000), min_size=2, max_size=200)
zero_heavy = st.lists(
    st.one_of(st.just(0), st.integers(min_value=0, max_value=50)), min_size=2, max_size=200
)


def assert_close(name, got, want):
    assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-9), f"{name}: {got} != {want}"


def test_feature_set_is_sixteen():
    assert len(FEATURE_NAMES) == 16
    assert len(set(FEATURE_NAMES)) == 16
    assert "min" not in FEATURE_NAMES  # minimum is discarded by design


def test_hand_computed_example():
    f = extract_features(np.array([0, 2, 4]))
    assert_close("mean", f["mean"], 2.0)
    assert_close("prop_zeros", f["prop_zeros"], 1 / 3)
    assert_close("std_dev", f["std_dev"], math.sqrt(8 / 3))
    assert_close("semivariance", f["semivariance"], 4 / 3)
    assert_close("rms", f["rms"], math.sqrt(20 / 3))


def test_autocorr_and_iqr_example():
    f = extract_features(np.array([1, 2, 3, 4]))
    assert_close("autocorr_lag1", f["autocorr_lag1"], 0.25)
    assert_close("iqr", f["iqr"], 3.25 - 1.75)


def test_peak_trough_example():
    f = extract_features(np.array([0, 1, 0, 2, 0]))
    assert f["n_peaks"] == 2
    assert f["n_troughs"] == 1


def test_constant_vector_degeneracies():
    f = extract_features(np.full(100, 5))
    for name in ("skewness", "kurtosis", "cv", "entropy", "autocorr_lag1", "n_peaks", "iqr", "mad"):
        assert f[name] == 0.0, name


def test_empty_vector_rejected():
    with pytest.raises(DataError):
        extract_features(np.array([]))


@given(int_vectors)
@settings(max_examples=200, deadline=None)
def test_matches_naive_oracle(values):
    got = extract_features(np.array(values))
    want = naive_features(values)
    for name in FEATURE_NAMES:
        assert math.isclose(got[name], want[name], rel_tol=1e-9, abs_tol=1e-9), name


@given(zero_heavy)
@settings(max_examples=100, deadline=None)
def test_matches_naive_oracle_zero_heavy(values):
    got = extract_features(np.array(values))
    want = naive_features(values)
    for name in FEATURE_NAMES:
        assert math.isclose(got[name], want[name], rel_tol=1e-9, abs_tol=1e-9), name


@given(int_vectors, st.integers(min_value=1, max_value=500))
@settings(max_examples=100, deadline=None)
def test_shift_equivariance_of_location(values, shift):
    base = extract_features(np.array(values))
    shifted = extract_features(np.array(values) + shift)
    assert math.isclose(shifted["mean"], base["mean"] + shift, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(shifted["median"], base["median"] + shift, rel_tol=1e-9, abs_tol=1e-9)


@given(int_vectors, st.integers(min_value=2, max_value=20))
@settings(max_examples=100, deadline=None)
def test_scale_invariants(values, factor):
    base = extract_features(np.array(values))
    scaled = extract_features(np.array(values) * factor)
    for name in ("prop_zeros", "n_peaks", "n_troughs", "autocorr_lag1", "skewness", "kurtosis", "cv"):
        assert math.isclose(scaled[name], base[name], rel_tol=1e-9, abs_tol=1e-9), name


@given(int_vectors)
@settings(max_examples=100, deadline=None)
def test_entropy_bounds(values):
    f = extract_features(np.array(values))
    distinct = len(set(values))
    upper = math.log(min(16, distinct)) if distinct > 1 else 0.0
    assert -1e-12 <= f["entropy"] <= upper + 1e-12


@given(int_vectors)
@settings(max_examples=100, deadline=None)
def test_all_values_finite_and_signed_correctly(values):
    f = extract_features(np.array(values))
    assert all(math.isfinite(v) for v in f.values())
    assert 0 <= f["prop_zeros"] <= 1
    assert -1 <= f["autocorr_lag1"] <= 1 + 1e-12
    for name in ("std_dev", "mad", "iqr", "semivariance", "rms", "entropy", "n_peaks", "n_troughs"):
        assert f[name] >= 0, name


class TestFeaturizeCorpus:
    def test_parts2_dimensions(self, tiny_corpus):
        table = featurize_corpus(tiny_corpus, builtin_scheme("parts2"))
        assert table.X.shape == (len(tiny_corpus.days), 32)
        assert table.columns[:2] == ("day_mean", "day_median")
        assert table.unit == "per_day"

    def test_parts12_has_192_columns(self, tiny_corpus):
        table = featurize_corpus(tiny_corpus, builtin_scheme("parts12"))
        assert len(table.columns) == 192

    def test_all_days_one_row_per_subject(self, tiny_corpus):
        table = featurize_corpus(tiny_corpus, builtin_scheme("all_days"))
        assert table.n_rows == len(tiny_corpus.subjects)
        assert len(table.columns) == 16
        assert table.unit == "per_subject"
        assert all(d == "all" for d in table.dates)

    def test_row_order_independent_of_input_order(self, tiny_corpus):
        from chronoseg.ingest import Corpus

        shuffled = Corpus.from_days(tuple(reversed(tiny_corpus.days)))
        a = featurize_corpus(tiny_corpus, builtin_scheme("parts2"))
        b = featurize_corpus(shuffled, builtin_scheme("parts2"))
        assert a.subject_ids == b.subject_ids
        np.testing.assert_array_equal(a.X, b.X)

    def test_csv_round_trip_lossless(self, tiny_corpus, tmp_path):
        table = featurize_corpus(tiny_corpus, builtin_scheme("parts3"))
        path = tmp_path / "features_parts3.csv"
        write_feature_table(table, path)
        back = read_feature_table(path)
        assert back.columns == table.columns
        assert back.subject_ids == table.subject_ids
        np.testing.assert_array_equal(back.X, table.X)
        np.testing.assert_array_equal(back.labels, table.labels)
