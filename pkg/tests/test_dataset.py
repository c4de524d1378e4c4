"""Gaussian-peak data: curve values, normalization, splits, baseline."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vqclab import dataset
from vqclab.dataset import (DatasetSplit, GaussianSampleParams, baseline_rmse,
                            generate_sample, generate_splits, normalize,
                            peak_curve, render_sample)


class TestCurve:
    def test_peak_value_closed_form(self):
        # A / (sigma * sqrt(2 pi)) at x = mu for A=1, sigma=0.1.
        params = GaussianSampleParams(amplitude=1.0, sigma=0.1, mu=0.5)
        curve = peak_curve(params)
        assert curve[10] == pytest.approx(3.9894228040143274, rel=1e-12)

    def test_noiseless_symmetry_about_center(self):
        params = GaussianSampleParams(amplitude=1.2, sigma=0.07, mu=0.5)
        feats = normalize(peak_curve(params))
        for k in range(1, 11):
            assert feats[10 - k] == pytest.approx(feats[10 + k], abs=1e-12)

    def test_params_range_checked(self):
        with pytest.raises(ValueError):
            GaussianSampleParams(amplitude=2.0, sigma=0.05, mu=0.5)
        with pytest.raises(ValueError):
            GaussianSampleParams(amplitude=1.0, sigma=0.5, mu=0.5)
        with pytest.raises(ValueError):
            GaussianSampleParams(amplitude=1.0, sigma=0.05, mu=1.5)


class TestNormalize:
    def test_bounds_exact(self):
        rng = np.random.default_rng(0)
        sample = render_sample(
            GaussianSampleParams(amplitude=1.0, sigma=0.05, mu=0.3), rng)
        assert sample.features.min() == 0.0
        assert sample.features.max() == 1.0

    def test_degenerate_all_equal(self):
        out = normalize(np.full(21, 3.7))
        assert np.all(out == 0.0)

    @given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2,
                    max_size=30).filter(lambda v: max(v) > min(v)))
    def test_idempotent(self, values):
        once = normalize(np.array(values))
        twice = normalize(once)
        np.testing.assert_allclose(twice, once, atol=1e-15)


class TestSplits:
    def test_sizes(self, splits):
        assert (len(splits.train), len(splits.val), len(splits.test)) == \
            (150, 250, 500)

    def test_bit_identical_regeneration(self, splits):
        again = generate_splits(splits.master_seed)
        for name in ("train", "val", "test"):
            np.testing.assert_array_equal(splits.features(name),
                                          again.features(name))
            np.testing.assert_array_equal(splits.targets(name),
                                          again.targets(name))

    def test_per_sample_streams_order_free(self, splits):
        # Sample 37 of the test split does not depend on the other samples.
        lone = generate_sample(splits.master_seed, "test", 37)
        np.testing.assert_array_equal(lone.features, splits.test[37].features)

    def test_targets_in_unit_interval(self, splits):
        for name in ("train", "val", "test"):
            targets = splits.targets(name)
            assert np.all(targets >= 0.0) and np.all(targets <= 1.0)

    def test_test_target_moments(self, splits):
        targets = splits.targets("test")
        assert 0.45 <= targets.mean() <= 0.55
        assert 0.26 <= targets.std() <= 0.32

    def test_argmax_matches_peak_position(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            params = GaussianSampleParams(
                amplitude=float(rng.uniform(0.5, 1.5)),
                sigma=float(rng.uniform(0.01, 0.1)),
                mu=float(rng.uniform(0.0, 1.0)))
            feats = normalize(peak_curve(params))
            assert int(np.argmax(feats)) == int(round(20 * params.mu))


class TestBaseline:
    def test_uniform_closed_form(self, splits):
        assert baseline_rmse(splits) == pytest.approx(1 / math.sqrt(12), abs=0.02)

    def test_exact_center_targets(self):
        sample = generate_sample(0, "train", 0)
        centred = dataset.Sample(x_values=sample.x_values,
                                 features=sample.features, target=0.5)
        split = DatasetSplit(train=[centred], val=[centred], test=[centred],
                             master_seed=0)
        assert baseline_rmse(split) == 0.0


class TestFiles:
    def test_written_files_round_trip(self, tmp_path, splits):
        paths = dataset.write_split_files(splits, tmp_path)
        assert sorted(p.rsplit("/", 1)[1] for p in paths) == \
            ["test.csv", "train.csv", "val.csv"]
        loaded = np.loadtxt(tmp_path / "train.csv", delimiter=",", skiprows=1)
        assert loaded.shape == (150, 22)
        np.testing.assert_allclose(loaded[:, :21], splits.features("train"),
                                   atol=0, rtol=0)
        np.testing.assert_allclose(loaded[:, 21], splits.targets("train"),
                                   atol=0, rtol=0)
