import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cropcast.data import AlignedSeries, TradingCalendar
from cropcast.errors import InsufficientDataError, ShapeError, ValidationError
from cropcast.features import (FeatureConfig, build_feature_frame,
                               causal_lowpass_columns, fft_smooth, indicators,
                               input_row, make_sequence_input, make_supervised)
from cropcast.quality import QualityReport, expanding_outlier_mask, quality_report
from cropcast.synthetic import SyntheticSpec, generate_synthetic

from conftest import series_from_prices


def imputed_series(seed=3, n=160, missing=0.0):
    spec = SyntheticSpec(n_days=n, noise_std=30.0, ar1_coeff=0.4,
                         seasonal_amplitude=60.0, trend_slope=0.5,
                         missing_rate=missing, seed=seed)
    from cropcast.quality import impute_spline
    return impute_spline(generate_synthetic(spec))


def causal_report(series):
    missing = np.zeros(len(series), dtype=bool)
    outliers = expanding_outlier_mask(series.price)
    return QualityReport.from_masks(missing, outliers)


class TestFftSmooth:
    def test_full_retention_identity(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            values = rng.normal(size=int(rng.integers(4, 200)))
            assert np.allclose(fft_smooth(values, values.size + 5), values, atol=1e-9)

    def test_constant_dc_only(self):
        values = np.full(37, 4.2)
        assert np.allclose(fft_smooth(values, 1), values, atol=1e-12)

    def test_high_frequency_component_removed(self):
        # 4-cycle sinusoid survives a 6-bin low-pass; a 20-cycle spectral
        # spike lands in a zeroed bin
        t = np.arange(64)
        clean = np.sin(2 * np.pi * 4 * t / 64)
        noisy = clean + 0.8 * np.sin(2 * np.pi * 20 * t / 64)
        out = fft_smooth(noisy, 6)
        assert np.abs(out - clean).max() < 1e-6

    def test_bad_args(self):
        with pytest.raises(ValidationError):
            fft_smooth([], 3)
        with pytest.raises(ValidationError):
            fft_smooth([1.0, 2.0], 0)


class TestCausalLowpass:
    def test_matches_prefix_transform(self):
        retentions = (3, 6, 9, 100)
        for seed in range(8):
            rng = np.random.default_rng(seed)
            values = rng.normal(size=int(rng.integers(5, 120)))
            cols = causal_lowpass_columns(values, retentions)
            for i in range(values.size):
                for c, r in enumerate(retentions):
                    expected = fft_smooth(values[:i + 1], r)[-1]
                    assert cols[i, c] == pytest.approx(expected, abs=1e-9)


class TestIndicators:
    def test_constant_sequence(self):
        cols = indicators(np.full(40, 7.0))
        sma3, sma7, ema025, ema05, mstd, macd = cols.T
        for flat in (sma3, sma7, ema025, ema05):
            assert np.allclose(flat, 7.0)
        assert np.allclose(mstd, 0.0)
        assert np.allclose(macd, 0.0)

    def test_sma3_last_value(self):
        cols = indicators(np.array([1.0, 2.0, 3.0]))
        assert cols[-1, 0] == pytest.approx(2.0)

    def test_ema_com_quarter_recurrence(self):
        cols = indicators(np.array([0.0, 1.0]))
        assert cols[1, 2] == pytest.approx(0.8)   # alpha = 1/(1+0.25)

    def test_every_day_populated(self):
        cols = indicators(np.random.default_rng(1).normal(size=50))
        assert np.isfinite(cols).all()


class TestBuildFeatureFrame:
    def test_default_width_19(self):
        series = imputed_series()
        frame = build_feature_frame(series, quality_report(series))
        assert frame.day_width == 19
        assert frame.columns[:7] == ("price", "arrival", "temp", "humidity",
                                     "rainfall", "missing_flag", "outlier_flag")

    def test_paper13_width_18(self):
        series = imputed_series()
        cfg = FeatureConfig.preset("paper13")
        frame = build_feature_frame(series, quality_report(series), cfg)
        assert frame.day_width == 18
        assert "month" not in frame.columns

    def test_day_month_encoding(self):
        cal = TradingCalendar(dt.date(2019, 2, 4), dt.date(2019, 8, 30))
        n = len(cal)
        series = AlignedSeries(calendar=cal, price=np.linspace(100, 200, n),
                               arrival=np.full(n, 10.0), temp=np.full(n, 25.0),
                               humidity=np.full(n, 60.0), rainfall=np.zeros(n))
        frame = build_feature_frame(series, quality_report(series),
                                    FeatureConfig(standardize=False))
        day_col = frame.columns.index("day")
        month_col = frame.columns.index("month")
        assert frame.values[0, day_col] == 4.0
        assert frame.values[0, month_col] == 2.0

    def test_flags_equal_masks(self):
        spec = SyntheticSpec(n_days=200, noise_std=40.0, missing_rate=0.08,
                             outlier_rate=0.05, seed=9)
        raw = generate_synthetic(spec)
        report = quality_report(raw)
        from cropcast.quality import impute_spline
        frame = build_feature_frame(impute_spline(raw), report)
        missing_col = frame.raw[:, frame.columns.index("missing_flag")]
        outlier_col = frame.raw[:, frame.columns.index("outlier_flag")]
        assert np.array_equal(missing_col.astype(bool), report.missing_mask)
        assert np.array_equal(outlier_col.astype(bool), report.outlier_mask)

    def test_standardized_train_columns(self):
        series = imputed_series(seed=5, n=200)
        frame = build_feature_frame(series, quality_report(series), train_len=150)
        train = frame.values[:150]
        nonconstant = frame.raw[:150].std(axis=0) > 0
        assert np.abs(train.mean(axis=0)[nonconstant]).max() < 1e-9
        assert np.abs(train.std(axis=0)[nonconstant] - 1.0).max() < 1e-9

    def test_unimputed_series_rejected(self):
        prices = np.linspace(10, 20, 50)
        prices[10] = np.nan
        series = series_from_prices(prices)
        report = QualityReport.from_masks(np.isnan(prices), np.zeros(50, bool))
        with pytest.raises(ValidationError):
            build_feature_frame(series, report)

    def test_mask_length_mismatch_rejected(self):
        series = imputed_series(n=60)
        report = QualityReport.from_masks(np.zeros(10, bool), np.zeros(10, bool))
        with pytest.raises(ShapeError):
            build_feature_frame(series, report)

    def test_causality_under_future_mutation(self):
        # perturbing any datum at day j leaves every vector before j unchanged
        series = imputed_series(seed=11, n=120)
        cfg = FeatureConfig(standardize=False)
        frame = build_feature_frame(series, causal_report(series), cfg)
        j = 70
        for column in ("price", "temp", "rainfall"):
            values = getattr(series, column).copy()
            values[j:] = values[j:] * 2.0 + 10.0
            mutated = series.with_columns(**{column: values})
            mutated_frame = build_feature_frame(mutated, causal_report(mutated), cfg)
            assert np.array_equal(frame.values[:j], mutated_frame.values[:j])


class TestSupervised:
    def test_row_count_formula(self):
        series = imputed_series(n=160)
        frame = build_feature_frame(series, quality_report(series),
                                    FeatureConfig(k=7, horizon=30))
        sup = make_supervised(frame)
        assert len(sup) == 160 - 7 - 30 + 1

    def test_boundary_single_row(self):
        series = imputed_series(n=37)
        frame = build_feature_frame(series, quality_report(series),
                                    FeatureConfig(k=7, horizon=30))
        sup = make_supervised(frame)
        assert len(sup) == 1
        assert sup.issue_indices[0] == 6

    def test_width_matches_paper13_dimensions(self):
        series = imputed_series(n=100)
        cfg = FeatureConfig.preset("paper13", k=7, horizon=30)
        frame = build_feature_frame(series, quality_report(series), cfg)
        sup = make_supervised(frame)
        assert frame.day_width == 18
        assert sup.inputs.shape[1] == 7 * (3 + 13 + 2) == 126

    def test_too_short_rejected(self):
        series = imputed_series(n=36)
        frame = build_feature_frame(series, quality_report(series),
                                    FeatureConfig(k=7, horizon=30))
        with pytest.raises(InsufficientDataError):
            make_supervised(frame)

    def test_targets_are_next_horizon_prices(self):
        series = imputed_series(n=80)
        cfg = FeatureConfig(k=5, horizon=10, standardize=False)
        frame = build_feature_frame(series, quality_report(series), cfg)
        sup = make_supervised(frame)
        i = sup.issue_indices[3]
        assert np.array_equal(sup.targets[3], frame.prices[i + 1:i + 11])

    @given(st.integers(2, 40), st.integers(1, 10), st.integers(1, 10))
    @settings(max_examples=40, deadline=None)
    def test_row_count_property(self, n, k, horizon):
        rng = np.random.default_rng(n * 100 + k * 10 + horizon)
        values = rng.uniform(50, 60, size=n + k + horizon + 20)
        series = series_from_prices(values)
        cfg = FeatureConfig(k=k, horizon=horizon)
        frame = build_feature_frame(series, quality_report(series), cfg)
        sup = make_supervised(frame)
        assert len(sup) == len(series) - k - horizon + 1


class TestSequenceInput:
    def test_flatten_matches_supervised_row(self):
        series = imputed_series(n=90)
        cfg = FeatureConfig(k=6, horizon=8)
        frame = build_feature_frame(series, quality_report(series), cfg)
        sup = make_supervised(frame)
        for row in (0, 5, len(sup) - 1):
            i = sup.issue_indices[row]
            assert np.array_equal(make_sequence_input(frame, i).reshape(-1),
                                  sup.inputs[row])
            assert np.array_equal(input_row(frame, i), sup.inputs[row])

    def test_k1_single_vector(self):
        series = imputed_series(n=50)
        cfg = FeatureConfig(k=1, horizon=5)
        frame = build_feature_frame(series, quality_report(series), cfg)
        seq = make_sequence_input(frame, 10)
        assert seq.shape == (1, frame.day_width)
        assert np.array_equal(seq[0], frame.values[10])

    def test_shape_for_all_valid_days(self):
        series = imputed_series(n=60)
        cfg = FeatureConfig(k=4, horizon=5)
        frame = build_feature_frame(series, quality_report(series), cfg)
        for i in range(3, 60):
            assert make_sequence_input(frame, i).shape == (4, frame.day_width)

    def test_out_of_range_rejected(self):
        series = imputed_series(n=30)
        cfg = FeatureConfig(k=5, horizon=5)
        frame = build_feature_frame(series, quality_report(series), cfg)
        with pytest.raises(IndexError):
            make_sequence_input(frame, 3)
        with pytest.raises(IndexError):
            make_sequence_input(frame, 30)
