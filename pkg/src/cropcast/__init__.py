"""Data-quality-aware crop price forecasting toolkit.

The library walks the pipeline: ingest or synthesize per-market daily
series, profile and repair their quality, derive stationarity/trend
diagnostics, assemble per-day feature vectors, train small forecasting
models, and evaluate catalog-backed model-selection strategies with a
walk-forward harness.
"""

from .catalog import CatalogEntry, ModelCatalog, catalog_best, catalog_put
from .data import (AlignedSeries, MarketRecord, TradingCalendar, WeatherRecord,
                   WeatherSeries, align, read_aligned_csv, write_aligned_csv)
from .errors import CropcastError
from .evaluation import (EvalConfig, EvaluationReport, ForecastRecord, aoc,
                         ced_curve, forecast_metrics, rolling_evaluate,
                         rolling_evaluate_many)
from .features import (FeatureConfig, FeatureFrame, SupervisedSet,
                       build_feature_frame, fft_smooth, indicators,
                       input_row, make_sequence_input, make_supervised)
from .ingest import load_market_csv, load_weather_csv
from .models import TrainConfig
from .quality import (QualityReport, detect_missing, detect_outliers_iqr,
                      impute_spline, quality_report)
from .stats import (AdfResult, Decomposition, KpssResult, Stationarity,
                    StationarityResult, TrendLabel, TrendPolarity, adf_test,
                    classify_stationarity, kpss_test, residual_stats,
                    seasonal_decompose, stationarity_result, trend_score)
from .strategies import make_strategy
from .synthetic import (SyntheticSpec, SyntheticTruth, generate_synthetic,
                        generate_synthetic_detailed)

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry", "ModelCatalog", "catalog_best", "catalog_put",
    "AlignedSeries", "MarketRecord", "TradingCalendar", "WeatherRecord",
    "WeatherSeries", "align", "read_aligned_csv", "write_aligned_csv",
    "CropcastError",
    "EvalConfig", "EvaluationReport", "ForecastRecord", "aoc", "ced_curve",
    "forecast_metrics", "rolling_evaluate", "rolling_evaluate_many",
    "FeatureConfig", "FeatureFrame", "SupervisedSet", "build_feature_frame",
    "fft_smooth", "indicators", "input_row", "make_sequence_input",
    "make_supervised",
    "load_market_csv", "load_weather_csv",
    "TrainConfig",
    "QualityReport", "detect_missing", "detect_outliers_iqr", "impute_spline",
    "quality_report",
    "AdfResult", "Decomposition", "KpssResult", "Stationarity",
    "StationarityResult", "TrendLabel", "TrendPolarity", "adf_test",
    "classify_stationarity", "kpss_test", "residual_stats",
    "seasonal_decompose", "stationarity_result", "trend_score",
    "make_strategy",
    "SyntheticSpec", "SyntheticTruth", "generate_synthetic",
    "generate_synthetic_detailed",
    "__version__",
]
