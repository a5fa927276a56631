"""Walk-forward harness and the evaluation metrics.

Every issue day d sees only data up to d: the raw series is truncated,
imputed, profiled, and featurized from scratch before the strategy picks
a model and the 30-day forecast is scored against the raw (unimputed)
future, ignoring positions with no ground truth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._threads import single_thread_blas
from .data import AlignedSeries
from .errors import (ConfigError, CropcastError, ShapeError,
                     UnevaluableForecastError, ValidationError)
from .features import FeatureConfig, build_feature_frame, make_supervised
from .models import TrainConfig
from .quality import QualityReport, detect_missing, detect_outliers_iqr, impute_spline

MODEL_KINDS = ("mlp", "lstm", "ar")


def forecast_metrics(pred, truth) -> tuple[float, float]:
    """RMSE and MAPE of one forecast over the positions with ground truth.

    Positions whose truth is absent are ignored; non-positive truth values
    are excluded with a warning (prices are positive by contract).  Raises
    UnevaluableForecastError when nothing remains.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ShapeError(f"prediction {pred.shape} vs truth {truth.shape}")
    present = ~np.isnan(truth)
    bad = present & (truth <= 0)
    if bad.any():
        warnings.warn(f"excluding {int(bad.sum())} non-positive truth positions")
        present &= truth > 0
    if not present.any():
        raise UnevaluableForecastError("no ground truth available for this forecast")
    diff = pred[present] - truth[present]
    rmse = float(np.sqrt(np.mean(diff * diff)))
    mape = float(np.mean(100.0 * np.abs(diff) / truth[present]))
    return rmse, mape


def ced_curve(errors, n_grid: int = 100) -> np.ndarray:
    """Cumulative error distribution: fraction of errors <= each threshold.

    Thresholds are a uniform 0..max grid of ``n_grid`` steps merged with
    the exact error values, so the curve is exact at every sample point.
    """
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise ValidationError("errors must be non-empty")
    top = float(errors.max())
    grid = np.union1d(np.linspace(0.0, top, n_grid + 1), errors)
    fractions = (errors[None, :] <= grid[:, None]).mean(axis=1)
    return np.column_stack([grid, fractions])


def aoc(curve: np.ndarray) -> float:
    """Area between the curve and the line fraction = 1 over [0, max].

    The curve is a right-continuous step function (the fraction holds from
    each threshold until the next), so the trapezoids are taken over the
    step path: vertical jumps contribute zero width.  With every error
    value on the grid this equals the mean error exactly.
    """
    curve = np.asarray(curve, dtype=float)
    if curve.ndim != 2 or curve.shape[1] != 2:
        raise ShapeError("curve must be an (n, 2) array of (threshold, fraction)")
    widths = np.diff(curve[:, 0])
    return float(np.sum(widths * (1.0 - curve[:-1, 1])))


@dataclass(frozen=True)
class ForecastRecord:
    issue_index: int
    issue_date: str
    prediction: np.ndarray
    truth: np.ndarray
    rmse: float
    mape: float
    evaluable: bool

    def __post_init__(self):
        for name in ("prediction", "truth"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class EvaluationReport:
    market_id: str
    strategy: str
    records: tuple
    ar: float
    am: float
    ced_points: np.ndarray
    aoc: float
    p: int
    failures: tuple = ()

    def __post_init__(self):
        arr = np.asarray(self.ced_points, dtype=float).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "ced_points", arr)


@dataclass(frozen=True)
class EvalConfig:
    """Walk-forward protocol settings (defaults: 997 train / 128 test days)."""

    train_days: int = 997
    test_days: int = 128
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    model_kind: str = "mlp"
    seed: int = 0
    outlier_multiplier: float = 1.0
    ced_metric: str = "mape"
    ced_grid: int = 100
    lstm_units: tuple = (100, 100)
    mlp_hidden: int = 10

    def __post_init__(self):
        if self.train_days < self.feature.k + self.feature.horizon:
            raise ConfigError("train_days too small for one supervised row")
        if self.test_days < 1:
            raise ConfigError("test_days must be >= 1")
        if self.model_kind not in MODEL_KINDS:
            raise ConfigError(f"model_kind must be one of {MODEL_KINDS}")
        if self.ced_metric not in ("mape", "rmse"):
            raise ConfigError("ced_metric must be 'mape' or 'rmse'")


@dataclass(frozen=True)
class DayContext:
    """Everything a strategy may read at one issue day (data through d only)."""

    market_id: str
    crop_id: str
    day_index: int
    date: str
    raw_price: np.ndarray
    prices: np.ndarray       # imputed, currency
    report: QualityReport
    frame: object
    sup: object
    cfg: EvalConfig

    @property
    def k(self) -> int:
        return self.cfg.feature.k

    @property
    def horizon(self) -> int:
        return self.cfg.feature.horizon


def _build_context(series: AlignedSeries, d: int, cfg: EvalConfig) -> DayContext:
    sub = series.head(d + 1)
    missing = detect_missing(sub)
    imputed = impute_spline(sub)
    outliers = detect_outliers_iqr(imputed.price, cfg.outlier_multiplier)
    report = QualityReport.from_masks(missing, outliers)
    frame = build_feature_frame(imputed, report, cfg.feature)
    sup = make_supervised(frame)
    return DayContext(
        market_id=series.market_id, crop_id=series.crop_id, day_index=d,
        date=series.calendar.date_of(d).isoformat(), raw_price=sub.price,
        prices=frame.prices, report=report, frame=frame, sup=sup, cfg=cfg)


def _truth_window(series: AlignedSeries, d: int, horizon: int) -> np.ndarray:
    out = np.full(horizon, np.nan)
    future = series.price[d + 1:d + 1 + horizon]
    out[:future.size] = future
    return out


def rolling_evaluate_many(series_list, strategy, cfg: EvalConfig) -> dict:
    """Walk the evaluation span once for a group of markets.

    The strategy sees all markets each day (crop-level strategies share
    state across them); every market gets its own report.  Per-day
    failures are recorded and do not abort the run.
    """
    series_list = list(series_list)
    if not series_list:
        raise ConfigError("no series to evaluate")
    ids = [s.market_id for s in series_list]
    if len(set(ids)) != len(ids):
        raise ConfigError("duplicate market ids in one evaluation group")
    for s in series_list:
        if len(s) < cfg.train_days + cfg.test_days:
            raise ConfigError(
                f"{s.market_id}: needs >= {cfg.train_days + cfg.test_days} days, has {len(s)}")
    horizon = cfg.feature.horizon
    records = {mid: [] for mid in ids}
    failures = {mid: [] for mid in ids}

    with single_thread_blas():
        for j in range(cfg.test_days):
            d = cfg.train_days - 1 + j
            contexts = {}
            for s in series_list:
                contexts[s.market_id] = _build_context(s, d, cfg)
            try:
                models = strategy.select_day(contexts)
            except CropcastError as exc:
                for s in series_list:
                    failures[s.market_id].append((contexts[s.market_id].date, str(exc)))
                continue
            for s in series_list:
                ctx = contexts[s.market_id]
                model = models.get(s.market_id)
                if model is None:
                    failures[s.market_id].append((ctx.date, "no model selected"))
                    continue
                trained_through = getattr(model, "trained_through", d)
                if trained_through > d:
                    raise ValidationError(
                        f"lookahead: model trained through {trained_through} used at day {d}")
                pred = forecast_with(model, ctx, ctx.day_index)
                truth = _truth_window(s, d, horizon)
                try:
                    rmse, mape = forecast_metrics(pred, truth)
                    evaluable = True
                except UnevaluableForecastError:
                    rmse = mape = float("nan")
                    evaluable = False
                records[s.market_id].append(ForecastRecord(
                    issue_index=d, issue_date=ctx.date, prediction=pred,
                    truth=truth, rmse=rmse, mape=mape, evaluable=evaluable))

    out = {}
    for s in series_list:
        out[s.market_id] = _aggregate(s.market_id, strategy.name,
                                      records[s.market_id], failures[s.market_id], cfg)
    return out


def rolling_evaluate(series: AlignedSeries, strategy, cfg: EvalConfig) -> EvaluationReport:
    """Single-market walk-forward evaluation."""
    return rolling_evaluate_many([series], strategy, cfg)[series.market_id]


def _aggregate(market_id, strategy_name, recs, fails, cfg) -> EvaluationReport:
    evaluable = [r for r in recs if r.evaluable]
    p = len(evaluable)
    if p:
        ar = float(np.mean([r.rmse for r in evaluable]))
        am = float(np.mean([r.mape for r in evaluable]))
        errors = [r.mape if cfg.ced_metric == "mape" else r.rmse for r in evaluable]
        curve = ced_curve(errors, cfg.ced_grid)
        area = aoc(curve)
    else:
        ar = am = area = float("nan")
        curve = np.empty((0, 2))
    return EvaluationReport(
        market_id=market_id, strategy=strategy_name, records=tuple(recs),
        ar=ar, am=am, ced_points=curve, aoc=area, p=p, failures=tuple(fails))


def forecast_with(model, ctx: DayContext, issue_index: int) -> np.ndarray:
    """Dispatch a horizon forecast for any supported model at an issue day."""
    # local import: strategies wrap models and itself imports this module
    from .models import ArBaseline, LstmModel, ar_predict, lstm_predict, mlp_predict
    from .features import input_row, make_sequence_input
    from .strategies import RescaledModel

    override = getattr(model, "forecast_at", None)
    if callable(override):
        return np.asarray(override(ctx, issue_index), dtype=float)
    horizon = ctx.horizon
    if isinstance(model, RescaledModel):
        z = forecast_with(model.base, ctx, issue_index)
        return z * model.target_scale + model.target_mean
    if isinstance(model, ArBaseline):
        return ar_predict(model, ctx.prices[:issue_index + 1], horizon=horizon)
    if isinstance(model, LstmModel):
        return lstm_predict(model, make_sequence_input(ctx.frame, issue_index, ctx.k))
    return mlp_predict(model, input_row(ctx.frame, issue_index, ctx.k))
