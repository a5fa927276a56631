"""Per-day feature assembly and supervised windowing.

Every feature at day i is computed from data at days <= i only: the
low-pass columns come from a transform over the prefix ending at i, the
indicator columns use expanding warm-ups, and the flag columns copy the
quality masks.  Standardization parameters are fitted on the training
span only and applied everywhere.

Daily vector order (defaults):
  price, arrival | temp, humidity, rainfall | missing_flag, outlier_flag,
  ft3, ft6, ft9, ft100, day, month, sma3, sma7, ema_com0.25, ema_com0.5,
  mstd20, macd
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from .data import AlignedSeries, TradingCalendar
from .errors import InsufficientDataError, ShapeError, ValidationError
from .quality import QualityReport

PRESET_PAPER13 = "paper13"


@dataclass(frozen=True)
class FeatureConfig:
    """Knobs of the feature pipeline; defaults give a 19-wide daily vector.

    The ``paper13`` preset drops the month column so the data-quality block
    is 13 wide (18 per day overall).
    """

    k: int = 7
    horizon: int = 30
    fft_retained: tuple = (3, 6, 9, 100)
    sma_windows: tuple = (3, 7)
    ema_coms: tuple = (0.25, 0.5)
    mstd_window: int = 20
    macd_spans: tuple = (12, 26)
    include_time: tuple = ("day", "month")
    standardize: bool = True

    def __post_init__(self):
        if self.k < 1 or self.horizon < 1:
            raise ValidationError("k and horizon must be >= 1")
        for w in (*self.sma_windows, self.mstd_window, *self.macd_spans):
            if w < 1:
                raise ValidationError("every indicator window must be >= 1")
        if any(r < 1 for r in self.fft_retained):
            raise ValidationError("retained frequency counts must be >= 1")
        if any(com <= 0 for com in self.ema_coms):
            raise ValidationError("EMA center of mass must be positive")
        if not set(self.include_time) <= {"day", "month"}:
            raise ValidationError("include_time entries must be 'day' or 'month'")

    @classmethod
    def preset(cls, name: str, **overrides) -> "FeatureConfig":
        if name == PRESET_PAPER13:
            overrides["include_time"] = ("day",)
            return cls(**overrides)
        raise ValidationError(f"unknown preset {name!r}")

    @property
    def ag_names(self) -> tuple:
        return ("price", "arrival")

    @property
    def wd_names(self) -> tuple:
        return ("temp", "humidity", "rainfall")

    @property
    def dq_names(self) -> tuple:
        names = ["missing_flag", "outlier_flag"]
        names += [f"ft{r}" for r in self.fft_retained]
        names += list(self.include_time)
        names += [f"sma{w}" for w in self.sma_windows]
        names += [f"ema_com{com:g}" for com in self.ema_coms]
        names += [f"mstd{self.mstd_window}", "macd"]
        return tuple(names)

    @property
    def column_names(self) -> tuple:
        return self.ag_names + self.wd_names + self.dq_names

    @property
    def day_width(self) -> int:
        return len(self.column_names)


def fft_smooth(values, n_retained: int) -> np.ndarray:
    """Low-pass a sequence by keeping its first ``n_retained`` frequencies.

    Coefficients at indices >= n_retained (with their conjugate partners)
    are zeroed before inverting, so the output is real by construction.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValidationError("values must be non-empty")
    if n_retained < 1:
        raise ValidationError("n_retained must be >= 1")
    spectrum = np.fft.rfft(values)
    spectrum[min(n_retained, spectrum.size):] = 0.0
    return np.fft.irfft(spectrum, n=values.size)


def causal_lowpass_columns(values, retentions) -> np.ndarray:
    """For each day i, the value at i of ``fft_smooth`` over days 0..i.

    Equivalent to ``fft_smooth(values[: i + 1], r)[-1]`` column-wise, but
    evaluates only the final point of each inverse transform.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    retentions = tuple(int(r) for r in retentions)
    out = np.empty((n, len(retentions)))
    for m in range(1, n + 1):
        spectrum = np.fft.rfft(values[:m])
        t = m - 1
        js = np.arange(1, spectrum.size)
        phase = np.exp(2j * np.pi * js * t / m)
        weights = np.full(js.size, 2.0)
        if m % 2 == 0 and js.size:
            weights[-1] = 1.0  # Nyquist bin appears once
        terms = weights * np.real(spectrum[1:] * phase)
        running = np.concatenate([[0.0], np.cumsum(terms)])
        for c, r in enumerate(retentions):
            kept = min(r, spectrum.size) - 1
            out[m - 1, c] = (spectrum[0].real + running[kept]) / m
    return out


def indicators(values, cfg: FeatureConfig | None = None) -> np.ndarray:
    """Moving-statistic columns: SMAs, EMAs, moving std, and MACD.

    Warm-up positions use the expanding-window value so every day is
    populated; EMAs are seeded at the first value (alpha = 1/(1+com) for
    the center-of-mass pair, alpha = 2/(span+1) inside MACD).
    """
    cfg = cfg or FeatureConfig()
    series = pd.Series(np.asarray(values, dtype=float))
    if series.empty:
        raise ValidationError("values must be non-empty")
    cols = []
    for w in cfg.sma_windows:
        cols.append(series.rolling(w, min_periods=1).mean())
    for com in cfg.ema_coms:
        cols.append(series.ewm(com=com, adjust=False).mean())
    cols.append(series.rolling(cfg.mstd_window, min_periods=1).std(ddof=0))
    fast, slow = cfg.macd_spans
    macd = (series.ewm(span=fast, adjust=False).mean()
            - series.ewm(span=slow, adjust=False).mean())
    cols.append(macd)
    return np.column_stack([c.to_numpy() for c in cols])


@dataclass(frozen=True)
class FeatureFrame:
    """Assembled per-day vectors plus the scaling fitted on the train span."""

    calendar: TradingCalendar
    columns: tuple
    values: np.ndarray          # standardized when config.standardize
    raw: np.ndarray
    prices: np.ndarray          # imputed prices, currency units
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    target_mean: float
    target_scale: float
    train_len: int
    config: FeatureConfig

    def __post_init__(self):
        for name in ("values", "raw", "prices", "feature_mean", "feature_scale"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        n = len(self.calendar)
        width = len(self.columns)
        if self.values.shape != (n, width) or self.raw.shape != (n, width):
            raise ShapeError("feature matrix shape does not match calendar/columns")

    def __len__(self) -> int:
        return len(self.calendar)

    @property
    def day_width(self) -> int:
        return len(self.columns)


def build_feature_frame(series: AlignedSeries, report: QualityReport,
                        cfg: FeatureConfig | None = None,
                        train_len: int | None = None) -> FeatureFrame:
    """Assemble the daily feature matrix for a fully imputed series."""
    cfg = cfg or FeatureConfig()
    n = len(series)
    if report.missing_mask.shape != (n,):
        raise ShapeError(
            f"quality masks have length {report.missing_mask.size}, series has {n}")
    for name in ("price", "arrival", "temp", "humidity", "rainfall"):
        if np.isnan(getattr(series, name)).any():
            raise ValidationError(f"series column {name!r} is not fully imputed")
    train_len = n if train_len is None else int(train_len)
    if not 1 <= train_len <= n:
        raise ValidationError(f"train_len {train_len} outside 1..{n}")

    day, month = series.calendar.day_month_arrays()
    time_cols = {"day": day, "month": month}
    blocks = [
        series.price, series.arrival,
        series.temp, series.humidity, series.rainfall,
        report.missing_mask.astype(float), report.outlier_mask.astype(float),
        causal_lowpass_columns(series.price, cfg.fft_retained),
    ]
    blocks += [time_cols[name] for name in cfg.include_time]
    blocks.append(indicators(series.price, cfg))
    raw = np.column_stack(blocks)

    mean = raw[:train_len].mean(axis=0)
    scale = raw[:train_len].std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    if cfg.standardize:
        values = (raw - mean) / scale
        target_mean = float(series.price[:train_len].mean())
        target_scale = float(series.price[:train_len].std()) or 1.0
    else:
        values = raw.copy()
        mean = np.zeros(raw.shape[1])
        scale = np.ones(raw.shape[1])
        target_mean, target_scale = 0.0, 1.0

    return FeatureFrame(
        calendar=series.calendar, columns=cfg.column_names, values=values,
        raw=raw, prices=series.price, feature_mean=mean, feature_scale=scale,
        target_mean=target_mean, target_scale=target_scale,
        train_len=train_len, config=cfg)


@dataclass(frozen=True)
class SupervisedSet:
    """Flattened k-day input windows paired with horizon-length targets."""

    inputs: np.ndarray
    targets: np.ndarray
    issue_indices: np.ndarray
    k: int
    day_width: int
    target_mean: float
    target_scale: float

    def __post_init__(self):
        for name in ("inputs", "targets"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        idx = np.asarray(self.issue_indices, dtype=int).copy()
        idx.setflags(write=False)
        object.__setattr__(self, "issue_indices", idx)
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ShapeError("inputs and targets disagree on row count")
        if self.inputs.shape[1] != self.k * self.day_width:
            raise ShapeError("input width must equal k * day_width")

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def horizon(self) -> int:
        return self.targets.shape[1]

    def sequences(self) -> np.ndarray:
        """Inputs reshaped to (rows, k, day_width) for sequence models."""
        return self.inputs.reshape(len(self), self.k, self.day_width)

    def subset(self, row_mask) -> "SupervisedSet":
        row_mask = np.asarray(row_mask)
        return SupervisedSet(
            inputs=self.inputs[row_mask], targets=self.targets[row_mask],
            issue_indices=self.issue_indices[row_mask], k=self.k,
            day_width=self.day_width, target_mean=self.target_mean,
            target_scale=self.target_scale)


def make_supervised(frame: FeatureFrame, k: int | None = None,
                    horizon: int | None = None) -> SupervisedSet:
    """Pair each admissible day i with targets i+1..i+horizon.

    Row count is ``len(frame) - k - horizon + 1``; the first admissible
    issue day is k-1 and no target overlaps its own input window.
    """
    cfg = frame.config
    k = cfg.k if k is None else int(k)
    horizon = cfg.horizon if horizon is None else int(horizon)
    n = len(frame)
    if n < k + horizon:
        raise InsufficientDataError(
            f"frame length {n} < k + horizon = {k + horizon}")
    issue = np.arange(k - 1, n - horizon)
    windows = sliding_window_view(frame.values, k, axis=0)   # (n-k+1, width, k)
    inputs = windows.transpose(0, 2, 1).reshape(n - k + 1, k * frame.day_width)
    zprices = (frame.prices - frame.target_mean) / frame.target_scale
    targets = sliding_window_view(zprices, horizon)[issue + 1]
    return SupervisedSet(
        inputs=inputs[issue - (k - 1)], targets=targets, issue_indices=issue,
        k=k, day_width=frame.day_width,
        target_mean=frame.target_mean, target_scale=frame.target_scale)


def make_sequence_input(frame: FeatureFrame, i: int, k: int | None = None) -> np.ndarray:
    """The (k, day_width) window of standardized day vectors ending at day i."""
    k = frame.config.k if k is None else int(k)
    n = len(frame)
    if not k - 1 <= i < n:
        raise IndexError(f"day {i} has no full {k}-day window in a frame of {n}")
    return frame.values[i - k + 1:i + 1].copy()


def input_row(frame: FeatureFrame, i: int, k: int | None = None) -> np.ndarray:
    """Flattened (row-major) counterpart of :func:`make_sequence_input`."""
    return make_sequence_input(frame, i, k).reshape(-1)
