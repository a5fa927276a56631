"""Missing-value detection, spline imputation, and IQR outlier flagging.

Quartiles use linear interpolation between order statistics at positions
(n-1) * 0.25 and (n-1) * 0.75; the convention is pinned so masks are
reproducible.  Outlier values are flagged but never modified.
"""

from __future__ import annotations

from bisect import insort
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .data import AlignedSeries
from .errors import InsufficientDataError, ShapeError, ValidationError

MIN_SPLINE_POINTS = 4
PRICE_EPS = 1e-6  # imputed prices are clipped here so positivity survives overshoot


@dataclass(frozen=True)
class QualityReport:
    """Per-series missing/outlier masks with their summary fractions."""

    missing_mask: np.ndarray
    outlier_mask: np.ndarray
    missing_fraction: float
    outlier_fraction: float
    max_consecutive_missing: int

    def __post_init__(self):
        for name in ("missing_mask", "outlier_mask"):
            arr = np.asarray(getattr(self, name), dtype=bool).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.missing_mask.shape != self.outlier_mask.shape:
            raise ShapeError("missing and outlier masks must have equal length")
        n = self.missing_mask.size
        if n == 0:
            raise ValidationError("masks must be non-empty")
        if abs(self.missing_fraction - self.missing_mask.sum() / n) > 1e-12:
            raise ValidationError("missing_fraction does not match its mask")
        if abs(self.outlier_fraction - self.outlier_mask.sum() / n) > 1e-12:
            raise ValidationError("outlier_fraction does not match its mask")

    @classmethod
    def from_masks(cls, missing_mask, outlier_mask) -> "QualityReport":
        missing_mask = np.asarray(missing_mask, dtype=bool)
        outlier_mask = np.asarray(outlier_mask, dtype=bool)
        return cls(
            missing_mask=missing_mask,
            outlier_mask=outlier_mask,
            missing_fraction=float(missing_mask.mean()),
            outlier_fraction=float(outlier_mask.mean()),
            max_consecutive_missing=max_run_length(missing_mask),
        )


def max_run_length(mask) -> int:
    """Length of the longest run of True values."""
    longest = current = 0
    for flag in np.asarray(mask, dtype=bool):
        current = current + 1 if flag else 0
        longest = max(longest, current)
    return int(longest)


def detect_missing(series: AlignedSeries) -> np.ndarray:
    """True exactly where the price is absent on a trading day."""
    return np.isnan(series.price)


def _spline_fill(values: np.ndarray, lo: float | None = None,
                 hi: float | None = None) -> np.ndarray:
    """Fill NaNs by natural cubic spline over day index.

    Leading/trailing gaps take the nearest observed value (cubic
    extrapolation diverges); interpolated values are clipped to [lo, hi]
    so domain bounds survive overshoot.  Observed entries are untouched.
    """
    values = np.asarray(values, dtype=float)
    observed = ~np.isnan(values)
    if observed.all():
        return values.copy()
    n_obs = int(observed.sum())
    if n_obs < MIN_SPLINE_POINTS:
        raise InsufficientDataError(
            f"spline imputation needs >= {MIN_SPLINE_POINTS} observed points, got {n_obs}")
    idx = np.arange(values.size, dtype=float)
    spline = CubicSpline(idx[observed], values[observed], bc_type="natural")
    out = values.copy()
    holes = ~observed
    first, last = idx[observed][0], idx[observed][-1]
    inner = holes & (idx > first) & (idx < last)
    out[inner] = spline(idx[inner])
    out[holes & (idx < first)] = values[observed][0]
    out[holes & (idx > last)] = values[observed][-1]
    if lo is not None or hi is not None:
        filled = out[holes]
        out[holes] = np.clip(filled, lo, hi)
    return out


def impute_spline(series: AlignedSeries, mask=None) -> AlignedSeries:
    """Return a copy of the series with absent values filled.

    Price and arrival are spline-filled; weather columns get the same
    treatment when partly absent (bounded columns are clipped back to
    their domain).  A fully absent weather column is left as-is so
    price-only files still pass quality analysis; a fully absent price or
    arrival column raises InsufficientDataError.
    """
    if mask is not None and np.asarray(mask).shape != series.price.shape:
        raise ShapeError("mask length does not match the series")
    bounds = {
        "price": (PRICE_EPS, None),
        "arrival": (0.0, None),
        "temp": (None, None),
        "humidity": (0.0, 100.0),
        "rainfall": (0.0, None),
    }
    cols = {}
    for name, (lo, hi) in bounds.items():
        values = getattr(series, name)
        if np.isnan(values).all():
            if name in ("price", "arrival"):
                raise InsufficientDataError(f"column {name!r} has no observed values")
            cols[name] = values
            continue
        cols[name] = _spline_fill(values, lo, hi)
    return series.with_columns(**cols)


def _quartiles_sorted(ordered: list | np.ndarray) -> tuple[float, float]:
    """Q1/Q3 by linear interpolation at positions (n-1)*q over sorted data."""
    ordered = np.asarray(ordered, dtype=float)
    n = ordered.size
    out = []
    for q in (0.25, 0.75):
        pos = (n - 1) * q
        lo = int(np.floor(pos))
        hi = int(np.ceil(pos))
        frac = pos - lo
        out.append(ordered[lo] * (1.0 - frac) + ordered[hi] * frac)
    return out[0], out[1]


def detect_outliers_iqr(values, multiplier: float = 1.0) -> np.ndarray:
    """Flag values outside [Q1 - m*IQR, Q3 + m*IQR] over the whole window.

    Expects a fully observed sequence (impute first); the values
    themselves are never modified.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValidationError("values must be non-empty")
    if np.isnan(values).any():
        raise ValidationError("values contain NaN; impute before outlier detection")
    if multiplier <= 0:
        raise ValidationError("multiplier must be positive")
    q1, q3 = _quartiles_sorted(np.sort(values))
    iqr = q3 - q1
    return (values < q1 - multiplier * iqr) | (values > q3 + multiplier * iqr)


def expanding_outlier_mask(values, multiplier: float = 1.0) -> np.ndarray:
    """Causal variant: day i is tested against the quartiles of days 0..i.

    Used where no feature at day i may depend on any later datum.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValidationError("values must be non-empty")
    if np.isnan(values).any():
        raise ValidationError("values contain NaN; impute before outlier detection")
    ordered: list[float] = []
    mask = np.zeros(values.size, dtype=bool)
    for i, v in enumerate(values):
        insort(ordered, float(v))
        q1, q3 = _quartiles_sorted(ordered)
        iqr = q3 - q1
        mask[i] = v < q1 - multiplier * iqr or v > q3 + multiplier * iqr
    return mask


def quality_report(series: AlignedSeries, multiplier: float = 1.0,
                   causal: bool = False) -> QualityReport:
    """Missing and outlier profile of one series.

    Outliers are computed on the imputed price series (the documented
    choice: the profile is taken after gap filling).  ``causal=True``
    switches to the expanding-window outlier rule.
    """
    missing = detect_missing(series)
    imputed = impute_spline(series)
    detector = expanding_outlier_mask if causal else detect_outliers_iqr
    outliers = detector(imputed.price, multiplier)
    return QualityReport.from_masks(missing, outliers)
