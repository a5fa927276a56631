"""Stationarity tests, additive decomposition, and the trend score.

ADF and KPSS are implemented directly so their recipes stay pinned:

* ADF: constant-only regression, starting lag floor(12 * (n/100)**0.25)
  reduced while the highest-lag coefficient is insignificant; the 5%
  critical value is the fixed large-sample constant -2.86 and the unit
  root is rejected when stat < crit.
* KPSS: level statistic with a Bartlett/Newey-West long-run variance at
  bandwidth floor(4 * (n/100)**0.25); 5% critical value 0.463;
  stationarity is rejected when stat > crit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InsufficientDataError, NumericalError, ValidationError

ADF_CRIT_5PCT = -2.86
KPSS_CRIT_5PCT = 0.463
MIN_TEST_LENGTH = 30
# two-sided 10% normal quantile used by the highest-lag significance check
LAG_TSTAT_CUTOFF = 1.6449
DEFAULT_PERIOD = 6  # one market week: six trading days


class Stationarity(str, Enum):
    NON_STATIONARY = "non_stationary"
    STRICT_STATIONARY = "strict_stationary"
    TREND_STATIONARY = "trend_stationary"
    DIFFERENCE_STATIONARY = "difference_stationary"


class TrendPolarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class AdfResult:
    stat: float
    crit_5pct: float
    reject_unit_root: bool
    lag: int


@dataclass(frozen=True)
class KpssResult:
    stat: float
    crit_5pct: float
    reject_stationarity: bool
    bandwidth: int


@dataclass(frozen=True)
class StationarityResult:
    adf_stat: float
    adf_crit_5pct: float
    kpss_stat: float
    kpss_crit_5pct: float
    classification: Stationarity


@dataclass(frozen=True)
class TrendLabel:
    """Sign of the summed relative day-over-day increments of a window."""

    polarity: TrendPolarity
    score: float

    def __post_init__(self):
        expected = TrendPolarity.POSITIVE if self.score > 0 else TrendPolarity.NEGATIVE
        if self.polarity is not expected:
            raise ValidationError("polarity inconsistent with score sign")


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """OLS coefficients, their standard errors, and the RSS.

    Raises NumericalError when the design matrix is rank deficient or
    there are no residual degrees of freedom.
    """
    n, k = x.shape
    if n <= k:
        raise NumericalError(f"regression needs > {k} rows, got {n}")
    gram = x.T @ x
    if np.linalg.matrix_rank(gram) < k:
        raise NumericalError("singular regression (collinear or zero-variance regressor)")
    coeffs, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coeffs
    rss = float(resid @ resid)
    sigma2 = rss / (n - k)
    cov = sigma2 * np.linalg.inv(gram)
    se = np.sqrt(np.diag(cov))
    return coeffs, se, rss


def _adf_design(values: np.ndarray, lag: int, offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Regression of dy_t on [1, y_{t-1}, dy_{t-1..t-lag}] starting at t = offset+1."""
    dy = np.diff(values)
    rows = np.arange(offset, dy.size)
    y_lag = values[rows]
    cols = [np.ones(rows.size), y_lag]
    for j in range(1, lag + 1):
        cols.append(dy[rows - j])
    return np.column_stack(cols), dy[rows]


def adf_test(values) -> AdfResult:
    """Augmented Dickey-Fuller test with the fixed 5% critical value.

    Candidate lags are compared on a common sample aligned at the maximum
    lag; the chosen lag is then refit on all available rows.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < MIN_TEST_LENGTH:
        raise InsufficientDataError(f"ADF needs >= {MIN_TEST_LENGTH} points, got {n}")
    if np.std(values) == 0.0:
        raise NumericalError("zero-variance series has no unit-root regression")
    max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = min(max_lag, (n - 1) // 2 - 2)
    max_lag = max(max_lag, 0)
    lag = max_lag
    while lag > 0:
        x, y = _adf_design(values, lag, offset=max_lag)
        coeffs, se, _ = _ols(x, y)
        t_last = coeffs[-1] / se[-1]
        if abs(t_last) >= LAG_TSTAT_CUTOFF:
            break
        lag -= 1
    x, y = _adf_design(values, lag, offset=lag)
    coeffs, se, _ = _ols(x, y)
    stat = float(coeffs[1] / se[1])
    return AdfResult(stat=stat, crit_5pct=ADF_CRIT_5PCT,
                     reject_unit_root=stat < ADF_CRIT_5PCT, lag=lag)


def kpss_test(values) -> KpssResult:
    """Level-stationarity KPSS test with the fixed 5% critical value."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < MIN_TEST_LENGTH:
        raise InsufficientDataError(f"KPSS needs >= {MIN_TEST_LENGTH} points, got {n}")
    bandwidth = int(np.floor(4.0 * (n / 100.0) ** 0.25))
    resid = values - values.mean()
    partial = np.cumsum(resid)
    numerator = float(partial @ partial) / (n * n)
    gamma0 = float(resid @ resid) / n
    lrv = gamma0
    for j in range(1, bandwidth + 1):
        gamma = float(resid[j:] @ resid[:-j]) / n
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma
    stat = 0.0 if lrv == 0.0 else numerator / lrv
    return KpssResult(stat=stat, crit_5pct=KPSS_CRIT_5PCT,
                      reject_stationarity=stat > KPSS_CRIT_5PCT, bandwidth=bandwidth)


def classify_stationarity(adf: AdfResult, kpss: KpssResult) -> Stationarity:
    """Joint reading of the two tests (total over all four outcomes)."""
    if adf.reject_unit_root and not kpss.reject_stationarity:
        return Stationarity.STRICT_STATIONARY
    if not adf.reject_unit_root and kpss.reject_stationarity:
        return Stationarity.NON_STATIONARY
    if not adf.reject_unit_root and not kpss.reject_stationarity:
        return Stationarity.TREND_STATIONARY
    return Stationarity.DIFFERENCE_STATIONARY


def stationarity_result(values) -> StationarityResult:
    adf = adf_test(values)
    kpss = kpss_test(values)
    return StationarityResult(
        adf_stat=adf.stat, adf_crit_5pct=adf.crit_5pct,
        kpss_stat=kpss.stat, kpss_crit_5pct=kpss.crit_5pct,
        classification=classify_stationarity(adf, kpss))


@dataclass(frozen=True)
class Decomposition:
    """Additive trend/seasonal/residual split; NaN where the trend is undefined."""

    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    def __post_init__(self):
        for name in ("trend", "seasonal", "residual"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.trend.shape == self.seasonal.shape == self.residual.shape):
            raise ValidationError("component arrays must share one shape")


def _centered_moving_average(values: np.ndarray, period: int) -> np.ndarray:
    """Centered MA of window ``period``; even windows take the half-weight
    convention over period+1 points.  Edges are NaN."""
    n = values.size
    out = np.full(n, np.nan)
    if period % 2 == 1:
        half = period // 2
        weights = np.full(period, 1.0 / period)
        span = period
    else:
        half = period // 2
        weights = np.full(period + 1, 1.0 / period)
        weights[0] = weights[-1] = 0.5 / period
        span = period + 1
    if n < span:
        return out
    smoothed = np.convolve(values, weights, mode="valid")
    out[half:half + smoothed.size] = smoothed
    return out


def seasonal_decompose(values, period: int = DEFAULT_PERIOD) -> Decomposition:
    """Classical additive decomposition with a centered-moving-average trend.

    The seasonal component is the per-phase mean of the detrended values,
    re-centered so one full period sums to zero.
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if period < 2:
        raise ValidationError("period must be >= 2")
    if n < 2 * period:
        raise InsufficientDataError(
            f"decomposition needs >= {2 * period} points for period {period}, got {n}")
    trend = _centered_moving_average(values, period)
    detrended = values - trend
    phases = np.arange(n) % period
    means = np.empty(period)
    for p in range(period):
        sel = detrended[phases == p]
        sel = sel[~np.isnan(sel)]
        means[p] = sel.mean() if sel.size else 0.0
    means -= means.mean()
    seasonal = means[phases]
    residual = values - trend - seasonal
    return Decomposition(trend=trend, seasonal=seasonal, residual=residual, period=period)


def residual_stats(decomposition: Decomposition) -> tuple[float, float]:
    """Sample mean and sample standard deviation of the defined residuals."""
    resid = decomposition.residual
    resid = resid[~np.isnan(resid)]
    if resid.size < 2:
        raise InsufficientDataError("residual statistics need >= 2 defined entries")
    return float(resid.mean()), float(resid.std(ddof=1))


def trend_score(window) -> TrendLabel:
    """Summed relative increments of a price window; ties route negative.

    score = sum((p[i+1] - p[i]) / p[i]); the polarity is positive only for
    a strictly positive score, so a flat window counts as a negative trend.
    """
    window = np.asarray(window, dtype=float)
    if window.size < 2:
        raise InsufficientDataError("trend score needs at least 2 prices")
    if (window <= 0).any() or np.isnan(window).any():
        raise DomainError("trend score requires strictly positive prices")
    increments = np.diff(window) / window[:-1]
    score = float(increments.sum())
    polarity = TrendPolarity.POSITIVE if score > 0 else TrendPolarity.NEGATIVE
    return TrendLabel(polarity=polarity, score=score)
