"""Seeded synthetic market/weather generation for desk-scale verification.

The generator is a pure function of its spec: identical specs produce
bit-identical series.  Sub-streams (price noise, weather, arrival,
corruption) each get an independent seed derived from ``spec.seed`` so
that, for example, turning corruption on does not change the clean price
path.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .data import SUNDAY, AlignedSeries, TradingCalendar
from .errors import ValidationError
from .seeding import rng_for

PRICE_FLOOR = 0.01


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of one synthetic (market, crop) series.

    The price path is trend + seasonality + AR(1) noise, floored at a small
    positive epsilon.  ``weather_coupling`` adds a persistent latent driver
    that is visible through the weather columns, and ``regime_length``
    switches the trend direction every that-many days (0 disables), which
    together cover the structured scenarios the backtests exercise.
    """

    n_days: int
    base_price: float = 2000.0
    trend_slope: float = 0.0
    seasonal_amplitude: float = 0.0
    seasonal_period: int = 120
    noise_std: float = 0.0
    ar1_coeff: float = 0.0
    missing_rate: float = 0.0
    outlier_rate: float = 0.0
    outlier_scale: float = 3.0
    seed: int = 0
    start_date: str = "2016-01-01"
    weather_coupling: float = 0.0
    weather_lag: int = 0
    regime_length: int = 0
    market_id: str = "SYN"
    crop_id: str = "SYN"

    def __post_init__(self):
        if self.n_days < 1:
            raise ValidationError("n_days must be >= 1")
        for name in ("missing_rate", "outlier_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValidationError(f"{name} must be in [0, 1], got {rate}")
        if not -1.0 < self.ar1_coeff < 1.0:
            raise ValidationError("ar1_coeff must be in (-1, 1)")
        if self.seasonal_period < 1:
            raise ValidationError("seasonal_period must be >= 1")
        if self.outlier_scale <= 0:
            raise ValidationError("outlier_scale must be positive")
        if self.noise_std < 0:
            raise ValidationError("noise_std must be >= 0")
        if self.regime_length < 0:
            raise ValidationError("regime_length must be >= 0")
        if self.weather_lag < 0:
            raise ValidationError("weather_lag must be >= 0")


@dataclass(frozen=True)
class SyntheticTruth:
    """Generator bookkeeping: the uncorrupted path and the injected masks."""

    clean_price: np.ndarray
    missing_mask: np.ndarray
    outlier_mask: np.ndarray

    def __post_init__(self):
        for name in ("clean_price", "missing_mask", "outlier_mask"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def injected_missing_fraction(self) -> float:
        return float(self.missing_mask.mean())

    @property
    def injected_outlier_fraction(self) -> float:
        return float(self.outlier_mask.mean())


def _ar1(rng: np.random.Generator, n: int, coeff: float, marginal_std: float) -> np.ndarray:
    """AR(1) path whose marginal standard deviation equals ``marginal_std``."""
    if marginal_std == 0.0 or n == 0:
        return np.zeros(n)
    innov_std = marginal_std * np.sqrt(1.0 - coeff * coeff)
    eps = rng.normal(0.0, 1.0, size=n)
    out = np.empty(n)
    out[0] = eps[0] * marginal_std
    for t in range(1, n):
        out[t] = coeff * out[t - 1] + innov_std * eps[t]
    return out


def _regime_trend(n: int, slope: float, segment: int) -> np.ndarray:
    """Triangle-wave trend: slope sign flips every ``segment`` days."""
    t = np.arange(n)
    direction = np.where((t // segment) % 2 == 0, 1.0, -1.0)
    steps = slope * direction
    trend = np.concatenate([[0.0], np.cumsum(steps[1:])])
    return trend


def generate_synthetic_detailed(spec: SyntheticSpec) -> tuple[AlignedSeries, SyntheticTruth]:
    """Generate a series plus the ground-truth corruption bookkeeping."""
    n = spec.n_days
    calendar = TradingCalendar.from_start(
        dt.date.fromisoformat(spec.start_date), n, SUNDAY)
    t = np.arange(n, dtype=float)

    if spec.regime_length > 0:
        trend = _regime_trend(n, spec.trend_slope, spec.regime_length)
    else:
        trend = spec.trend_slope * t
    season = spec.seasonal_amplitude * np.sin(2.0 * np.pi * t / spec.seasonal_period)
    noise = _ar1(rng_for(spec.seed, "price-noise"), n, spec.ar1_coeff, spec.noise_std)

    # Latent weather driver: slow AR(1), unit marginal std.  The weather
    # columns expose it, so a multivariate model can anticipate its pull on
    # prices while a price-only model cannot see it directly.  With a lag,
    # today's weather determines a price component ``weather_lag`` days out
    # (weather shocks reach the market through the supply side slowly).
    wrng = rng_for(spec.seed, "weather")
    driver = _ar1(wrng, n, 0.97, 1.0)
    temp = 24.0 + 5.0 * driver + wrng.normal(0.0, 0.5, size=n)
    humidity = np.clip(60.0 - 12.0 * driver + wrng.normal(0.0, 2.0, size=n), 0.0, 100.0)
    rainfall = np.maximum(0.0, 3.0 + 4.0 * driver + wrng.normal(0.0, 1.5, size=n))

    if spec.weather_lag > 0:
        lagged = np.concatenate([np.full(spec.weather_lag, driver[0]),
                                 driver[:-spec.weather_lag]])
    else:
        lagged = driver
    clean = trend + season + spec.weather_coupling * lagged + noise + spec.base_price
    clean = np.maximum(PRICE_FLOOR, clean)

    arng = rng_for(spec.seed, "arrival")
    arrival = np.maximum(0.0, 300.0 + 60.0 * _ar1(arng, n, 0.8, 1.0)
                         + arng.normal(0.0, 10.0, size=n))

    crng = rng_for(spec.seed, "corruption")
    missing_mask = crng.random(n) < spec.missing_rate
    outlier_mask = (~missing_mask) & (crng.random(n) < spec.outlier_rate)
    coin = crng.random(n) < 0.5

    price = clean.copy()
    scale = np.where(coin, spec.outlier_scale, 1.0 / spec.outlier_scale)
    price[outlier_mask] = np.maximum(PRICE_FLOOR, price[outlier_mask] * scale[outlier_mask])
    price[missing_mask] = np.nan
    observed_arrival = arrival.copy()
    observed_arrival[missing_mask] = np.nan  # a missing day has no entry at all

    series = AlignedSeries(
        calendar=calendar, price=price, arrival=observed_arrival,
        temp=temp, humidity=humidity, rainfall=rainfall,
        market_id=spec.market_id, crop_id=spec.crop_id)
    truth = SyntheticTruth(clean_price=clean, missing_mask=missing_mask,
                           outlier_mask=outlier_mask)
    return series, truth


def generate_synthetic(spec: SyntheticSpec) -> AlignedSeries:
    """Generate a seeded synthetic series (see :class:`SyntheticSpec`)."""
    series, _ = generate_synthetic_detailed(spec)
    return series
