"""Differenced autoregressive baseline fitted by ordinary least squares.

The series is differenced once when the unit-root test cannot reject
non-stationarity; the AR order is chosen from 1..7 by minimum AIC on a
common sample, and multi-step forecasts are produced recursively
(integrating back when differenced).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientDataError, NumericalError, ValidationError
from ..stats import adf_test

MIN_FIT_LENGTH = 50
MAX_ORDER = 7


@dataclass(frozen=True)
class ArBaseline:
    d: int
    p: int
    intercept: float
    coeffs: np.ndarray      # phi_1..phi_p, phi_j multiplying lag j
    tail: np.ndarray        # training tail (raw prices) long enough to forecast
    trained_through: int = -1

    def __post_init__(self):
        for name in ("coeffs", "tail"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.isfinite(self.coeffs).all() or not np.isfinite(self.intercept):
            raise ValidationError("AR parameters must be finite")
        if self.d not in (0, 1):
            raise ValidationError("differencing order must be 0 or 1")


def _ar_design(w: np.ndarray, p: int, start: int):
    rows = np.arange(start, w.size)
    cols = [np.ones(rows.size)]
    for j in range(1, p + 1):
        cols.append(w[rows - j])
    return np.column_stack(cols), w[rows]


def _fit_order(w: np.ndarray, p: int, start: int):
    x, y = _ar_design(w, p, start)
    coeffs, _, _, _ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coeffs
    rss = float(resid @ resid)
    return coeffs, rss, y.size


def ar_fit(values, max_order: int = MAX_ORDER) -> ArBaseline:
    """Fit the baseline on a fully observed price history."""
    values = np.asarray(values, dtype=float)
    if values.size < MIN_FIT_LENGTH:
        raise InsufficientDataError(
            f"baseline fit needs >= {MIN_FIT_LENGTH} points, got {values.size}")
    if np.isnan(values).any():
        raise ValidationError("values contain NaN; impute before fitting")

    if np.std(values) == 0.0:
        # a flat history forecasts itself
        return ArBaseline(d=0, p=0, intercept=float(values[-1]),
                          coeffs=np.empty(0), tail=values[-1:])
    try:
        d = 0 if adf_test(values).reject_unit_root else 1
    except NumericalError:
        d = 1
    w = np.diff(values) if d else values

    if np.std(w) == 0.0:
        return ArBaseline(d=d, p=0, intercept=float(w[-1]),
                          coeffs=np.empty(0), tail=values[-2:])

    best = None
    for p in range(1, max_order + 1):
        coeffs, rss, n_eff = _fit_order(w, p, start=max_order)
        aic = n_eff * np.log(max(rss, 1e-300) / n_eff) + 2.0 * (p + 1)
        if best is None or aic < best[0]:
            best = (aic, p)
    p = best[1]
    coeffs, _, _ = _fit_order(w, p, start=p)
    return ArBaseline(d=d, p=p, intercept=float(coeffs[0]), coeffs=coeffs[1:],
                      tail=values[-(p + d + 1):])


def ar_predict(model: ArBaseline, recent_values=None, horizon: int = 30) -> np.ndarray:
    """Recursive multi-step forecast from the most recent prices.

    ``recent_values`` defaults to the training tail stored on the model.
    """
    recent = model.tail if recent_values is None else np.asarray(recent_values, dtype=float)
    needed = model.p + model.d
    if recent.size < max(needed, 1):
        raise InsufficientDataError(
            f"forecast needs >= {max(needed, 1)} recent values, got {recent.size}")
    w_hist = list(np.diff(recent) if model.d else recent)
    steps = []
    for _ in range(horizon):
        nxt = model.intercept
        for j in range(1, model.p + 1):
            nxt += model.coeffs[j - 1] * w_hist[-j]
        w_hist.append(nxt)
        steps.append(nxt)
    steps = np.asarray(steps)
    if model.d:
        return recent[-1] + np.cumsum(steps)
    return steps
