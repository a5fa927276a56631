"""Trading calendar, aligned daily series, alignment, and CSV round-trip.

Marketplaces close one day a week (Sunday by default), so the calendar is
"every weekday except the closed one".  Public holidays are not modeled: a
holiday simply shows up as a missing value on an open day.  Dates are
ISO-8601 strings in files and plain day indices in memory, which keeps all
window arithmetic integer-based.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import AlignmentError, ParseError, ValidationError

SUNDAY = 6  # datetime.date.weekday(): Monday == 0 ... Sunday == 6

# Columns carried by every aligned series, in storage order.
VALUE_COLUMNS = ("price", "arrival", "temp", "humidity", "rainfall")

ALIGNED_CSV_HEADER = (
    "date,market_id,crop_id,modal_price,arrival_qty,"
    "avg_temp_c,avg_humidity_pct,total_rainfall_mm"
)


@dataclass(frozen=True)
class TradingCalendar:
    """Strictly increasing trading days in [start, end], skipping one weekday."""

    start: dt.date
    end: dt.date
    closed_weekday: int = SUNDAY
    dates: tuple = field(init=False, repr=False, compare=False)
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.start, dt.date) or not isinstance(self.end, dt.date):
            raise ValidationError("calendar bounds must be datetime.date values")
        if self.end < self.start:
            raise ValidationError(f"calendar end {self.end} precedes start {self.start}")
        if not 0 <= int(self.closed_weekday) <= 6:
            raise ValidationError("closed_weekday must be in 0..6 (Monday=0)")
        day = self.start
        one = dt.timedelta(days=1)
        days = []
        while day <= self.end:
            if day.weekday() != self.closed_weekday:
                days.append(day)
            day += one
        if not days:
            raise ValidationError("calendar contains no trading days")
        object.__setattr__(self, "dates", tuple(days))
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(days)})

    @classmethod
    def from_start(cls, start: dt.date, n_days: int, closed_weekday: int = SUNDAY):
        """Calendar holding exactly ``n_days`` trading days from ``start``."""
        if n_days < 1:
            raise ValidationError("n_days must be >= 1")
        day = start
        one = dt.timedelta(days=1)
        count = 0
        last = start
        while count < n_days:
            if day.weekday() != closed_weekday:
                count += 1
                last = day
            day += one
        return cls(start=start, end=last, closed_weekday=closed_weekday)

    def __len__(self) -> int:
        return len(self.dates)

    def date_of(self, i: int) -> dt.date:
        return self.dates[i]

    def index_of(self, day: dt.date) -> int:
        try:
            return self._index[day]
        except KeyError:
            raise KeyError(f"{day.isoformat()} is not a trading day of this calendar")

    def __contains__(self, day: dt.date) -> bool:
        return day in self._index

    def head(self, n: int) -> "TradingCalendar":
        """Calendar truncated to its first ``n`` trading days."""
        if not 1 <= n <= len(self):
            raise ValidationError(f"head({n}) outside 1..{len(self)}")
        return TradingCalendar(self.start, self.dates[n - 1], self.closed_weekday)

    def day_month_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(day-of-month, month) integer arrays, one entry per trading day."""
        day = np.array([d.day for d in self.dates], dtype=float)
        month = np.array([d.month for d in self.dates], dtype=float)
        return day, month


def calendar_intersection(a: TradingCalendar, b: TradingCalendar) -> TradingCalendar:
    """Overlapping trading span of two calendars with the same closed weekday."""
    if a.closed_weekday != b.closed_weekday:
        raise AlignmentError("calendars disagree on the closed weekday")
    start = max(a.start, b.start)
    end = min(a.end, b.end)
    if end < start:
        raise AlignmentError("calendars do not overlap")
    return TradingCalendar(start, end, a.closed_weekday)


def _freeze(name: str, obj, values, n: int) -> None:
    arr = np.array(values, dtype=float, copy=True)
    if arr.shape != (n,):
        raise ValidationError(f"{name} must have shape ({n},), got {arr.shape}")
    arr.setflags(write=False)
    object.__setattr__(obj, name, arr)


@dataclass(frozen=True)
class MarketRecord:
    """One marketplace entry: modal price (per quintal) and arrival quantity."""

    date: dt.date
    market_id: str
    crop_id: str
    modal_price: float | None = None
    arrival_qty: float | None = None

    def __post_init__(self):
        if self.modal_price is not None and not self.modal_price > 0:
            raise ValidationError(f"modal_price must be positive, got {self.modal_price}")
        if self.arrival_qty is not None and self.arrival_qty < 0:
            raise ValidationError(f"arrival_qty must be non-negative, got {self.arrival_qty}")


@dataclass(frozen=True)
class WeatherRecord:
    """Daily weather at a marketplace location."""

    date: dt.date
    market_id: str
    avg_temp: float
    avg_humidity: float
    total_rainfall: float

    def __post_init__(self):
        if not 0.0 <= self.avg_humidity <= 100.0:
            raise ValidationError(f"avg_humidity must be in [0, 100], got {self.avg_humidity}")
        if self.total_rainfall < 0.0:
            raise ValidationError(f"total_rainfall must be >= 0, got {self.total_rainfall}")


@dataclass(frozen=True)
class WeatherSeries:
    """Per-market daily weather columns on a trading calendar; NaN = absent."""

    calendar: TradingCalendar
    temp: np.ndarray
    humidity: np.ndarray
    rainfall: np.ndarray
    market_id: str = ""

    def __post_init__(self):
        n = len(self.calendar)
        for name in ("temp", "humidity", "rainfall"):
            _freeze(name, self, getattr(self, name), n)
        bad = ~np.isnan(self.humidity) & ((self.humidity < 0) | (self.humidity > 100))
        if bad.any():
            raise ValidationError("humidity outside [0, 100]")
        if (~np.isnan(self.rainfall) & (self.rainfall < 0)).any():
            raise ValidationError("rainfall must be non-negative")

    def __len__(self) -> int:
        return len(self.calendar)


@dataclass(frozen=True)
class AlignedSeries:
    """One row per trading day: (price, arrival, temp, humidity, rainfall).

    NaN marks an absent field.  Instances are immutable; arrays are
    read-only and safe to share across evaluation workers.
    """

    calendar: TradingCalendar
    price: np.ndarray
    arrival: np.ndarray
    temp: np.ndarray
    humidity: np.ndarray
    rainfall: np.ndarray
    market_id: str = ""
    crop_id: str = ""

    def __post_init__(self):
        n = len(self.calendar)
        for name in VALUE_COLUMNS:
            _freeze(name, self, getattr(self, name), n)
        if (~np.isnan(self.price) & (self.price <= 0)).any():
            raise ValidationError("price must be positive where present")
        if (~np.isnan(self.arrival) & (self.arrival < 0)).any():
            raise ValidationError("arrival must be non-negative where present")
        bad = ~np.isnan(self.humidity) & ((self.humidity < 0) | (self.humidity > 100))
        if bad.any():
            raise ValidationError("humidity outside [0, 100]")
        if (~np.isnan(self.rainfall) & (self.rainfall < 0)).any():
            raise ValidationError("rainfall must be non-negative where present")

    def __len__(self) -> int:
        return len(self.calendar)

    @classmethod
    def empty(cls, calendar: TradingCalendar, market_id: str = "", crop_id: str = ""):
        nan = np.full(len(calendar), np.nan)
        return cls(calendar, nan, nan, nan, nan, nan, market_id=market_id, crop_id=crop_id)

    def head(self, n: int) -> "AlignedSeries":
        """Series restricted to its first ``n`` trading days."""
        cal = self.calendar.head(n)
        cols = {name: getattr(self, name)[:n] for name in VALUE_COLUMNS}
        return AlignedSeries(calendar=cal, market_id=self.market_id,
                             crop_id=self.crop_id, **cols)

    def with_columns(self, **cols) -> "AlignedSeries":
        return replace(self, **cols)


def align(market: AlignedSeries, weather: WeatherSeries) -> AlignedSeries:
    """Row-wise join of a market series with its weather on shared trading days.

    Non-overlapping days are trimmed; the result calendar is the
    intersection of the two inputs.
    """
    if market.market_id and weather.market_id and market.market_id != weather.market_id:
        raise AlignmentError(
            f"market ids differ: {market.market_id!r} vs {weather.market_id!r}")
    cal = calendar_intersection(market.calendar, weather.calendar)
    m0 = market.calendar.index_of(cal.dates[0])
    w0 = weather.calendar.index_of(cal.dates[0])
    n = len(cal)
    return AlignedSeries(
        calendar=cal,
        price=market.price[m0:m0 + n],
        arrival=market.arrival[m0:m0 + n],
        temp=weather.temp[w0:w0 + n],
        humidity=weather.humidity[w0:w0 + n],
        rainfall=weather.rainfall[w0:w0 + n],
        market_id=market.market_id or weather.market_id,
        crop_id=market.crop_id,
    )


def _fmt(x: float) -> str:
    # repr round-trips float64 exactly, which the CSV round-trip relies on
    return "" if np.isnan(x) else repr(float(x))


def write_aligned_csv(series: AlignedSeries, path) -> None:
    """Write a series with one row per trading day; empty field = absent."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALIGNED_CSV_HEADER.split(","))
        for i, day in enumerate(series.calendar.dates):
            writer.writerow([
                day.isoformat(), series.market_id, series.crop_id,
                _fmt(series.price[i]), _fmt(series.arrival[i]),
                _fmt(series.temp[i]), _fmt(series.humidity[i]),
                _fmt(series.rainfall[i]),
            ])


def read_aligned_csv(path, calendar: TradingCalendar | None = None) -> AlignedSeries:
    """Reload a file produced by :func:`write_aligned_csv`.

    When no calendar is given it is inferred from the file: bounds from the
    first/last row and the closed weekday as the one weekday never present
    (falling back to Sunday for files too short to decide).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ALIGNED_CSV_HEADER.split(","):
            raise ParseError(f"{path.name}: unexpected header {header}")
        rows = list(reader)
    if not rows:
        raise ParseError(f"{path.name}: no data rows")
    dates = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 8:
            raise ParseError(f"line {lineno}: expected 8 fields, got {len(row)}")
        try:
            dates.append(dt.date.fromisoformat(row[0]))
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad date {row[0]!r}") from exc
    if calendar is None:
        seen = {d.weekday() for d in dates}
        missing = sorted(set(range(7)) - seen)
        if len(missing) == 1:
            closed = missing[0]
        elif SUNDAY in missing:
            closed = SUNDAY
        else:
            raise ParseError(f"{path.name}: cannot infer the closed weekday")
        calendar = TradingCalendar(dates[0], dates[-1], closed)
    if list(calendar.dates) != dates:
        raise ParseError(f"{path.name}: rows do not cover the trading calendar exactly")
    n = len(calendar)
    cols = {name: np.full(n, np.nan) for name in VALUE_COLUMNS}
    market_id = rows[0][1]
    crop_id = rows[0][2]
    for lineno, row in enumerate(rows, start=2):
        i = lineno - 2
        for name, cell in zip(VALUE_COLUMNS, row[3:8]):
            if cell != "":
                try:
                    cols[name][i] = float(cell)
                except ValueError as exc:
                    raise ParseError(f"line {lineno}: non-numeric {name} {cell!r}") from exc
    return AlignedSeries(calendar=calendar, market_id=market_id, crop_id=crop_id, **cols)
