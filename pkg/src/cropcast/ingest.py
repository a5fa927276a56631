"""CSV ingestion for marketplace and weather exports.

Market schema:  ``date,market_id,crop_id,modal_price,arrival_qty``
Weather schema: ``date,market_id,avg_temp_c,avg_humidity_pct,total_rainfall_mm``

UTF-8, comma separated, ``.`` decimal point, empty field = absent.  Rows
dated outside the supplied calendar (including its closed weekday) are
ignored; trading days with no row become absent fields and are flagged as
missing downstream.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from .data import AlignedSeries, TradingCalendar, WeatherSeries
from .errors import DuplicateKeyError, ParseError, ValidationError

MARKET_HEADER = ["date", "market_id", "crop_id", "modal_price", "arrival_qty"]
WEATHER_HEADER = ["date", "market_id", "avg_temp_c", "avg_humidity_pct", "total_rainfall_mm"]


def _read_rows(path, expected_header):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise ParseError(
                f"{path.name}: header {header} does not match {expected_header}")
        return list(reader)


def _parse_date(cell, lineno):
    try:
        return dt.date.fromisoformat(cell.strip())
    except ValueError as exc:
        raise ParseError(f"line {lineno}: bad date {cell!r}") from exc


def _parse_float(cell, name, lineno):
    cell = cell.strip()
    if cell == "":
        return None
    try:
        return float(cell)
    except ValueError as exc:
        raise ParseError(f"line {lineno}: non-numeric {name} {cell!r}") from exc


def load_market_csv(path, calendar: TradingCalendar) -> dict:
    """Load marketplace rows into one AlignedSeries per (market_id, crop_id).

    Weather columns of the returned series are absent until :func:`align`.
    Raises ParseError naming the line for malformed rows and
    DuplicateKeyError for repeated (date, market, crop) keys.
    """
    rows = _read_rows(path, MARKET_HEADER)
    n = len(calendar)
    series_cols: dict[tuple, dict] = {}
    seen: set[tuple] = set()
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 5:
            raise ParseError(f"line {lineno}: expected 5 fields, got {len(row)}")
        day = _parse_date(row[0], lineno)
        market_id, crop_id = row[1].strip(), row[2].strip()
        price = _parse_float(row[3], "modal_price", lineno)
        arrival = _parse_float(row[4], "arrival_qty", lineno)
        if price is not None and not price > 0:
            raise ParseError(f"line {lineno}: modal_price must be positive, got {price}")
        if arrival is not None and arrival < 0:
            raise ParseError(f"line {lineno}: arrival_qty must be non-negative, got {arrival}")
        key = (day, market_id, crop_id)
        if key in seen:
            raise DuplicateKeyError(
                f"line {lineno}: duplicate entry for {day.isoformat()}/{market_id}/{crop_id}")
        seen.add(key)
        if day not in calendar:
            continue
        cols = series_cols.setdefault((market_id, crop_id), {
            "price": np.full(n, np.nan), "arrival": np.full(n, np.nan)})
        i = calendar.index_of(day)
        if price is not None:
            cols["price"][i] = price
        if arrival is not None:
            cols["arrival"][i] = arrival
    out = {}
    nan = np.full(n, np.nan)
    for (market_id, crop_id), cols in series_cols.items():
        out[(market_id, crop_id)] = AlignedSeries(
            calendar=calendar, price=cols["price"], arrival=cols["arrival"],
            temp=nan, humidity=nan, rainfall=nan,
            market_id=market_id, crop_id=crop_id)
    return out


def load_weather_csv(path, calendar: TradingCalendar) -> dict:
    """Load daily weather into one WeatherSeries per market_id.

    Humidity outside [0, 100] or negative rainfall raises ValidationError
    naming the line.  Trading days with no row stay absent.
    """
    rows = _read_rows(path, WEATHER_HEADER)
    n = len(calendar)
    series_cols: dict[str, dict] = {}
    seen: set[tuple] = set()
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 5:
            raise ParseError(f"line {lineno}: expected 5 fields, got {len(row)}")
        day = _parse_date(row[0], lineno)
        market_id = row[1].strip()
        temp = _parse_float(row[2], "avg_temp_c", lineno)
        humidity = _parse_float(row[3], "avg_humidity_pct", lineno)
        rainfall = _parse_float(row[4], "total_rainfall_mm", lineno)
        if humidity is not None and not 0.0 <= humidity <= 100.0:
            raise ValidationError(
                f"line {lineno}: avg_humidity_pct must be in [0, 100], got {humidity}")
        if rainfall is not None and rainfall < 0:
            raise ValidationError(
                f"line {lineno}: total_rainfall_mm must be non-negative, got {rainfall}")
        key = (day, market_id)
        if key in seen:
            raise DuplicateKeyError(
                f"line {lineno}: duplicate weather for {day.isoformat()}/{market_id}")
        seen.add(key)
        if day not in calendar:
            continue
        cols = series_cols.setdefault(market_id, {
            "temp": np.full(n, np.nan), "humidity": np.full(n, np.nan),
            "rainfall": np.full(n, np.nan)})
        i = calendar.index_of(day)
        for name, value in (("temp", temp), ("humidity", humidity), ("rainfall", rainfall)):
            if value is not None:
                cols[name][i] = value
    return {
        market_id: WeatherSeries(calendar=calendar, market_id=market_id, **cols)
        for market_id, cols in series_cols.items()
    }
