import datetime as dt

import numpy as np
import pytest

from cropcast.data import (SUNDAY, AlignedSeries, MarketRecord, TradingCalendar,
                           WeatherRecord, WeatherSeries, align,
                           calendar_intersection, read_aligned_csv,
                           write_aligned_csv)
from cropcast.errors import AlignmentError, ValidationError
from cropcast.synthetic import SyntheticSpec, generate_synthetic

from conftest import series_from_prices


class TestTradingCalendar:
    def test_skips_closed_weekday(self):
        cal = TradingCalendar(dt.date(2019, 1, 1), dt.date(2019, 3, 31))
        assert all(d.weekday() != SUNDAY for d in cal.dates)

    def test_strictly_increasing(self):
        cal = TradingCalendar.from_start(dt.date(2019, 1, 1), 50)
        assert all(a < b for a, b in zip(cal.dates, cal.dates[1:]))

    def test_from_start_exact_length(self):
        for n in (1, 6, 7, 100):
            assert len(TradingCalendar.from_start(dt.date(2019, 1, 1), n)) == n

    def test_head(self):
        cal = TradingCalendar.from_start(dt.date(2019, 1, 1), 30)
        assert len(cal.head(10)) == 10
        assert cal.head(10).dates == cal.dates[:10]

    def test_index_round_trip(self):
        cal = TradingCalendar.from_start(dt.date(2019, 1, 1), 40)
        for i in (0, 17, 39):
            assert cal.index_of(cal.date_of(i)) == i

    def test_custom_closed_weekday(self):
        cal = TradingCalendar(dt.date(2019, 1, 1), dt.date(2019, 2, 1),
                              closed_weekday=2)
        assert all(d.weekday() != 2 for d in cal.dates)

    def test_reversed_bounds_rejected(self):
        with pytest.raises(ValidationError):
            TradingCalendar(dt.date(2019, 2, 1), dt.date(2019, 1, 1))


class TestRecords:
    def test_market_record_positive_price(self):
        with pytest.raises(ValidationError):
            MarketRecord(dt.date(2019, 1, 1), "M1", "TOM", modal_price=0.0)

    def test_market_record_absent_fields_ok(self):
        rec = MarketRecord(dt.date(2019, 1, 1), "M1", "TOM")
        assert rec.modal_price is None and rec.arrival_qty is None

    def test_weather_record_humidity_bounds(self):
        with pytest.raises(ValidationError):
            WeatherRecord(dt.date(2019, 1, 1), "M1", 25.0, 101.0, 0.0)
        with pytest.raises(ValidationError):
            WeatherRecord(dt.date(2019, 1, 1), "M1", 25.0, 50.0, -1.0)


class TestAlignedSeries:
    def test_arrays_read_only(self):
        s = series_from_prices([10.0, 11.0, 12.0, 13.0, 14.0])
        with pytest.raises(ValueError):
            s.price[0] = 5.0

    def test_price_positive_enforced(self):
        with pytest.raises(ValidationError):
            series_from_prices([10.0, -1.0, 12.0, 13.0])

    def test_no_closed_weekday_rows(self):
        s = generate_synthetic(SyntheticSpec(n_days=200, seed=4))
        assert all(d.weekday() != SUNDAY for d in s.calendar.dates)


def _weather_for(cal, market_id="M1"):
    n = len(cal)
    return WeatherSeries(calendar=cal, temp=np.full(n, 25.0),
                         humidity=np.full(n, 60.0), rainfall=np.full(n, 2.0),
                         market_id=market_id)


class TestAlign:
    def test_identity_join_preserves_length(self):
        s = series_from_prices(np.linspace(10, 20, 30))
        out = align(s, _weather_for(s.calendar))
        assert len(out) == 30
        assert np.array_equal(out.price, s.price)

    def test_interval_intersection_length(self):
        base = TradingCalendar.from_start(dt.date(2019, 1, 1), 150)
        market_cal = TradingCalendar(base.date_of(0), base.date_of(99))
        weather_cal = TradingCalendar(base.date_of(50), base.date_of(149))
        s = series_from_prices(np.linspace(10, 20, 100))
        s = AlignedSeries(calendar=market_cal, price=s.price, arrival=s.arrival,
                          temp=s.temp, humidity=s.humidity, rainfall=s.rainfall,
                          market_id="M1", crop_id="TOM")
        out = align(s, _weather_for(weather_cal))
        assert len(out) == 50

    def test_disjoint_ranges_rejected(self):
        a = TradingCalendar.from_start(dt.date(2019, 1, 1), 20)
        b = TradingCalendar.from_start(dt.date(2020, 1, 1), 20)
        s = series_from_prices(np.linspace(10, 20, 20))
        s = AlignedSeries(calendar=a, price=s.price, arrival=s.arrival, temp=s.temp,
                          humidity=s.humidity, rainfall=s.rainfall, market_id="M1")
        with pytest.raises(AlignmentError):
            align(s, _weather_for(b))

    def test_market_id_mismatch_rejected(self):
        s = series_from_prices(np.linspace(10, 20, 20))
        with pytest.raises(AlignmentError):
            align(s, _weather_for(s.calendar, market_id="OTHER"))

    def test_length_commutes_across_calendars(self):
        base = TradingCalendar.from_start(dt.date(2019, 1, 1), 120)
        cal_a = TradingCalendar(base.date_of(0), base.date_of(79))
        cal_b = TradingCalendar(base.date_of(40), base.date_of(119))

        def series_on(cal):
            n = len(cal)
            return AlignedSeries(calendar=cal, price=np.full(n, 10.0),
                                 arrival=np.zeros(n), temp=np.full(n, np.nan),
                                 humidity=np.full(n, np.nan),
                                 rainfall=np.full(n, np.nan), market_id="M1")

        ab = align(series_on(cal_a), _weather_for(cal_b))
        ba = align(series_on(cal_b), _weather_for(cal_a))
        assert len(ab) == len(ba) == len(calendar_intersection(cal_a, cal_b))


class TestCsvRoundTrip:
    def test_round_trip_identical(self, tmp_path):
        spec = SyntheticSpec(n_days=60, noise_std=25.0, ar1_coeff=0.3,
                             missing_rate=0.1, outlier_rate=0.05, seed=11)
        s = generate_synthetic(spec)
        path = tmp_path / "series.csv"
        write_aligned_csv(s, path)
        back = read_aligned_csv(path)
        assert back.calendar == s.calendar
        assert back.market_id == s.market_id and back.crop_id == s.crop_id
        for name in ("price", "arrival", "temp", "humidity", "rainfall"):
            assert np.array_equal(getattr(back, name), getattr(s, name),
                                  equal_nan=True)

    def test_round_trip_with_explicit_calendar(self, tmp_path):
        s = series_from_prices(np.linspace(5, 9, 25))
        path = tmp_path / "series.csv"
        write_aligned_csv(s, path)
        back = read_aligned_csv(path, calendar=s.calendar)
        assert np.array_equal(back.price, s.price)
