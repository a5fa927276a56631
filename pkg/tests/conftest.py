import datetime as dt

import numpy as np
import pytest

from cropcast.data import AlignedSeries, TradingCalendar


@pytest.fixture
def calendar_100():
    return TradingCalendar.from_start(dt.date(2019, 1, 1), 100)


def series_from_prices(prices, start=dt.date(2019, 1, 1), market_id="M1", crop_id="TOM"):
    """AlignedSeries with the given prices and bland fully-observed weather."""
    prices = np.asarray(prices, dtype=float)
    n = prices.size
    cal = TradingCalendar.from_start(start, n)
    return AlignedSeries(
        calendar=cal,
        price=prices,
        arrival=np.full(n, 300.0),
        temp=np.full(n, 25.0),
        humidity=np.full(n, 60.0),
        rainfall=np.full(n, 2.0),
        market_id=market_id, crop_id=crop_id)
