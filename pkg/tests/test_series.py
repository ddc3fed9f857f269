import datetime as dt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from autocast.series import ForecastResult, Frequency, Period, SalesSeries, split_holdout


def monthly(values, start="2020-01", product="P1"):
    return SalesSeries(product, Frequency.MONTHLY, Period.parse(Frequency.MONTHLY, start), np.asarray(values, dtype=float))


class TestPeriod:
    def test_monthly_parse_label_roundtrip(self):
        p = Period.parse(Frequency.MONTHLY, "2023-04")
        assert p.label() == "2023-04"
        assert p.start_date == dt.date(2023, 4, 1)

    def test_weekly_parse_label_roundtrip(self):
        p = Period.parse(Frequency.WEEKLY, "2023-W02")
        assert p.label() == "2023-W02"
        assert p.start_date.weekday() == 0

    def test_monthly_from_date(self):
        assert Period.from_date(Frequency.MONTHLY, dt.date(2023, 4, 17)) == Period.parse(Frequency.MONTHLY, "2023-04")

    def test_weekly_from_date_snaps_to_monday(self):
        a = Period.from_date(Frequency.WEEKLY, dt.date(2023, 1, 9))
        b = Period.from_date(Frequency.WEEKLY, dt.date(2023, 1, 12))
        assert a == b
        assert a.label() == "2023-W02"

    def test_add_and_distance(self):
        p = Period.parse(Frequency.MONTHLY, "2022-11")
        q = p + 3
        assert q.label() == "2023-02"
        assert q - p == 3

    def test_position_in_year(self):
        jan = Period.parse(Frequency.MONTHLY, "2021-01")
        assert jan.position_in_year == 0
        assert (jan + 13).position_in_year == 1

    def test_cross_frequency_comparison_rejected(self):
        p = Period.parse(Frequency.MONTHLY, "2021-01")
        w = Period.parse(Frequency.WEEKLY, "2021-W01")
        with pytest.raises(ValueError):
            _ = p - w

    def test_before_epoch_rejected(self):
        with pytest.raises(ValueError):
            Period.from_date(Frequency.MONTHLY, dt.date(1999, 12, 1))

    @given(st.integers(min_value=0, max_value=3000))
    def test_monthly_label_roundtrip_property(self, index):
        p = Period(Frequency.MONTHLY, index)
        assert Period.parse(Frequency.MONTHLY, p.label()) == p

    @given(st.integers(min_value=0, max_value=3000))
    def test_weekly_label_roundtrip_property(self, index):
        p = Period(Frequency.WEEKLY, index)
        assert Period.parse(Frequency.WEEKLY, p.label()) == p
        assert Period.from_date(Frequency.WEEKLY, p.start_date) == p


class TestSalesSeries:
    def test_basic_fields(self):
        s = monthly([1, 2, 3])
        assert len(s) == 3
        assert s.end.label() == "2020-03"
        assert [p.label() for p in s.periods()] == ["2020-01", "2020-02", "2020-03"]

    def test_values_read_only(self):
        s = monthly([1, 2, 3])
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            monthly([1, -2, 3])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            monthly([1, np.nan, 3])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            monthly([])

    def test_prefix(self):
        s = monthly([1, 2, 3, 4])
        p = s.prefix(2)
        assert list(p.values) == [1, 2]
        assert p.start == s.start


class TestSplitHoldout:
    def test_36_12(self):
        s = monthly(np.arange(36))
        train, test = split_holdout(s, 12)
        assert len(train) == 24 and len(test) == 12
        assert test.start.label() == "2022-01"

    def test_degenerate_but_legal(self):
        s = monthly(np.arange(13))
        train, test = split_holdout(s, 12)
        assert len(train) == 1 and len(test) == 12

    def test_holdout_equal_length_rejected(self):
        s = monthly(np.arange(12))
        with pytest.raises(ValueError):
            split_holdout(s, 12)

    def test_holdout_below_one_rejected(self):
        s = monthly(np.arange(12))
        with pytest.raises(ValueError):
            split_holdout(s, 0)

    @given(st.integers(min_value=2, max_value=60), st.data())
    def test_concat_is_identity(self, n, data):
        holdout = data.draw(st.integers(min_value=1, max_value=n - 1))
        values = np.arange(n, dtype=float)
        s = monthly(values)
        train, test = split_holdout(s, holdout)
        recombined = np.concatenate([train.values, test.values])
        assert np.array_equal(recombined, s.values)
        assert test.start == train.end + 1


class TestForecastResult:
    def test_horizon_and_periods(self):
        r = ForecastResult("P1", "naive", Period.parse(Frequency.MONTHLY, "2024-01"), np.ones(3))
        assert r.horizon == 3
        assert [p.label() for p in r.periods()] == ["2024-01", "2024-02", "2024-03"]

    def test_rejects_negative_forecast(self):
        with pytest.raises(ValueError):
            ForecastResult("P1", "naive", Period.parse(Frequency.MONTHLY, "2024-01"), np.array([1.0, -0.5]))
