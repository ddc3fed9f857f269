"""Seasonal-mean baseline: predict the mean of same-calendar-period history."""
from __future__ import annotations

import numpy as np

from ..series import ForecastResult, SalesSeries
from .base import BaseForecaster, ModelId


def naive_forecast(train: SalesSeries, horizon: int) -> ForecastResult:
    """Mean of all training values in the same month(week)-of-year.

    Positions never seen in training fall back to the overall mean.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    m = train.frequency.periods_per_year
    positions = np.array([p.position_in_year for p in train.periods()])
    overall = float(train.values.mean())
    by_position = np.full(m, overall)
    for pos in range(m):
        mask = positions == pos
        if mask.any():
            by_position[pos] = float(train.values[mask].mean())
    start = train.end + 1
    values = np.array(
        [by_position[(start + h).position_in_year] for h in range(horizon)]
    )
    return ForecastResult(train.product_id, ModelId.NAIVE.value, start, np.maximum(values, 0.0))


class NaiveForecaster(BaseForecaster):
    model_id = ModelId.NAIVE

    def fit(self, series: SalesSeries) -> "NaiveForecaster":
        self.train_ = series
        return self

    def forecast(self, horizon: int) -> ForecastResult:
        self._check_fitted()
        return naive_forecast(self.train_, horizon)
