"""Forecast combination: elementwise median (default) or mean of the members."""
from __future__ import annotations

import numpy as np

from ..series import ForecastResult
from .base import ModelId

DEFAULT_MEMBERS = (ModelId.HWES, ModelId.GAM, ModelId.ARIMA, ModelId.BOOSTED_TREE)


def ensemble_forecast(forecasts, aggregate: str = "median") -> ForecastResult:
    """Combine member forecasts for one product into an EnsembleMedian result.

    With an even member count the median is the mean of the two central
    values. Members must agree on product, start, and horizon.
    """
    if len(forecasts) < 2:
        raise ValueError(f"ensemble needs at least 2 member forecasts, got {len(forecasts)}")
    first = forecasts[0]
    for other in forecasts[1:]:
        if other.product_id != first.product_id:
            raise ValueError(f"mixed products: {other.product_id!r} vs {first.product_id!r}")
        if other.start != first.start or other.horizon != first.horizon:
            raise ValueError("members disagree on forecast start or horizon")
    stacked = np.vstack([f.values for f in forecasts])
    if aggregate == "median":
        values = np.median(stacked, axis=0)
    elif aggregate == "mean":
        values = stacked.mean(axis=0)
    else:
        raise ValueError(f"unknown aggregate {aggregate!r}; use 'median' or 'mean'")
    return ForecastResult(
        product_id=first.product_id,
        model_id=ModelId.ENSEMBLE_MEDIAN.value,
        start=first.start,
        values=np.maximum(values, 0.0),
    )
