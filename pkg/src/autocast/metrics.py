"""Forecast error metrics: RMSE, range-normalized RMSE, and MAPE.

nRMSE divides by the range of the actuals so products at different scales
become comparable; it is undefined (None) when the actuals are constant.
MAPE skips periods whose actual value is zero and reports how many were
skipped; it is undefined when every actual is zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_paired_vectors


@dataclass(frozen=True)
class MetricSet:
    """Error metrics of one model on one product's holdout."""

    rmse: float
    nrmse: float | None
    mape: float | None
    mape_skipped: int = 0


def compute_rmse(actual, predicted) -> float:
    """Root mean squared error, sqrt(mean((actual - predicted)^2))."""
    a, p = check_paired_vectors(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def compute_nrmse(actual, predicted) -> float | None:
    """RMSE divided by the range of the actuals; None for constant actuals."""
    a, p = check_paired_vectors(actual, predicted)
    value_range = float(np.max(a) - np.min(a))
    if value_range == 0.0:
        return None
    return float(np.sqrt(np.mean((a - p) ** 2)) / value_range)


def compute_mape(actual, predicted) -> tuple[float | None, int]:
    """Mean absolute percentage error over nonzero actuals, as a fraction.

    Returns (mape, skipped) where skipped counts zero-actual periods that
    were excluded; mape is None when all actuals are zero.
    """
    a, p = check_paired_vectors(actual, predicted)
    nonzero = a != 0
    skipped = int(np.sum(~nonzero))
    if skipped == a.size:
        return None, skipped
    mape = float(np.mean(np.abs((a[nonzero] - p[nonzero]) / a[nonzero])))
    return mape, skipped


def compute_metric_set(actual, predicted) -> MetricSet:
    """All three metrics for one (actual, predicted) pair."""
    mape, skipped = compute_mape(actual, predicted)
    return MetricSet(
        rmse=compute_rmse(actual, predicted),
        nrmse=compute_nrmse(actual, predicted),
        mape=mape,
        mape_skipped=skipped,
    )
