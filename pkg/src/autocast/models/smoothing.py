"""Exponential smoothing family: simple, Holt, and additive Holt-Winters.

One HwesState type covers all three: Holt is the state with zero seasonal
components, SES additionally has zero trend. fit_hwes degrades automatically
when the history is too short for the seasonal (or trend) recursion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..series import ForecastResult, SalesSeries
from .base import BaseForecaster, ModelId
from .optim import nelder_mead

PARAM_FLOOR = 0.001
PARAM_CEIL = 0.999


@dataclass(frozen=True)
class HwesState:
    """Smoothed endpoint of the recursion plus the parameters that produced it.

    seasonal is end-aligned: seasonal[h % m] is the component for the h-th
    period after the end of training (h = 1, 2, ...). Components sum to 0.
    """

    alpha: float
    beta: float
    gamma: float
    level: float
    trend: float
    seasonal: tuple
    fallback: bool = False

    @property
    def season_length(self) -> int:
        return len(self.seasonal)


def _clamp(params):
    return np.clip(params, PARAM_FLOOR, PARAM_CEIL)


def _ses_pass(values, alpha):
    level = values[0]
    sse = 0.0
    for y in values[1:]:
        err = y - level
        sse += err * err
        level += alpha * err
    return sse, level


def _holt_pass(values, alpha, beta):
    level = values[0]
    trend = values[1] - values[0]
    sse = 0.0
    for y in values[1:]:
        prev_level = level
        pred = level + trend
        err = y - pred
        sse += err * err
        level = alpha * y + (1.0 - alpha) * pred
        trend = beta * (level - prev_level) + (1.0 - beta) * trend
    return sse, level, trend


def _hwes_init(values, m):
    # Classical decomposition on the first two seasons: season means give
    # level and trend, per-position deviations give the seasonal pattern.
    first = values[:m]
    second = values[m : 2 * m]
    mean1 = first.mean()
    mean2 = second.mean()
    level = float(mean1)
    trend = float((mean2 - mean1) / m)
    seasonal = ((first - mean1) + (second - mean2)) / 2.0
    seasonal = seasonal - seasonal.mean()
    return level, trend, seasonal


def _hwes_pass(values, m, alpha, beta, gamma, init):
    level, trend, seasonal = init
    seasonal = seasonal.copy()
    sse = 0.0
    for t, y in enumerate(values):
        pos = t % m
        s_old = seasonal[pos]
        pred = level + trend + s_old
        err = y - pred
        sse += err * err
        prev_level = level
        prev_trend = trend
        level = alpha * (y - s_old) + (1.0 - alpha) * (level + trend)
        trend = beta * (level - prev_level) + (1.0 - beta) * trend
        seasonal[pos] = gamma * (y - prev_level - prev_trend) + (1.0 - gamma) * s_old
    return sse, level, trend, seasonal


def fit_ses(values, alpha: float | None = None):
    """Optimize alpha on one-step SSE unless a fixed alpha is given."""
    values = np.asarray(values, dtype=float)
    if len(values) == 1:
        return 0.3 if alpha is None else alpha, float(values[0])
    if alpha is None:
        def objective(p):
            return _ses_pass(values, float(_clamp(p)[0]))[0]

        best, _, _ = nelder_mead(objective, np.array([0.3]), maxfev=80)
        alpha = float(_clamp(best)[0])
    _, level = _ses_pass(values, alpha)
    return alpha, float(level)


def fit_hwes(train: SalesSeries) -> HwesState:
    """Additive Holt-Winters with Nelder-Mead over (alpha, beta, gamma).

    Degrades to Holt when fewer than two full seasons are available and to
    simple smoothing below 4 points. Non-finite losses fall back to SES with
    alpha=0.3 and set the fallback flag.
    """
    values = train.values
    m = train.frequency.periods_per_year
    n = len(values)

    if n >= 2 * m:
        init = _hwes_init(values, m)

        def objective(params):
            a, b, g = _clamp(params)
            sse = _hwes_pass(values, m, a, b, g, init)[0]
            return sse if np.isfinite(sse) else np.inf

        best, best_sse, _ = nelder_mead(objective, np.array([0.3, 0.1, 0.1]), maxfev=300)
        if np.isfinite(best_sse):
            a, b, g = (float(v) for v in _clamp(best))
            _, level, trend, seasonal = _hwes_pass(values, m, a, b, g, init)
            seasonal = seasonal - seasonal.mean()
            # rotate so that index h % m serves the h-th step after training
            end_aligned = tuple(seasonal[(n - 1 + k) % m] for k in range(m))
            return HwesState(a, b, g, float(level), float(trend), end_aligned)
    if n >= 4:
        def objective(params):
            a, b = _clamp(params)
            sse = _holt_pass(values, a, b)[0]
            return sse if np.isfinite(sse) else np.inf

        best, best_sse, _ = nelder_mead(objective, np.array([0.3, 0.1]), maxfev=200)
        if np.isfinite(best_sse):
            a, b = (float(v) for v in _clamp(best))
            _, level, trend = _holt_pass(values, a, b)
            return HwesState(a, b, 0.0, float(level), float(trend), (0.0,))

    alpha, level = fit_ses(values)
    if not np.isfinite(level):
        _, level = fit_ses(values, alpha=0.3)
        return HwesState(0.3, 0.0, 0.0, float(level), 0.0, (0.0,), fallback=True)
    return HwesState(alpha, 0.0, 0.0, float(level), 0.0, (0.0,))


def hwes_forecast(state: HwesState, horizon: int) -> np.ndarray:
    """Linear trend continuation plus the repeating seasonal pattern, floored at 0."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    m = state.season_length
    steps = np.arange(1, horizon + 1)
    seasonal = np.array([state.seasonal[h % m] for h in steps])
    return np.maximum(state.level + steps * state.trend + seasonal, 0.0)


class SesForecaster(BaseForecaster):
    """Flat forecast at the optimized smoothed level."""

    model_id = ModelId.SES

    def fit(self, series: SalesSeries) -> "SesForecaster":
        self.train_ = series
        alpha, level = fit_ses(series.values)
        self.state_ = HwesState(alpha, 0.0, 0.0, level, 0.0, (0.0,))
        return self

    def forecast(self, horizon: int) -> ForecastResult:
        self._check_fitted()
        return self._result(hwes_forecast(self.state_, horizon))


class HwesForecaster(BaseForecaster):
    model_id = ModelId.HWES

    def fit(self, series: SalesSeries) -> "HwesForecaster":
        self.train_ = series
        self.state_ = fit_hwes(series)
        return self

    def forecast(self, horizon: int) -> ForecastResult:
        self._check_fitted()
        return self._result(hwes_forecast(self.state_, horizon))
