"""Shared forecaster contract and the model identity/priority machinery."""
from __future__ import annotations

from enum import Enum

import numpy as np

from ..series import ForecastResult, SalesSeries


class ModelId(str, Enum):
    NAIVE = "naive"
    SES = "ses"
    HWES = "hwes"
    ARIMA = "arima"
    SARIMA = "sarima"
    GAM = "gam"
    BOOSTED_TREE = "boosted_tree"
    CNN = "cnn"
    ENSEMBLE_MEDIAN = "ensemble_median"


# Tie-break order for equal validation RMSE, best first. Cheaper and more
# interpretable models win ties.
MODEL_PRIORITY = (
    ModelId.HWES,
    ModelId.SES,
    ModelId.GAM,
    ModelId.SARIMA,
    ModelId.ARIMA,
    ModelId.BOOSTED_TREE,
    ModelId.CNN,
    ModelId.ENSEMBLE_MEDIAN,
    ModelId.NAIVE,
)

_PRIORITY_RANK = {model_id: rank for rank, model_id in enumerate(MODEL_PRIORITY)}


def priority_rank(model_id: ModelId) -> int:
    """Smaller rank wins ties."""
    return _PRIORITY_RANK[ModelId(model_id)]


class NotFittedError(RuntimeError):
    pass


class BaseForecaster:
    """fit/forecast contract shared by every model in the zoo.

    Subclasses declare constructor parameters in `_param_names` and get
    get_params/set_params for free. fit() returns self. Fitted state lives
    in attributes with a trailing underscore.
    """

    model_id: ModelId
    _param_names: tuple = ()

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names}

    def set_params(self, **params) -> "BaseForecaster":
        for name, value in params.items():
            if name not in self._param_names:
                raise ValueError(
                    f"unknown parameter {name!r} for {type(self).__name__}; "
                    f"valid: {sorted(self._param_names)}"
                )
            setattr(self, name, value)
        return self

    def fit(self, series: SalesSeries) -> "BaseForecaster":
        raise NotImplementedError

    def forecast(self, horizon: int) -> ForecastResult:
        raise NotImplementedError

    def _check_fitted(self):
        if getattr(self, "train_", None) is None:
            raise NotFittedError(f"{type(self).__name__} is not fitted; call fit() first")

    def _result(self, values) -> ForecastResult:
        self._check_fitted()
        values = np.maximum(np.asarray(values, dtype=float), 0.0)
        return ForecastResult(
            product_id=self.train_.product_id,
            model_id=self.model_id.value,
            start=self.train_.end + 1,
            values=values,
        )


def iterate_one_step(predict_one, history: np.ndarray, horizon: int) -> np.ndarray:
    """Roll a one-step predictor forward, feeding predictions back as input.

    Each prediction is floored at 0 before it is appended, so the floor is
    part of the feedback loop, not a cosmetic pass at the end.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    working = np.asarray(history, dtype=float).copy()
    out = np.empty(horizon)
    for h in range(horizon):
        value = max(0.0, float(predict_one(working)))
        out[h] = value
        working = np.append(working, value)
    return out
