"""ARIMA and seasonal ARIMA by conditional-sum-of-squares grid search.

Every candidate order in the grid is fit by Nelder-Mead on the CSS of the
differenced, mean-centered series (zero-initialized coefficients) and scored
by AICc. The non-seasonal and seasonal model variants share one grid pass:
the non-seasonal winner is the argmin over the P=D=Q=0 slice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ..series import ForecastResult, SalesSeries
from .base import BaseForecaster, ModelId
from .optim import nelder_mead

MAX_P = 3
MAX_D = 2
MAX_Q = 3
MAX_SEASONAL = 1

# Skimpy budget for ranking candidates; the winner is refit generously.
GRID_MAXFEV_BASE = 30
GRID_MAXFEV_PER_DIM = 20
REFIT_MAXFEV_PER_DIM = 200


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int
    P: int = 0
    D: int = 0
    Q: int = 0
    m: int = 1

    def __post_init__(self):
        if not (0 <= self.p <= MAX_P and 0 <= self.q <= MAX_Q and 0 <= self.d <= MAX_D):
            raise ValueError(f"non-seasonal order out of range: {self}")
        if not (0 <= self.P <= MAX_SEASONAL and 0 <= self.Q <= MAX_SEASONAL and 0 <= self.D <= MAX_SEASONAL):
            raise ValueError(f"seasonal order out of range: {self}")
        if self.is_seasonal and self.m < 2:
            raise ValueError(f"seasonal order needs period m >= 2: {self}")

    @property
    def is_seasonal(self) -> bool:
        return (self.P + self.D + self.Q) > 0

    @property
    def n_params(self) -> int:
        return self.p + self.q + self.P + self.Q

    def label(self) -> str:
        base = f"({self.p},{self.d},{self.q})"
        if self.is_seasonal:
            return f"{base}({self.P},{self.D},{self.Q})[{self.m}]"
        return base


@dataclass(frozen=True)
class FittedArima:
    order: ArimaOrder
    params: tuple          # phi..., theta..., Phi..., Theta...
    mean: float            # sample mean of the differenced series
    sse: float
    n_eff: int
    aicc: float
    fallback: bool = False


def difference(values, d: int, D: int, m: int) -> np.ndarray:
    w = np.asarray(values, dtype=float)
    for _ in range(d):
        w = np.diff(w)
    for _ in range(D):
        if len(w) <= m:
            return np.empty(0)
        w = w[m:] - w[:-m]
    return w


def _polys(order: ArimaOrder, params):
    """Combined AR and MA lag polynomials (seasonal x non-seasonal products)."""
    p, q, P, Q, m = order.p, order.q, order.P, order.Q, order.m
    phi = params[:p]
    theta = params[p : p + q]
    Phi = params[p + q : p + q + P]
    Theta = params[p + q + P :]
    a = np.zeros(p + P * m + 1)
    a[0] = 1.0
    a[1 : p + 1] = -phi
    for j in range(P):
        lag = (j + 1) * m
        a[lag] += -Phi[j]
        a[lag + 1 : lag + p + 1] += Phi[j] * phi
    b = np.zeros(q + Q * m + 1)
    b[0] = 1.0
    b[1 : q + 1] = theta
    for j in range(Q):
        lag = (j + 1) * m
        b[lag] += Theta[j]
        b[lag + 1 : lag + q + 1] += Theta[j] * theta
    return a, b


def _css_residuals(wc, order: ArimaOrder, params):
    a, b = _polys(order, params)
    if len(b) == 1:
        # pure AR: the inverse filter is a finite convolution
        eps = np.convolve(wc, a)[: len(wc)]
    else:
        eps = lfilter(a, b, wc)
    return eps


def _conditioning_lags(order: ArimaOrder) -> int:
    return order.p + order.P * order.m


def css_of(wc, order: ArimaOrder, params) -> float:
    eps = _css_residuals(wc, order, params)
    tail = eps[_conditioning_lags(order) :]
    sse = float(tail @ tail)
    return sse if math.isfinite(sse) else math.inf


def _aicc(sse: float, n_eff: int, n_params: int, n_common: int) -> float:
    # +2: the subtracted mean and the residual variance both count.
    # The per-point variance sse/n_eff is scored over n_common points for
    # every candidate: differencing and conditioning shrink n_eff per order,
    # and log-likelihoods over different sample sizes do not compare.
    k = n_params + 2
    if n_eff <= k + 1 or n_common <= k + 1 or sse < 0:
        return math.inf
    sse = max(sse, 1e-12)
    loglike_part = n_common * math.log(sse / n_eff)
    return loglike_part + 2 * k + (2 * k * (k + 1)) / (n_common - k - 1)


def _fit_candidate(wc, order: ArimaOrder, generous: bool, n_common: int):
    n_eff = len(wc) - _conditioning_lags(order)
    if n_eff <= order.n_params + 3:
        return None
    mu = float(wc.mean())
    centered = wc - mu
    ndim = order.n_params
    if ndim == 0:
        sse = css_of(centered, order, np.empty(0))
        if not math.isfinite(sse):
            return None
        return FittedArima(order, (), mu, sse, n_eff, _aicc(sse, n_eff, 0, n_common))

    def objective(params):
        return css_of(centered, order, params)

    if generous:
        maxfev, xatol = REFIT_MAXFEV_PER_DIM * ndim, 1e-6
    else:
        maxfev, xatol = GRID_MAXFEV_BASE + GRID_MAXFEV_PER_DIM * ndim, 1e-3
    params, sse, _ = nelder_mead(objective, np.zeros(ndim), maxfev=maxfev, xatol=xatol)
    if not math.isfinite(sse):
        return None
    return FittedArima(
        order, tuple(float(v) for v in params), mu, sse, n_eff, _aicc(sse, n_eff, ndim, n_common)
    )


def _candidate_orders(m: int, seasonal: bool):
    seasonal_range = range(MAX_SEASONAL + 1) if seasonal else range(1)
    for d in range(MAX_D + 1):
        for D in seasonal_range:
            for p in range(MAX_P + 1):
                for q in range(MAX_Q + 1):
                    for P in seasonal_range:
                        for Q in seasonal_range:
                            yield ArimaOrder(p, d, q, P, D, Q, m if seasonal else 1)


def _search(values, m: int, seasonal: bool):
    """Run the grid; returns (best_nonseasonal, best_any) by AICc."""
    diffed = {}
    best_plain = None
    best_any = None
    for order in _candidate_orders(m, seasonal):
        key = (order.d, order.D)
        if key not in diffed:
            diffed[key] = difference(values, order.d, order.D, order.m)
        w = diffed[key]
        if len(w) < 4:
            continue
        fit = _fit_candidate(w, order, generous=False, n_common=len(values))
        if fit is None or not math.isfinite(fit.aicc):
            continue
        if not order.is_seasonal and (best_plain is None or fit.aicc < best_plain.aicc):
            best_plain = fit
        if best_any is None or fit.aicc < best_any.aicc:
            best_any = fit
    return best_plain, best_any


def _refit(values, fit: FittedArima) -> FittedArima:
    w = difference(values, fit.order.d, fit.order.D, fit.order.m)
    refit = _fit_candidate(w, fit.order, generous=True, n_common=len(values))
    return refit if refit is not None else fit


_RANDOM_WALK = ArimaOrder(0, 1, 0)


def _random_walk_fit(values) -> FittedArima:
    w = difference(values, 1, 0, 1)
    mu = float(w.mean()) if len(w) else 0.0
    sse = float(np.sum((w - mu) ** 2))
    return FittedArima(_RANDOM_WALK, (), mu, sse, len(w), math.inf, fallback=True)


def fit_arima(train: SalesSeries, seasonal: bool = False, forced_order: ArimaOrder | None = None) -> FittedArima:
    """Grid-search fit; falls back to a (0,1,0) random walk when nothing converges."""
    values = train.values
    m = train.frequency.periods_per_year
    if forced_order is not None:
        w = difference(values, forced_order.d, forced_order.D, forced_order.m)
        fit = (
            _fit_candidate(w, forced_order, generous=True, n_common=len(values))
            if len(w) >= 4
            else None
        )
        return fit if fit is not None else _random_walk_fit(values)
    if seasonal:
        if len(values) < 3 * m:
            raise ValueError(f"seasonal fit needs at least {3 * m} points, got {len(values)}")
    elif len(values) < 10:
        raise ValueError(f"fit needs at least 10 points, got {len(values)}")
    best_plain, best_any = _search(values, m, seasonal)
    winner = best_any if seasonal else best_plain
    if winner is None:
        return _random_walk_fit(values)
    return _refit(values, winner)


def fit_arima_pair(train: SalesSeries) -> tuple:
    """One grid pass serving both model variants.

    Returns (non-seasonal winner, seasonal winner); either may be the
    random-walk fallback. The series must be long enough for the seasonal
    precondition; callers enforce their own preconditions.
    """
    values = train.values
    m = train.frequency.periods_per_year
    best_plain, best_any = _search(values, m, seasonal=True)
    plain = _refit(values, best_plain) if best_plain is not None else _random_walk_fit(values)
    if best_any is None:
        return plain, _random_walk_fit(values)
    if best_any.order == plain.order:
        return plain, plain
    return plain, _refit(values, best_any)


def arima_forecast(fit: FittedArima, values, horizon: int) -> np.ndarray:
    """Recursive ARMA forecast on the differenced scale, then undifferencing."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    values = np.asarray(values, dtype=float)
    order = fit.order
    w = difference(values, order.d, order.D, order.m)
    wc = w - fit.mean
    a, b = _polys(order, np.array(fit.params))
    eps = _css_residuals(wc, order, np.array(fit.params)) if len(wc) else np.empty(0)

    n = len(wc)
    wc_ext = np.concatenate([wc, np.zeros(horizon)])
    eps_ext = np.concatenate([eps, np.zeros(horizon)])
    for h in range(1, horizon + 1):
        t = n + h - 1
        acc = 0.0
        for j in range(1, len(a)):
            if t - j >= 0:
                acc -= a[j] * wc_ext[t - j]
        for j in range(max(h, 1), len(b)):
            if t - j >= 0:
                acc += b[j] * eps_ext[t - j]
        wc_ext[t] = acc
    w_future = wc_ext[n:] + fit.mean

    # invert the differencing: y_t = w_t - sum_{j>=1} pi_j y_{t-j}
    pi = np.array([1.0])
    for _ in range(order.d):
        pi = np.convolve(pi, [1.0, -1.0])
    seasonal_poly = np.zeros(order.m + 1)
    seasonal_poly[0] = 1.0
    seasonal_poly[-1] = -1.0
    for _ in range(order.D):
        pi = np.convolve(pi, seasonal_poly)
    if len(pi) == 1:
        out = w_future
    else:
        hist = list(values)
        out = np.empty(horizon)
        for h in range(horizon):
            y = w_future[h]
            for j in range(1, len(pi)):
                if len(hist) - j >= 0:
                    y -= pi[j] * hist[len(hist) - j]
            out[h] = y
            hist.append(y)
    if not np.all(np.isfinite(out)):
        rw = _random_walk_fit(values)
        drift = rw.mean
        out = values[-1] + drift * np.arange(1, horizon + 1)
    return np.maximum(out, 0.0)


class ArimaForecaster(BaseForecaster):
    """seasonal=False searches (p,d,q) only; True adds the (P,D,Q)[m] terms."""

    _param_names = ("seasonal", "forced_order")

    def __init__(self, seasonal: bool = False, forced_order: ArimaOrder | None = None):
        self.seasonal = seasonal
        self.forced_order = forced_order

    @property
    def model_id(self) -> ModelId:
        return ModelId.SARIMA if self.seasonal else ModelId.ARIMA

    def fit(self, series: SalesSeries) -> "ArimaForecaster":
        self.train_ = series
        self.fit_ = fit_arima(series, seasonal=self.seasonal, forced_order=self.forced_order)
        return self

    def forecast(self, horizon: int) -> ForecastResult:
        self._check_fitted()
        return self._result(arima_forecast(self.fit_, self.train_.values, horizon))
