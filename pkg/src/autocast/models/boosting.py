"""Gradient-boosted regression trees, squared loss, written from scratch.

Deterministic by construction: exact greedy splits, no row or column
subsampling, ties broken by lowest feature index then lowest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..series import ForecastResult, SalesSeries
from .base import BaseForecaster, ModelId, iterate_one_step
from .windows import make_window_features, one_step_features

N_ROUNDS = 200
LEARNING_RATE = 0.1
MAX_DEPTH = 3
MIN_SAMPLES_LEAF = 2


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _best_split(X, y):
    """Exact greedy scan; returns (feature, threshold, gain) or None."""
    n = len(y)
    total_sum = y.sum()
    total_sq = float(y @ y)
    base_sse = total_sq - total_sum * total_sum / n
    best = None
    best_gain = 1e-12  # require a strictly positive improvement
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        # candidate boundaries: value changes with enough rows on both sides
        boundaries = np.nonzero(xs[:-1] != xs[1:])[0]
        boundaries = boundaries[
            (boundaries >= MIN_SAMPLES_LEAF - 1) & (boundaries <= n - 1 - MIN_SAMPLES_LEAF)
        ]
        if len(boundaries) == 0:
            continue
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        nl = boundaries + 1.0
        nr = n - nl
        sl = csum[boundaries]
        ql = csq[boundaries]
        sse = (ql - sl * sl / nl) + ((total_sq - ql) - (total_sum - sl) ** 2 / nr)
        i = int(np.argmin(sse))  # first minimum = lowest threshold
        gain = base_sse - float(sse[i])
        if gain > best_gain:
            b = boundaries[i]
            best_gain = gain
            best = (j, (xs[b] + xs[b + 1]) / 2.0, gain)
    return best


def _grow(X, y, depth: int) -> _Node:
    node = _Node(value=float(y.mean()))
    if depth >= MAX_DEPTH or len(y) < 2 * MIN_SAMPLES_LEAF:
        return node
    split = _best_split(X, y)
    if split is None:
        return node
    feature, threshold, _ = split
    mask = X[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X[mask], y[mask], depth + 1)
    node.right = _grow(X[~mask], y[~mask], depth + 1)
    return node


class RegressionTree:
    def __init__(self, root: _Node):
        self.root = root

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out

    def predict_one(self, row) -> float:
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.value


class GradientBoostedTrees:
    def __init__(self, base_value: float, trees: list, learning_rate: float):
        self.base_value = base_value
        self.trees = trees
        self.learning_rate = learning_rate

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(len(X), self.base_value)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out

    def predict_one(self, row) -> float:
        value = self.base_value
        for tree in self.trees:
            value += self.learning_rate * tree.predict_one(row)
        return value


def fit_boosted_trees(X, y, n_rounds: int = N_ROUNDS, learning_rate: float = LEARNING_RATE) -> GradientBoostedTrees:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) == 0:
        raise ValueError("cannot fit on zero rows")
    base = float(y.mean())
    current = np.full(len(y), base)
    trees = []
    for _ in range(n_rounds):
        residual = y - current
        root = _grow(X, residual, depth=0)
        tree = RegressionTree(root)
        trees.append(tree)
        current += learning_rate * tree.predict(X)
    return GradientBoostedTrees(base, trees, learning_rate)


def train_pooled_trees(corpus, log_targets: bool = True) -> GradientBoostedTrees:
    """One model over window rows pooled from every product (sorted id order)."""
    blocks = [make_window_features(s, log_targets) for s in sorted(corpus, key=lambda s: s.product_id)]
    xs = [X for X, _ in blocks if len(X)]
    ys = [y for _, y in blocks if len(y)]
    if not xs:
        raise ValueError("no product contributed any training window")
    return fit_boosted_trees(np.vstack(xs), np.concatenate(ys))


class BoostedTreeForecaster(BaseForecaster):
    """Per-product adapter around the shared pooled model."""

    model_id = ModelId.BOOSTED_TREE
    _param_names = ("log_targets",)

    def __init__(self, model: GradientBoostedTrees, log_targets: bool = True):
        self.model = model
        self.log_targets = log_targets

    def fit(self, series: SalesSeries) -> "BoostedTreeForecaster":
        m = series.frequency.periods_per_year
        if len(series) < m:
            raise ValueError(f"need at least {m} points of history, got {len(series)}")
        self.train_ = series
        return self

    def forecast(self, horizon: int) -> ForecastResult:
        self._check_fitted()
        m = self.train_.frequency.periods_per_year
        start_pos = self.train_.start.position_in_year
        n = len(self.train_)
        state = {"t": n}

        def predict_one(history):
            position = (start_pos + state["t"]) % m
            state["t"] += 1
            row = one_step_features(history, position, m)
            value = self.model.predict_one(row)
            return np.expm1(value) if self.log_targets else value

        values = iterate_one_step(predict_one, self.train_.values, horizon)
        return self._result(values)
