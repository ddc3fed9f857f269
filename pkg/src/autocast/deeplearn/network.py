"""Network assembly, configuration, and weight (de)serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .layers import DenseLastStep, DilatedCausalConv1d, Relu


@dataclass(frozen=True)
class CnnConfig:
    input_window: int = 24
    kernel_size: int = 2
    dilations: tuple = (1, 2, 4, 8)
    channels: int = 16
    learning_rate: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 100
    patience: int = 5
    seed: int = 0

    @property
    def receptive_field(self) -> int:
        return 1 + sum((self.kernel_size - 1) * d for d in self.dilations)

    def __post_init__(self):
        if self.receptive_field > self.input_window:
            raise ValueError(
                f"receptive field {self.receptive_field} exceeds input window {self.input_window}"
            )


class CnnNetwork:
    """Stack of dilated causal conv+ReLU blocks and a dense head."""

    def __init__(self, config: CnnConfig):
        self.config = config
        rng = np.random.default_rng(config.seed)
        self.layers = []
        in_channels = 1
        for dilation in config.dilations:
            self.layers.append(
                DilatedCausalConv1d(in_channels, config.channels, config.kernel_size, dilation, rng)
            )
            self.layers.append(Relu())
            in_channels = config.channels
        self.layers.append(DenseLastStep(in_channels, rng))

    def params(self) -> list:
        return [p for layer in self.layers for p in layer.params()]

    def grads(self) -> list:
        return [g for layer in self.layers for g in layer.grads()]

    def zero_grads(self):
        for g in self.grads():
            g[...] = 0.0

    def forward(self, windows: np.ndarray) -> np.ndarray:
        """windows: (batch, input_window) -> predictions (batch,)."""
        x = np.asarray(windows, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        x = x[:, None, :]
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad_pred: np.ndarray):
        grad = grad_pred
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def predict_one(self, window: np.ndarray) -> float:
        return float(self.forward(window[None, :])[0])

    def get_weights(self) -> list:
        return [p.copy() for p in self.params()]

    def set_weights(self, weights: list):
        for param, stored in zip(self.params(), weights):
            param[...] = stored

    def to_json(self) -> str:
        payload = {
            "config": {
                "input_window": self.config.input_window,
                "kernel_size": self.config.kernel_size,
                "dilations": list(self.config.dilations),
                "channels": self.config.channels,
                "learning_rate": self.config.learning_rate,
                "batch_size": self.config.batch_size,
                "max_epochs": self.config.max_epochs,
                "patience": self.config.patience,
                "seed": self.config.seed,
            },
            "weights": [p.tolist() for p in self.params()],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "CnnNetwork":
        payload = json.loads(text)
        cfg = payload["config"]
        cfg["dilations"] = tuple(cfg["dilations"])
        net = cls(CnnConfig(**cfg))
        net.set_weights([np.array(w) for w in payload["weights"]])
        return net

    def save(self, path):
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "CnnNetwork":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))
