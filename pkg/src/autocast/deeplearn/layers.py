"""Network layers with hand-written forward and backward passes.

Tensors are float64 throughout: these nets are tiny and exact gradients
matter more than speed. Shapes are (batch, channels, length) for conv work
and the forward pass caches whatever backward needs.
"""
from __future__ import annotations

import numpy as np


class Layer:
    def params(self) -> list:
        return []

    def grads(self) -> list:
        return []

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class DilatedCausalConv1d(Layer):
    """Causal conv: output[t] reads input[t - (kernel-1)*dilation .. t].

    Tap k (0-based) multiplies input[t - (kernel-1-k)*dilation], so the last
    tap is the current step; left padding is zeros. Output length equals
    input length.
    """

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, dilation: int, rng):
        scale = np.sqrt(2.0 / (in_channels * kernel_size))
        self.weight = rng.normal(0.0, scale, size=(out_channels, in_channels, kernel_size))
        self.bias = np.zeros(out_channels)
        self.dilation = dilation
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    def params(self):
        return [self.weight, self.bias]

    def grads(self):
        return [self.grad_weight, self.grad_bias]

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3 or x.shape[1] != self.weight.shape[1]:
            raise ValueError(f"expected (batch, {self.weight.shape[1]}, length), got {x.shape}")
        out_channels, _, kernel = self.weight.shape
        batch, _, length = x.shape
        pad = (kernel - 1) * self.dilation
        padded = np.concatenate([np.zeros((batch, x.shape[1], pad)), x], axis=2)
        self._padded = padded
        out = np.broadcast_to(self.bias[None, :, None], (batch, out_channels, length)).copy()
        for k in range(kernel):
            offset = k * self.dilation
            segment = padded[:, :, offset : offset + length]
            out += np.einsum("oi,bil->bol", self.weight[:, :, k], segment)
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        out_channels, in_channels, kernel = self.weight.shape
        batch, _, length = grad_out.shape
        pad = (kernel - 1) * self.dilation
        padded = self._padded
        grad_padded = np.zeros_like(padded)
        self.grad_bias += grad_out.sum(axis=(0, 2))
        for k in range(kernel):
            offset = k * self.dilation
            segment = padded[:, :, offset : offset + length]
            self.grad_weight[:, :, k] += np.einsum("bol,bil->oi", grad_out, segment)
            grad_padded[:, :, offset : offset + length] += np.einsum(
                "oi,bol->bil", self.weight[:, :, k], grad_out
            )
        return grad_padded[:, :, pad:]


class Relu(Layer):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0.0)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return np.where(self._mask, grad_out, 0.0)


class DenseLastStep(Layer):
    """Linear head over the channels of the final time step only."""

    def __init__(self, in_channels: int, rng):
        scale = np.sqrt(1.0 / in_channels)
        self.weight = rng.normal(0.0, scale, size=in_channels)
        self.bias = np.zeros(1)
        self.grad_weight = np.zeros_like(self.weight)
        self.grad_bias = np.zeros_like(self.bias)

    def params(self):
        return [self.weight, self.bias]

    def grads(self):
        return [self.grad_weight, self.grad_bias]

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._last = x[:, :, -1]
        self._in_shape = x.shape
        return self._last @ self.weight + self.bias[0]

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        self.grad_weight += grad_out @ self._last
        self.grad_bias[0] += grad_out.sum()
        grad_in = np.zeros(self._in_shape)
        grad_in[:, :, -1] = np.outer(grad_out, self.weight)
        return grad_in
