"""Classical layers used by the hybrid models.

Parameters are drawn from the rng handed to the constructor, weight
before bias, uniform in +-1/sqrt(fan_in).  Build order therefore fixes
the initialization stream for a whole model.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor


class Linear:
    def __init__(self, n_in: int, n_out: int, rng: np.random.Generator):
        bound = 1.0 / np.sqrt(n_in)
        self.weight = ad.parameter(rng.uniform(-bound, bound, size=(n_in, n_out)))
        self.bias = ad.parameter(rng.uniform(-bound, bound, size=(n_out,)))

    def __call__(self, x: Tensor) -> Tensor:
        if x.data.ndim != 2 or x.data.shape[1] != self.weight.data.shape[0]:
            raise ValueError(f"shape mismatch in linear: input {x.data.shape}, "
                             f"weight {self.weight.data.shape}")
        return ad.add_bias(ad.matmul(x, self.weight), self.bias)

    def parameters(self):
        return [self.weight, self.bias]

    def n_params(self) -> int:
        return self.weight.data.size + self.bias.data.size


class Conv1d:
    """Same-channel 1-D convolution, kernel 3, zero padding 1 by default."""

    def __init__(self, channels: int, rng: np.random.Generator, kernel_size: int = 3,
                 padding: int = 1):
        bound = 1.0 / np.sqrt(channels * kernel_size)
        self.weight = ad.parameter(
            rng.uniform(-bound, bound, size=(channels, channels, kernel_size)))
        self.bias = ad.parameter(rng.uniform(-bound, bound, size=(channels,)))
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return ad.conv1d(x, self.weight, self.bias, padding=self.padding)

    def parameters(self):
        return [self.weight, self.bias]

    def n_params(self) -> int:
        return self.weight.data.size + self.bias.data.size


class ResidualConvBlock:
    """Two conv1d layers with leaky ReLUs and a skip connection."""

    def __init__(self, channels: int, rng: np.random.Generator, slope: float = 0.01):
        self.conv1 = Conv1d(channels, rng)
        self.conv2 = Conv1d(channels, rng)
        self.slope = slope

    def __call__(self, x: Tensor) -> Tensor:
        branch = self.conv2(ad.leaky_relu(self.conv1(x), self.slope))
        return ad.leaky_relu(ad.add(branch, x), self.slope)

    def parameters(self):
        return self.conv1.parameters() + self.conv2.parameters()

    def n_params(self) -> int:
        return self.conv1.n_params() + self.conv2.n_params()


def rmse(pred, target) -> float:
    """Root mean squared error between two equal-length vectors."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch in rmse: {pred.shape} vs {target.shape}")
    if pred.size == 0:
        raise ValueError("rmse of empty input")
    return float(np.sqrt(np.mean((pred - target) ** 2)))
