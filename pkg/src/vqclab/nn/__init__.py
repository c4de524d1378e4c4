"""Differentiable building blocks: tensors, layers, optimizer, metrics."""

from . import autodiff
from .autodiff import Tensor, parameter
from .layers import Conv1d, Linear, ResidualConvBlock, rmse
from .optim import (AdamW, BASE_LR, BETAS, EPS, GAMMA, MILESTONES,
                    WEIGHT_DECAY, milestone_lr)

__all__ = [
    "autodiff", "Tensor", "parameter",
    "Linear", "Conv1d", "ResidualConvBlock", "rmse",
    "AdamW", "milestone_lr",
    "BASE_LR", "WEIGHT_DECAY", "BETAS", "EPS", "MILESTONES", "GAMMA",
]
