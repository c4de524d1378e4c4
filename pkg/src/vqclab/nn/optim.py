"""AdamW with the fixed milestone learning-rate schedule.

All training runs share one schedule: base learning rate 0.10 halved on
entering epochs 3, 8 and 15 (0-based), weight decay 1e-5 applied
decoupled from the gradient moments.
"""

from __future__ import annotations

import numpy as np

BASE_LR = 0.10
WEIGHT_DECAY = 1e-5
BETAS = (0.9, 0.999)
EPS = 1e-8
MILESTONES = (3, 8, 15)
GAMMA = 0.5


def milestone_lr(epoch: int, base_lr: float = BASE_LR, milestones=MILESTONES,
                 gamma: float = GAMMA) -> float:
    """Learning rate in effect during a given 0-based epoch."""
    drops = sum(1 for m in milestones if m <= epoch)
    return base_lr * gamma ** drops


class AdamW:
    def __init__(self, params, base_lr: float = BASE_LR,
                 weight_decay: float = WEIGHT_DECAY, betas=BETAS, eps: float = EPS):
        self.params = list(params)
        self.base_lr = base_lr
        self.lr = base_lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def set_epoch(self, epoch: int):
        self.lr = milestone_lr(epoch, self.base_lr)

    def zero_grad(self):
        for p in self.params:
            p.grad = None

    def step(self):
        self.step_count += 1
        bc1 = 1.0 - self.beta1 ** self.step_count
        bc2 = 1.0 - self.beta2 ** self.step_count
        for p, m, v in zip(self.params, self.m, self.v):
            g = p.grad
            if g is None:
                g = np.zeros_like(p.data)
            # Decoupled decay: applied to the parameter, not the gradient.
            p.data -= self.lr * self.weight_decay * p.data
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.data -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)
