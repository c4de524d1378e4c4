"""Reverse-mode automatic differentiation on numpy arrays.

Just enough machinery for the three hybrid models: double-precision
tensors, closure-based backward rules, and a topological backward pass
from a scalar loss.  No broadcasting rules beyond what the ops below
need.
"""

from __future__ import annotations

import math

import numpy as np


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def zero_grad(self):
        self.grad = None

    def backward(self):
        if self.data.ndim != 0:
            raise ValueError("backward() starts from a scalar loss")
        order = []
        seen = set()

        def visit(t):
            if id(t) in seen:
                return
            seen.add(id(t))
            for p in t._parents:
                visit(p)
            order.append(t)

        visit(self)
        self.grad = np.ones_like(self.data)
        for t in reversed(order):
            if t._backward is not None and t.grad is not None:
                t._backward(t.grad)


def parameter(data) -> Tensor:
    return Tensor(data, requires_grad=True)


def accumulate(t: Tensor, grad: np.ndarray):
    if t.requires_grad:
        t.grad = grad if t.grad is None else t.grad + grad


def from_op(data, parents, backward) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


# ---------------------------------------------------------------------------
# Ops


def matmul(x: Tensor, w: Tensor) -> Tensor:
    def backward(g):
        accumulate(x, g @ w.data.T)
        accumulate(w, x.data.T @ g)

    return from_op(x.data @ w.data, (x, w), backward)


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    """x: (batch, n), b: (n,)."""

    def backward(g):
        accumulate(x, g)
        accumulate(b, g.sum(axis=0))

    return from_op(x.data + b.data, (x, b), backward)


def add(x: Tensor, y: Tensor) -> Tensor:
    if x.data.shape != y.data.shape:
        raise ValueError(f"shape mismatch in add: {x.data.shape} vs {y.data.shape}")

    def backward(g):
        accumulate(x, g)
        accumulate(y, g)

    return from_op(x.data + y.data, (x, y), backward)


def scale(x: Tensor, c: float) -> Tensor:
    def backward(g):
        accumulate(x, g * c)

    return from_op(x.data * c, (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    s = 1.0 / (1.0 + np.exp(-x.data))

    def backward(g):
        accumulate(x, g * s * (1.0 - s))

    return from_op(s, (x,), backward)


def leaky_relu(x: Tensor, slope: float = 0.01) -> Tensor:
    factor = np.where(x.data >= 0.0, 1.0, slope)

    def backward(g):
        accumulate(x, g * factor)

    return from_op(x.data * factor, (x,), backward)


def scale_to_0_pi(x: Tensor) -> Tensor:
    """Smooth squash onto [0, pi]: pi * sigmoid(x)."""
    return scale(sigmoid(x), math.pi)


def reshape(x: Tensor, shape) -> Tensor:
    old = x.data.shape

    def backward(g):
        accumulate(x, g.reshape(old))

    return from_op(x.data.reshape(shape), (x,), backward)


def transpose(x: Tensor, axes) -> Tensor:
    inverse = np.argsort(axes)

    def backward(g):
        accumulate(x, g.transpose(inverse))

    return from_op(x.data.transpose(axes), (x,), backward)


def conv1d(x: Tensor, w: Tensor, b: Tensor, padding: int = 1) -> Tensor:
    """x: (batch, C_in, L), w: (C_out, C_in, K), b: (C_out,)."""
    batch, c_in, length = x.data.shape
    c_out, c_in_w, k = w.data.shape
    if c_in != c_in_w:
        raise ValueError(f"shape mismatch in conv1d: input has {c_in} channels, "
                         f"kernel expects {c_in_w}")
    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding)))
    out_len = length + 2 * padding - k + 1
    out = np.tile(b.data[None, :, None], (batch, 1, out_len))
    for j in range(k):
        out += np.einsum("bcl,oc->bol", xp[:, :, j:j + out_len], w.data[:, :, j])

    def backward(g):
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(w.data)
        for j in range(k):
            dxp[:, :, j:j + out_len] += np.einsum("bol,oc->bcl", g, w.data[:, :, j])
            dw[:, :, j] = np.einsum("bol,bcl->oc", g, xp[:, :, j:j + out_len])
        accumulate(x, dxp[:, :, padding:padding + length])
        accumulate(w, dw)
        accumulate(b, g.sum(axis=(0, 2)))

    return from_op(out, (x, w, b), backward)


def adaptive_avg_pool1d(x: Tensor, target_len: int) -> Tensor:
    """x: (batch, C, L) -> (batch, C, target_len); bin i covers
    [floor(i*L/T), floor((i+1)*L/T))."""
    batch, channels, length = x.data.shape
    if target_len < 1 or target_len > length:
        raise ValueError(f"cannot pool length {length} to {target_len}")
    bounds = [(i * length // target_len, (i + 1) * length // target_len)
              for i in range(target_len)]
    out = np.stack([x.data[:, :, s:e].mean(axis=2) for s, e in bounds], axis=2)

    def backward(g):
        dx = np.zeros_like(x.data)
        for i, (s, e) in enumerate(bounds):
            dx[:, :, s:e] += g[:, :, i:i + 1] / (e - s)
        accumulate(x, dx)

    return from_op(out, (x,), backward)


def sliding_windows(x: Tensor, kernel_size: int, stride: int) -> Tensor:
    """x: (batch, N) -> (batch, n_windows, kernel_size)."""
    batch, n = x.data.shape
    n_windows = (n - kernel_size) // stride + 1
    if n_windows < 1:
        raise ValueError(f"kernel {kernel_size} with stride {stride} yields no "
                         f"window over length {n}")
    out = np.stack([x.data[:, j * stride:j * stride + kernel_size]
                    for j in range(n_windows)], axis=1)

    def backward(g):
        dx = np.zeros_like(x.data)
        for j in range(n_windows):
            dx[:, j * stride:j * stride + kernel_size] += g[:, j, :]
        accumulate(x, dx)

    return from_op(out, (x,), backward)


def mse_loss(pred: Tensor, target: np.ndarray) -> Tensor:
    target = np.asarray(target, dtype=np.float64)
    if pred.data.shape != target.shape:
        raise ValueError(f"shape mismatch in mse: {pred.data.shape} vs {target.shape}")
    diff = pred.data - target

    def backward(g):
        accumulate(pred, g * 2.0 * diff / diff.size)

    return from_op(np.mean(diff ** 2), (pred,), backward)
