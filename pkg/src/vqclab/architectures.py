"""The three hybrid models built around a validated circuit.

Each model maps a batch of 21-point feature vectors to predictions in
(0, 1) via one quantum layer plus classical glue:

* simple        linear embed to q_enc inputs, squash to [0, pi], circuit,
                linear head, sigmoid.
* quanv         sliding windows scaled by pi, circuit per window giving a
                (channels, windows) feature map, residual conv block,
                global average pool, 10-5-1 MLP head with leaky ReLUs,
                sigmoid.
* full_quantum  all 21 features scaled by pi straight into the circuit,
                linear head, sigmoid.

Parameter draws happen in forward-pass order from a single Philox
stream keyed by (master_seed, 1000): classical layers uniform in
+-1/sqrt(fan_in), circuit weights uniform in [0, 2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitIR, FlatCircuit, circuit_stats, unroll_and_validate
from .nn import autodiff as ad
from .nn.autodiff import Tensor
from .nn.layers import Linear, ResidualConvBlock
from .simulator import adjoint_gradients, simulate_expectations

N_FEATURES = 21
_INIT_TAG = 1000


@dataclass(frozen=True)
class SimpleQNNConfig:
    q_enc_size: int
    q_out_size: int
    circuit: CircuitIR

    architecture = "simple"

    def validate(self) -> FlatCircuit:
        if self.q_enc_size < 1 or self.q_enc_size > N_FEATURES:
            raise ValueError(f"q_enc_size must be in [1, {N_FEATURES}], "
                             f"got {self.q_enc_size}")
        return unroll_and_validate(self.circuit, n_inputs=self.q_enc_size,
                                   q_out=self.q_out_size)


@dataclass(frozen=True)
class QuanvConfig:
    kernel_size: int
    stride: int
    vqc_output_dim: int
    circuit: CircuitIR

    architecture = "quanv"

    @property
    def window_count(self) -> int:
        return (N_FEATURES - self.kernel_size) // self.stride + 1

    def validate(self) -> FlatCircuit:
        if not 1 <= self.kernel_size <= N_FEATURES:
            raise ValueError(f"kernel_size must be in [1, {N_FEATURES}], "
                             f"got {self.kernel_size}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.window_count < 1:
            raise ValueError(f"kernel_size {self.kernel_size} with stride "
                             f"{self.stride} yields no window")
        return unroll_and_validate(self.circuit, n_inputs=self.kernel_size,
                                   q_out=self.vqc_output_dim)


@dataclass(frozen=True)
class FullQuantumConfig:
    q_out_size: int
    circuit: CircuitIR

    architecture = "full_quantum"

    def validate(self) -> FlatCircuit:
        return unroll_and_validate(self.circuit, n_inputs=N_FEATURES,
                                   q_out=self.q_out_size)


@dataclass(frozen=True)
class ParamReport:
    n_trainable_params_total: int
    n_trainable_params_VQC: int
    n_gates_in_VQC: int
    circuit_depth: int


class QuantumLayer:
    """Applies the circuit row-wise; backward runs the adjoint sweep."""

    def __init__(self, fc: FlatCircuit, rng: np.random.Generator):
        self.fc = fc
        self.weights = ad.parameter(rng.uniform(0.0, 2.0 * math.pi,
                                                size=fc.weights_shape))

    def __call__(self, x: Tensor) -> Tensor:
        xd = x.data
        out = np.stack([simulate_expectations(self.fc, xd[i], self.weights.data)
                        for i in range(xd.shape[0])])

        def backward(g):
            dx = np.zeros_like(xd)
            dw = np.zeros(self.fc.weights_shape)
            for i in range(xd.shape[0]):
                grads = adjoint_gradients(self.fc, xd[i], self.weights.data, g[i])
                dx[i] = grads.d_inputs
                dw += grads.d_weights
            ad.accumulate(x, dx)
            ad.accumulate(self.weights, dw)

        return ad.from_op(out, (x, self.weights), backward)

    def parameters(self):
        return [self.weights]

    def n_params(self) -> int:
        return self.weights.data.size


class ModelInstance:
    def __init__(self, config, fc: FlatCircuit, master_seed: int):
        self.config = config
        self.fc = fc
        rng = np.random.Generator(np.random.Philox(
            np.random.SeedSequence(entropy=(int(master_seed), _INIT_TAG))))
        arch = config.architecture
        if arch == "simple":
            self.embed = Linear(N_FEATURES, config.q_enc_size, rng)
            self.quantum = QuantumLayer(fc, rng)
            self.head = Linear(config.q_out_size, 1, rng)
            self._classical = [self.embed, self.head]
        elif arch == "quanv":
            self.quantum = QuantumLayer(fc, rng)
            self.block = ResidualConvBlock(config.vqc_output_dim, rng)
            self.fc1 = Linear(config.vqc_output_dim, 10, rng)
            self.fc2 = Linear(10, 5, rng)
            self.fc3 = Linear(5, 1, rng)
            self._classical = [self.block, self.fc1, self.fc2, self.fc3]
        elif arch == "full_quantum":
            self.quantum = QuantumLayer(fc, rng)
            self.head = Linear(config.q_out_size, 1, rng)
            self._classical = [self.head]
        else:
            raise ValueError(f"unknown architecture {arch!r}")

    @property
    def architecture(self) -> str:
        return self.config.architecture

    def forward(self, features) -> Tensor:
        """features: (batch, 21) array of normalized samples -> (batch,) in (0, 1)."""
        x = features if isinstance(features, Tensor) else Tensor(features)
        if x.data.ndim != 2 or x.data.shape[1] != N_FEATURES:
            raise ValueError(f"expected (batch, {N_FEATURES}) features, "
                             f"got {x.data.shape}")
        arch = self.architecture
        if arch == "simple":
            h = ad.scale_to_0_pi(self.embed(x))
            h = self.quantum(h)
            h = ad.sigmoid(self.head(h))
        elif arch == "quanv":
            cfg = self.config
            batch = x.data.shape[0]
            win = ad.sliding_windows(x, cfg.kernel_size, cfg.stride)  # (B, W, k)
            win = ad.scale(win, math.pi)
            flat = ad.reshape(win, (batch * cfg.window_count, cfg.kernel_size))
            q = self.quantum(flat)  # (B*W, C)
            q = ad.reshape(q, (batch, cfg.window_count, cfg.vqc_output_dim))
            q = ad.transpose(q, (0, 2, 1))  # channels x windows
            h = self.block(q)
            h = ad.adaptive_avg_pool1d(h, 1)
            h = ad.reshape(h, (batch, cfg.vqc_output_dim))
            h = ad.leaky_relu(self.fc1(h))
            h = ad.leaky_relu(self.fc2(h))
            h = ad.sigmoid(self.fc3(h))
        else:
            h = ad.scale(x, math.pi)
            h = self.quantum(h)
            h = ad.sigmoid(self.head(h))
        return ad.reshape(h, (x.data.shape[0],))

    def parameters(self):
        params = []
        for layer in self._classical:
            params.extend(layer.parameters())
        params.extend(self.quantum.parameters())
        return params

    def param_report(self) -> ParamReport:
        gates, depth, vqc_params = circuit_stats(self.fc)
        classical = sum(layer.n_params() for layer in self._classical)
        total = classical + vqc_params
        # Accounting identity: the graph's trainable tensors must agree.
        assert total == sum(p.data.size for p in self.parameters())
        return ParamReport(n_trainable_params_total=total,
                           n_trainable_params_VQC=vqc_params,
                           n_gates_in_VQC=gates,
                           circuit_depth=depth)


def build_model(config, master_seed: int = 0) -> ModelInstance:
    """Validate the config's circuit and assemble the model around it."""
    fc = config.validate()
    return ModelInstance(config, fc, master_seed)


def model_forward(model: ModelInstance, features) -> np.ndarray:
    """Predictions as a plain array, one scalar in (0, 1) per sample."""
    return model.forward(np.asarray(features, dtype=np.float64)).data
