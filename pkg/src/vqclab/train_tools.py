"""The three agent-facing training tools and their shared training loop.

A request names one of the architecture variants, carries the circuit
document plus the variant's sizing fields, and asks for a number of
epochs.  Execution is a fixed pipeline: parse -> unroll/validate ->
build -> train.  The first failure short-circuits into a ToolError
whose message is the agent's entire feedback, so messages are never
truncated.

Training protocol (identical for every variant): minibatches of 16
over a per-epoch seeded shuffle of the 150 training samples, MSE loss,
AdamW with the milestone schedule, validation RMSE appended after each
epoch, test RMSE computed once after the final epoch.  No early
stopping, no checkpointing.  Identical request + identical master seed
reproduces the result bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .architectures import (FullQuantumConfig, ModelInstance, QuanvConfig,
                            SimpleQNNConfig)
from .circuit import CircuitError, parse_circuit, render_ascii
from .dataset import DatasetSplit
from .nn.autodiff import mse_loss
from .nn.layers import rmse
from .nn.optim import AdamW, milestone_lr

BATCH_SIZE = 16
VARIANTS = ("simple", "quanv", "full_quantum")
_SHUFFLE_TAG = 2000

# variant -> required sizing fields
_VARIANT_FIELDS = {
    "simple": ("q_enc_size", "q_out_size"),
    "quanv": ("kernel_size", "stride", "vqc_output_dim"),
    "full_quantum": ("q_out_size",),
}


@dataclass(frozen=True)
class ToolRequest:
    variant: str
    circuit_document: str
    epochs: int
    weights_shape: tuple | None = None
    q_enc_size: int | None = None
    q_out_size: int | None = None
    kernel_size: int | None = None
    stride: int | None = None
    vqc_output_dim: int | None = None

    def to_dict(self) -> dict:
        out = {"variant": self.variant, "circuit_document": self.circuit_document,
               "epochs": self.epochs}
        if self.weights_shape is not None:
            out["weights_shape"] = list(self.weights_shape)
        for name in _VARIANT_FIELDS.get(self.variant, ()):
            if getattr(self, name) is not None:
                out[name] = getattr(self, name)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ToolRequest":
        known = {"variant", "circuit_document", "epochs", "weights_shape",
                 "q_enc_size", "q_out_size", "kernel_size", "stride",
                 "vqc_output_dim"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown request field(s): {sorted(unknown)}")
        shape = raw.get("weights_shape")
        return cls(
            variant=raw.get("variant", ""),
            circuit_document=raw.get("circuit_document", ""),
            epochs=raw.get("epochs", 0),
            weights_shape=tuple(shape) if shape is not None else None,
            q_enc_size=raw.get("q_enc_size"),
            q_out_size=raw.get("q_out_size"),
            kernel_size=raw.get("kernel_size"),
            stride=raw.get("stride"),
            vqc_output_dim=raw.get("vqc_output_dim"),
        )


@dataclass(frozen=True)
class ToolResult:
    test_RMSE: float
    val_RMSE_history: tuple
    train_RMSE_last_batch: float
    n_gates_in_VQC: int
    n_trainable_params_total: int
    n_trainable_params_VQC: int
    circuit_depth: int
    wall_time: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["val_RMSE_history"] = list(self.val_RMSE_history)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ToolResult":
        raw = dict(raw)
        raw["val_RMSE_history"] = tuple(raw["val_RMSE_history"])
        return cls(**raw)


class ToolError(Exception):
    """Structured failure; ``phase`` is parse, validate, build or train."""

    def __init__(self, phase: str, message: str, construct: str | None = None):
        self.phase = phase
        self.message = message
        self.construct = construct
        super().__init__(f"[{phase}] {message}")

    def to_dict(self) -> dict:
        out = {"phase": self.phase, "message": self.message}
        if self.construct:
            out["construct"] = self.construct
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "ToolError":
        return cls(raw["phase"], raw["message"], raw.get("construct"))


@dataclass
class TrainingTrace:
    lr_history: list = field(default_factory=list)  # lr in effect per epoch
    warnings: list = field(default_factory=list)
    circuit_ascii: str = ""  # diagram of the validated circuit


# ---------------------------------------------------------------------------
# Request validation and model construction


def _require(condition: bool, message: str):
    if not condition:
        raise ToolError("validate", message)


def build_config(req: ToolRequest):
    """Parse the document and assemble the variant's model config."""
    _require(req.variant in VARIANTS,
             f"unknown variant {req.variant!r}; choose one of {', '.join(VARIANTS)}")
    _require(isinstance(req.epochs, int) and req.epochs >= 1,
             f"epochs must be a positive integer, got {req.epochs!r}")
    for name in _VARIANT_FIELDS[req.variant]:
        value = getattr(req, name)
        _require(isinstance(value, int) and value >= 1,
                 f"{req.variant!r} requests need a positive integer {name!r}, "
                 f"got {value!r}")
    for other_variant, names in _VARIANT_FIELDS.items():
        if other_variant == req.variant:
            continue
        for name in names:
            if name in _VARIANT_FIELDS[req.variant]:
                continue
            _require(getattr(req, name) is None,
                     f"field {name!r} does not belong to variant {req.variant!r}")

    try:
        ir = parse_circuit(req.circuit_document)
    except CircuitError as exc:
        raise ToolError("parse", str(exc)) from None

    if req.weights_shape is not None:
        shape = tuple(int(s) for s in req.weights_shape)
        _require(all(s >= 1 for s in shape),
                 f"weights_shape entries must be positive, got {list(shape)}")
        if ir.weights_shape is not None and tuple(ir.weights_shape) != shape:
            raise ToolError(
                "validate",
                f"the request says weights_shape={list(shape)} but the circuit "
                f"document declares {list(ir.weights_shape)}; make them agree")
        ir = ir.with_weights_shape(shape)
    elif ir.weights_shape is None:
        raise ToolError("validate",
                        "no weights_shape given, neither in the request nor in "
                        "the circuit document")

    if req.variant == "simple":
        return SimpleQNNConfig(q_enc_size=req.q_enc_size, q_out_size=req.q_out_size,
                               circuit=ir)
    if req.variant == "quanv":
        return QuanvConfig(kernel_size=req.kernel_size, stride=req.stride,
                           vqc_output_dim=req.vqc_output_dim, circuit=ir)
    return FullQuantumConfig(q_out_size=req.q_out_size, circuit=ir)


# ---------------------------------------------------------------------------
# Training


def run_training(model: ModelInstance, splits: DatasetSplit, epochs: int,
                 master_seed: int, trace: TrainingTrace | None = None) -> ToolResult:
    started = time.perf_counter()
    trace = trace if trace is not None else TrainingTrace()
    report = model.param_report()
    optimizer = AdamW(model.parameters())

    train_x = splits.features("train")
    train_y = splits.targets("train")
    n_train = train_x.shape[0]

    val_history = []
    last_batch_rmse = float("nan")
    for epoch in range(epochs):
        lr = milestone_lr(epoch)
        optimizer.set_epoch(epoch)
        trace.lr_history.append(lr)
        shuffle_rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(
            entropy=(int(master_seed), _SHUFFLE_TAG, int(epoch)))))
        order = shuffle_rng.permutation(n_train)
        for start in range(0, n_train, BATCH_SIZE):
            batch = order[start:start + BATCH_SIZE]
            pred = model.forward(train_x[batch])
            loss = mse_loss(pred, train_y[batch])
            if not np.isfinite(loss.data):
                raise ToolError(
                    "train",
                    f"loss became non-finite at epoch {epoch}, batch "
                    f"{start // BATCH_SIZE}; the circuit or its angles likely "
                    "produce values the optimizer cannot recover from")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            last_batch_rmse = rmse(pred.data, train_y[batch])
        val_pred = model.forward(splits.features("val")).data
        val_history.append(rmse(val_pred, splits.targets("val")))

    test_pred = model.forward(splits.features("test")).data
    test_rmse = rmse(test_pred, splits.targets("test"))
    return ToolResult(
        test_RMSE=test_rmse,
        val_RMSE_history=tuple(val_history),
        train_RMSE_last_batch=last_batch_rmse,
        n_gates_in_VQC=report.n_gates_in_VQC,
        n_trainable_params_total=report.n_trainable_params_total,
        n_trainable_params_VQC=report.n_trainable_params_VQC,
        circuit_depth=report.circuit_depth,
        wall_time=time.perf_counter() - started,
    )


def execute_with_trace(req: ToolRequest, splits: DatasetSplit, master_seed: int):
    """Full pipeline; returns (ToolResult | ToolError, TrainingTrace)."""
    trace = TrainingTrace()
    try:
        config = build_config(req)
        try:
            fc = config.validate()
        except (CircuitError, ValueError) as exc:
            construct = getattr(exc, "construct", None)
            raise ToolError("validate", str(exc), construct or None) from None
        trace.warnings.extend(fc.warnings)
        trace.circuit_ascii = render_ascii(fc)
        try:
            model = ModelInstance(config, fc, master_seed)
        except Exception as exc:  # construction bugs must still reach the agent
            raise ToolError("build", str(exc)) from None
        result = run_training(model, splits, req.epochs, master_seed, trace)
        return result, trace
    except ToolError as err:
        return err, trace


def execute_tool_request(req: ToolRequest, splits: DatasetSplit,
                         master_seed: int):
    """-> ToolResult | ToolError (never raises for request-level failures)."""
    return execute_with_trace(req, splits, master_seed)[0]
