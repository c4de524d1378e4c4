"""Neutral circuit description language: parse, unroll, validate, inspect."""

from .errors import CircuitError, DocumentError, ExprError, UnrollError
from .ir import (CircuitIR, FlatCircuit, FlatGate, FlatMeasurement, GATE_SPECS,
                 GateNode, LoopNode, MeasureNode, OBSERVABLES, parse_circuit,
                 serialize_circuit)
from .render import render_ascii
from .unroll import (UNROLL_GATE_CAP, backward_light_cone, circuit_stats,
                     unroll_and_validate, unrolled_ir)

__all__ = [
    "CircuitError", "DocumentError", "ExprError", "UnrollError",
    "CircuitIR", "FlatCircuit", "FlatGate", "FlatMeasurement",
    "GateNode", "LoopNode", "MeasureNode", "GATE_SPECS", "OBSERVABLES",
    "parse_circuit", "serialize_circuit", "render_ascii",
    "unroll_and_validate", "circuit_stats", "backward_light_cone",
    "unrolled_ir", "UNROLL_GATE_CAP",
]
