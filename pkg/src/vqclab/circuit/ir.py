"""Circuit description language: node types, JSON parsing, serialization.

A circuit document is UTF-8 JSON with four top-level keys::

    {
      "n_qubits": 5,
      "weights_shape": [5],
      "body": [
        {"for": "i", "range": [0, 5], "body": [
          {"gate": "RY", "wires": ["i"], "angle": "inputs[i]"}
        ]},
        {"gate": "CNOT", "wires": [0, 1]}
      ],
      "measurements": [
        {"for": "i", "range": [0, 5], "body": [{"observable": "PauliZ", "wire": "i"}]}
      ]
    }

Gate vocabulary is closed: H, X (no angles), RX, RY, RZ (one angle),
ROT (three angles, key ``"angles"``), CNOT, CZ (two wires, no angles).
Wire entries, range entries and angles may be integers (angles also
floats) or expression strings; see :mod:`vqclab.circuit.exprs` for the
grammar.  Loops nest arbitrarily in both ``body`` and ``measurements``.
A ``"comment"`` key on any node is ignored, and a ``{"comment": ...}``
object on its own is skipped entirely.

Parsing checks document shape, vocabulary and arity only; index
resolution, bounds and measurement counts are the unroller's job.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import exprs
from .errors import DocumentError, ExprError

# kind -> (n_wires, n_angles)
GATE_SPECS = {
    "H": (1, 0),
    "X": (1, 0),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "ROT": (1, 3),
    "CNOT": (2, 0),
    "CZ": (2, 0),
}

OBSERVABLES = ("PauliX", "PauliY", "PauliZ")

MAX_QUBITS = 12
SLOW_QUBIT_THRESHOLD = 10


@dataclass(frozen=True)
class GateNode:
    kind: str
    wires: tuple  # IndexExpr per wire
    angles: tuple  # AngleExpr per angle


@dataclass(frozen=True)
class LoopNode:
    var: str
    start: object
    stop: object
    step: object
    body: tuple  # GateNode | LoopNode | MeasureNode


@dataclass(frozen=True)
class MeasureNode:
    observable: str
    wire: object


@dataclass(frozen=True)
class CircuitIR:
    n_qubits: int
    weights_shape: tuple | None
    body: tuple
    measurements: tuple

    def with_weights_shape(self, shape) -> "CircuitIR":
        return CircuitIR(self.n_qubits, tuple(int(s) for s in shape), self.body,
                         self.measurements)


@dataclass(frozen=True)
class FlatGate:
    kind: str
    wires: tuple  # concrete ints
    angles: tuple  # resolved AngleExpr trees (loop variables substituted)


@dataclass(frozen=True)
class FlatMeasurement:
    observable: str
    wire: int


@dataclass
class FlatCircuit:
    n_qubits: int
    n_inputs: int
    weights_shape: tuple
    gates: list
    measurements: list
    warnings: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing


def parse_circuit(document: str) -> CircuitIR:
    """Parse a JSON circuit document into its tree form.

    Raises :class:`DocumentError` (with a path into the document) or
    :class:`ExprError` for bad embedded expressions.  The error message
    is the agent's only feedback, so it names the offending token.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", line=exc.lineno, col=exc.colno) from None
    if not isinstance(raw, dict):
        raise DocumentError("circuit document must be a JSON object")

    known = {"n_qubits", "weights_shape", "body", "measurements", "comment"}
    for key in raw:
        if key not in known:
            raise DocumentError(f"unknown top-level key {key!r}")

    n_qubits = raw.get("n_qubits")
    if not isinstance(n_qubits, int) or isinstance(n_qubits, bool) or n_qubits < 1:
        raise DocumentError("'n_qubits' must be a positive integer")
    if n_qubits > MAX_QUBITS:
        raise DocumentError(f"'n_qubits' is {n_qubits}; the simulator caps circuits "
                            f"at {MAX_QUBITS} qubits")

    shape = raw.get("weights_shape")
    if shape is not None:
        if (not isinstance(shape, list) or not shape
                or any(not isinstance(s, int) or isinstance(s, bool) or s < 1 for s in shape)):
            raise DocumentError("'weights_shape' must be a non-empty list of positive integers")
        shape = tuple(shape)

    body = _parse_nodes(raw.get("body", []), "body", _parse_gate)
    meas = _parse_nodes(raw.get("measurements", []), "measurements", _parse_measurement)
    return CircuitIR(n_qubits=n_qubits, weights_shape=shape, body=body, measurements=meas)


def _parse_nodes(items, path: str, leaf_parser) -> tuple:
    if not isinstance(items, list):
        raise DocumentError("expected a list of nodes", path)
    nodes = []
    for k, item in enumerate(items):
        here = f"{path}[{k}]"
        if not isinstance(item, dict):
            raise DocumentError("each node must be a JSON object", here)
        keys = set(item) - {"comment"}
        if not keys:
            continue  # standalone comment node
        if "for" in item:
            nodes.append(_parse_loop(item, here, leaf_parser))
        else:
            nodes.append(leaf_parser(item, here))
    return tuple(nodes)


def _parse_loop(item, path: str, leaf_parser) -> LoopNode:
    extra = set(item) - {"for", "range", "body", "comment"}
    if extra:
        raise DocumentError(f"unknown loop key(s) {sorted(extra)}", path)
    var = item["for"]
    if not isinstance(var, str) or not var.isidentifier():
        raise DocumentError(f"loop variable must be an identifier, got {var!r}", path)
    if var in ("pi", "inputs", "weights"):
        raise DocumentError(f"{var!r} is reserved and cannot be a loop variable", path)
    rng = item.get("range")
    if not isinstance(rng, list) or len(rng) not in (2, 3):
        raise DocumentError("'range' must be [start, stop] or [start, stop, step]", path)
    start = _parse_index_entry(rng[0], f"{path}.range[0]")
    stop = _parse_index_entry(rng[1], f"{path}.range[1]")
    step = (_parse_index_entry(rng[2], f"{path}.range[2]") if len(rng) == 3
            else exprs.Num(1.0, is_int=True))
    body = _parse_nodes(item.get("body", []), f"{path}.body", leaf_parser)
    return LoopNode(var=var, start=start, stop=stop, step=step, body=body)


def _parse_gate(item, path: str) -> GateNode:
    kind = item.get("gate")
    if kind is None:
        raise DocumentError("node is neither a gate ('gate'), a loop ('for') "
                            "nor a comment", path)
    if kind not in GATE_SPECS:
        raise DocumentError(
            f"unknown gate {kind!r}; the vocabulary is {', '.join(sorted(GATE_SPECS))}", path)
    extra = set(item) - {"gate", "wires", "angle", "angles", "comment"}
    if extra:
        raise DocumentError(f"unknown gate key(s) {sorted(extra)}", path)

    n_wires, n_angles = GATE_SPECS[kind]
    wires = item.get("wires")
    if not isinstance(wires, list) or len(wires) != n_wires:
        raise DocumentError(f"{kind} takes exactly {n_wires} wire(s)", path)
    wire_exprs = tuple(_parse_index_entry(w, f"{path}.wires[{i}]")
                       for i, w in enumerate(wires))

    if "angle" in item and "angles" in item:
        raise DocumentError("give either 'angle' or 'angles', not both", path)
    raw_angles = item.get("angles", [item["angle"]] if "angle" in item else [])
    if not isinstance(raw_angles, list):
        raise DocumentError("'angles' must be a list", path)
    if len(raw_angles) != n_angles:
        raise DocumentError(
            f"{kind} takes exactly {n_angles} angle(s), got {len(raw_angles)}", path)
    angles = tuple(_parse_angle_entry(a, f"{path}.angles[{i}]")
                   for i, a in enumerate(raw_angles))
    return GateNode(kind=kind, wires=wire_exprs, angles=angles)


def _parse_measurement(item, path: str) -> MeasureNode:
    extra = set(item) - {"observable", "wire", "comment"}
    if extra:
        raise DocumentError(f"unknown measurement key(s) {sorted(extra)}", path)
    obs = item.get("observable")
    if obs not in OBSERVABLES:
        raise DocumentError(
            f"unknown observable {obs!r}; choose one of {', '.join(OBSERVABLES)}", path)
    if "wire" not in item:
        raise DocumentError("measurement needs a 'wire'", path)
    return MeasureNode(observable=obs, wire=_parse_index_entry(item["wire"], f"{path}.wire"))


def _parse_index_entry(value, path: str):
    if isinstance(value, bool):
        raise DocumentError("booleans are not valid indices", path)
    if isinstance(value, int):
        return exprs.Num(float(value), is_int=True) if value >= 0 else exprs.Neg(
            exprs.Num(float(-value), is_int=True))
    if isinstance(value, str):
        try:
            return exprs.parse_expr(value)
        except ExprError as exc:
            raise DocumentError(str(exc), path) from None
    raise DocumentError(f"index must be an integer or expression string, got {value!r}", path)


def _parse_angle_entry(value, path: str):
    if isinstance(value, bool):
        raise DocumentError("booleans are not valid angles", path)
    if isinstance(value, (int, float)):
        if isinstance(value, int):
            return (exprs.Num(float(value), is_int=True) if value >= 0
                    else exprs.Neg(exprs.Num(float(-value), is_int=True)))
        return (exprs.Num(float(value), is_int=False) if value >= 0
                else exprs.Neg(exprs.Num(float(-value), is_int=False)))
    if isinstance(value, str):
        try:
            return exprs.parse_expr(value)
        except ExprError as exc:
            raise DocumentError(str(exc), path) from None
    raise DocumentError(f"angle must be a number or expression string, got {value!r}", path)


# ---------------------------------------------------------------------------
# Serialization (inverse of parse_circuit; round-trips structurally)


def serialize_circuit(ir: CircuitIR, indent: int = 2) -> str:
    doc = {"n_qubits": ir.n_qubits}
    if ir.weights_shape is not None:
        doc["weights_shape"] = list(ir.weights_shape)
    doc["body"] = [_node_to_json(n) for n in ir.body]
    doc["measurements"] = [_node_to_json(n) for n in ir.measurements]
    return json.dumps(doc, indent=indent)


def _node_to_json(node):
    if isinstance(node, LoopNode):
        return {
            "for": node.var,
            "range": [exprs.render(node.start), exprs.render(node.stop),
                      exprs.render(node.step)],
            "body": [_node_to_json(n) for n in node.body],
        }
    if isinstance(node, GateNode):
        out = {"gate": node.kind, "wires": [exprs.render(w) for w in node.wires]}
        if len(node.angles) == 1:
            out["angle"] = exprs.render(node.angles[0])
        elif node.angles:
            out["angles"] = [exprs.render(a) for a in node.angles]
        return out
    if isinstance(node, MeasureNode):
        return {"observable": node.observable, "wire": exprs.render(node.wire)}
    raise TypeError(f"not a circuit node: {node!r}")
