"""Tool schemas and the system prompt shown to the design agent.

Each training tool's description doubles as its manual: the fixed
network around the circuit, the rules a submission must satisfy, the
returned metrics, and one complete example document.  The example
circuits below are also exercised by the test suite, so they are
guaranteed to parse, validate and train.
"""

from __future__ import annotations

import json

from ..train_tools import ToolError, ToolRequest
from .types import ToolSchema

SYSTEM_PROMPT_VERSION = "1"

# ---------------------------------------------------------------------------
# Example circuit documents (one per architecture)

SIMPLE_EXAMPLE_CIRCUIT = {
    "n_qubits": 9,
    "weights_shape": [9, 2],
    "body": [
        {"for": "i", "range": [0, 9], "body": [
            {"gate": "RX", "wires": ["i"], "angle": "inputs[i]"},
            {"gate": "RY", "wires": ["i"], "angle": "weights[i, 0]"},
            {"gate": "RZ", "wires": ["i"], "angle": "weights[i, 1]"},
        ], "comment": "one rotation block per qubit"},
        {"for": "i", "range": [0, 9], "body": [
            {"gate": "CNOT", "wires": ["i", "(i + 1) % 9"]},
        ], "comment": "entangling ring"},
    ],
    "measurements": [
        {"for": "i", "range": [0, 9], "body": [{"observable": "PauliZ", "wire": "i"}]},
    ],
}

QUANV_EXAMPLE_CIRCUIT = {
    "n_qubits": 5,
    "weights_shape": [1, 5, 3],
    "body": [
        {"for": "i", "range": [0, 5], "body": [
            {"gate": "RY", "wires": ["i"], "angle": "inputs[i]"},
        ]},
        {"for": "l", "range": [0, 1], "body": [
            {"for": "i", "range": [0, 5], "body": [
                {"gate": "ROT", "wires": ["i"],
                 "angles": ["weights[l, i, 0]", "weights[l, i, 1]", "weights[l, i, 2]"]},
            ]},
            {"for": "i", "range": [0, 5], "body": [
                {"gate": "CNOT", "wires": ["i", "(i + 1) % 5"]},
            ]},
        ]},
    ],
    "measurements": [
        {"for": "rep", "range": [0, 2], "body": [
            {"for": "i", "range": [0, 5], "body": [{"observable": "PauliZ", "wire": "i"}]},
        ], "comment": "each qubit read twice: 10 output channels"},
    ],
}

FULL_QUANTUM_EXAMPLE_CIRCUIT = {
    "n_qubits": 4,
    "weights_shape": [2, 9, 2],
    "body": [
        {"for": "w", "range": [1, 4], "body": [{"gate": "H", "wires": ["w"]}],
         "comment": "hidden qubits start in superposition"},
        {"for": "t", "range": [0, 21], "body": [
            {"gate": "RY", "wires": [0], "angle": "inputs[t]",
             "comment": "upload one data point per step onto the input qubit"},
            {"for": "l", "range": [0, 2], "body": [
                {"for": "w", "range": [0, 4], "body": [
                    {"gate": "RY", "wires": ["w"], "angle": "weights[l, w, 0]"},
                    {"gate": "RZ", "wires": ["w"], "angle": "weights[l, w, 1]"},
                ]},
                {"for": "w", "range": [0, 3], "body": [
                    {"gate": "CNOT", "wires": ["w", "w + 1"]},
                ]},
                {"gate": "CNOT", "wires": [3, 0]},
            ], "comment": "recurrent cell with shared parameters"},
        ]},
    ],
    "measurements": [
        {"for": "w", "range": [1, 4], "body": [{"observable": "PauliZ", "wire": "w"}]},
    ],
}

# ---------------------------------------------------------------------------
# Shared document-format primer embedded in every tool description

_FORMAT_RULES = """\
Circuit document format (JSON):
- Top-level keys: "n_qubits" (int), "weights_shape" (list of positive ints),
  "body" (list of nodes), "measurements" (list of nodes).
- Gate node: {"gate": KIND, "wires": [...], "angle": EXPR} where KIND is one of
  H, X (no angle), RX, RY, RZ (one angle), ROT (key "angles" with exactly three
  entries), CNOT, CZ (two distinct wires, no angle). No other gate exists; write
  entanglement patterns explicitly out of CNOT/CZ.
- Loop node: {"for": "i", "range": [start, stop, step], "body": [...]} expands
  like a counting loop (stop excluded; step optional, default 1). Loops nest and
  may also appear inside "measurements".
- Measurement node: {"observable": "PauliZ"|"PauliX"|"PauliY", "wire": EXPR}.
  The number of measurements after loop expansion must equal the declared
  output size.
- EXPR is an integer or a string over + - * / // % with parentheses, the
  constant pi, loop variables, and inputs[...] / weights[...] subscripts
  (weights take as many subscripts as weights_shape has dimensions). Wire and
  subscript expressions must resolve to in-range integers.
- A "comment" key on any node is ignored, as is a bare {"comment": "..."} node.

Keep circuits below 10 qubits (hard cap 12); larger registers train very
slowly. Inputs arrive already scaled to [0, pi]."""

_RETURN_FIELDS = """\
Returns a JSON object:
- test_RMSE (float): test root mean squared error after training.
- val_RMSE_history (list[float]): validation RMSE after each epoch.
- train_RMSE_last_batch (float): training RMSE of the final minibatch.
- n_gates_in_VQC (int): gate count of the expanded circuit.
- n_trainable_params_total (int): trainable parameters in the whole model.
- n_trainable_params_VQC (int): trainable parameters in the circuit.
- circuit_depth (int): longest gate chain in the wire-dependency order.
- wall_time (float): training wall-clock seconds.
On any failure you instead receive the error message; fix the document and
try again."""


def _doc(example: dict) -> str:
    return json.dumps(example, indent=2)


SIMPLE_TOOL_DESCRIPTION = f"""\
Train a simple hybrid regressor built around your circuit:
- a linear layer maps the 21-point input to q_enc_size values, scaled to [0, pi];
- your circuit consumes those q_enc_size values as inputs[0..q_enc_size-1] and
  produces q_out_size measurements;
- a final linear layer maps the q_out_size measurements to one output with a
  sigmoid, so predictions lie in [0, 1].
The data are noisy single-peak curves of 21 points; the target is the peak
position scaled to [0, 1]. Dataset, optimizer and training loop are fixed; the
tool runs the full training and reports metrics.

Rules for the circuit:
- the input size is q_enc_size: using fewer inputs is allowed, but then you
  could also shrink q_enc_size;
- any number of qubits (usually n_qubits = q_enc_size, but any encoding is
  fine); the output size q_out_size must equal the number of measurements.

{_FORMAT_RULES}

{_RETURN_FIELDS}

Example document (q_enc_size=9, q_out_size=9, weights_shape=[9, 2]):
{_doc(SIMPLE_EXAMPLE_CIRCUIT)}"""

QUANV_TOOL_DESCRIPTION = f"""\
Train a quanvolutional regressor built around your circuit:
- a window of kernel_size points slides over the 21-point input with the given
  stride; each window (scaled to [0, pi]) is fed to your circuit;
- the circuit's vqc_output_dim measurements per window form the channels of a
  feature map of shape (vqc_output_dim, number_of_windows);
- a residual block of two 1-D convolutions (kernel 3), adaptive average
  pooling over the window axis, and a 10-5-1 fully connected head with leaky
  ReLUs and a final sigmoid produce the prediction in [0, 1].
The data are noisy single-peak curves of 21 points; the target is the peak
position scaled to [0, 1]. Dataset, optimizer and training loop are fixed.

Rules for the circuit:
- inputs[0..kernel_size-1] hold one window, so the circuit must accept
  kernel_size input values (usually kernel_size = n_qubits, but any encoding
  works);
- the number of measurements after loop expansion must equal vqc_output_dim.

{_FORMAT_RULES}

{_RETURN_FIELDS}

Example document (kernel_size=5, stride=2, vqc_output_dim=10,
weights_shape=[1, 5, 3]):
{_doc(QUANV_EXAMPLE_CIRCUIT)}"""

FULL_QUANTUM_TOOL_DESCRIPTION = f"""\
Train a fully quantum regressor built around your circuit:
- the whole 21-point input (scaled to [0, pi]) goes straight into your
  circuit as inputs[0..20];
- a final linear layer maps your q_out_size measurements to one output with a
  sigmoid, so predictions lie in [0, 1].
The data are noisy single-peak curves of 21 points; the target is the peak
position scaled to [0, 1]. Dataset, optimizer and training loop are fixed.

Rules for the circuit:
- all 21 inputs are available; you do not have to use every one, but it is
  recommended. With fewer qubits than inputs you need an encoding strategy
  that brings 21 values into the register (for example uploading them one per
  time step onto a data qubit that interacts with hidden qubits);
- the output size q_out_size must equal the number of measurements.

{_FORMAT_RULES}

{_RETURN_FIELDS}

Example document (q_out_size=3, weights_shape=[2, 9, 2]; note this example
deliberately leaves some weights unused, which is allowed but wasteful - it
runs and learns a little, but is not good):
{_doc(FULL_QUANTUM_EXAMPLE_CIRCUIT)}"""


def _shape_param():
    return {"type": "array", "items": {"type": "integer", "minimum": 1},
            "description": "shape of the trainable circuit weights; must match "
                           "the document's weights_shape if both are given"}


def _circuit_param():
    return {"type": ["object", "string"],
            "description": "the circuit document (JSON object, or the same "
                           "JSON as a string)"}


TOOL_SCHEMAS = {
    "simple": ToolSchema(
        name="train_simple_qnn",
        variant="simple",
        description=SIMPLE_TOOL_DESCRIPTION,
        parameters={
            "type": "object",
            "properties": {
                "circuit": _circuit_param(),
                "weights_shape": _shape_param(),
                "q_enc_size": {"type": "integer", "minimum": 1,
                               "description": "inputs the circuit sees"},
                "q_out_size": {"type": "integer", "minimum": 1,
                               "description": "measurement count"},
                "epochs": {"type": "integer", "minimum": 1},
            },
            "required": ["circuit", "q_enc_size", "q_out_size", "epochs"],
        }),
    "quanv": ToolSchema(
        name="train_quanv_qnn",
        variant="quanv",
        description=QUANV_TOOL_DESCRIPTION,
        parameters={
            "type": "object",
            "properties": {
                "circuit": _circuit_param(),
                "weights_shape": _shape_param(),
                "kernel_size": {"type": "integer", "minimum": 1, "maximum": 21,
                                "description": "sliding window length"},
                "stride": {"type": "integer", "minimum": 1},
                "vqc_output_dim": {"type": "integer", "minimum": 1,
                                   "description": "measurements per window"},
                "epochs": {"type": "integer", "minimum": 1},
            },
            "required": ["circuit", "kernel_size", "stride", "vqc_output_dim",
                         "epochs"],
        }),
    "full_quantum": ToolSchema(
        name="train_full_quantum_qnn",
        variant="full_quantum",
        description=FULL_QUANTUM_TOOL_DESCRIPTION,
        parameters={
            "type": "object",
            "properties": {
                "circuit": _circuit_param(),
                "weights_shape": _shape_param(),
                "q_out_size": {"type": "integer", "minimum": 1,
                               "description": "measurement count"},
                "epochs": {"type": "integer", "minimum": 1},
            },
            "required": ["circuit", "q_out_size", "epochs"],
        }),
}

SCHEMA_BY_TOOL_NAME = {schema.name: schema for schema in TOOL_SCHEMAS.values()}


def tool_request_from_call(name: str, arguments: dict) -> ToolRequest:
    """Map tool-call arguments onto a ToolRequest.

    Failures are validate-phase errors fed straight back to the agent;
    the mapping is deterministic so logged raw calls replay identically.
    """
    schema = SCHEMA_BY_TOOL_NAME.get(name)
    if schema is None:
        raise ToolError("validate",
                        f"unknown tool {name!r}; available: "
                        f"{', '.join(sorted(SCHEMA_BY_TOOL_NAME))}")
    args = dict(arguments)
    circuit = args.pop("circuit", None)
    if circuit is None:
        raise ToolError("validate", "missing required argument 'circuit'")
    document = json.dumps(circuit) if isinstance(circuit, dict) else str(circuit)
    known = set(schema.parameters["properties"]) - {"circuit"}
    unknown = set(args) - known
    if unknown:
        raise ToolError("validate",
                        f"unknown argument(s) {sorted(unknown)} for {name}; "
                        f"this tool takes: circuit, {', '.join(sorted(known))}")
    shape = args.pop("weights_shape", None)
    return ToolRequest(variant=schema.variant, circuit_document=document,
                       epochs=args.pop("epochs", 0),
                       weights_shape=tuple(shape) if shape is not None else None,
                       **args)


def system_prompt(architecture: str) -> str:
    schema = TOOL_SCHEMAS[architecture]
    return f"""\
You are a quantum circuit designer improving a regression model through
iterative experiments. One training tool is available: {schema.name}. Use it
to submit candidate circuits; every call trains the full model from scratch
and returns its metrics.

Ground rules:
1. Submit circuits only as documents in the JSON format the tool describes.
2. Respect the dimensionality constraints: the declared output size must equal
   the circuit's measurement count, and input subscripts must stay within the
   declared input size.
3. Only the documented gate vocabulary exists (H, X, RX, RY, RZ, ROT, CNOT,
   CZ); there are no gate templates or imports, so spell out every pattern.
4. Favour small but expressive circuits: stay below 10 qubits.
5. Make exactly one tool call per design iteration and adjust your next design
   based on the returned metrics. If a call fails, the error message tells you
   what to fix; correct the document and retry.
6. When you decide to stop, or once your iteration budget is spent, reply with
   a plain message whose first line starts with "DONE:" followed by a short
   summary of your best design.

(prompt version {SYSTEM_PROMPT_VERSION})"""
