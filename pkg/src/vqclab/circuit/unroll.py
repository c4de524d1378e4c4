"""Loop expansion, index resolution and semantic validation.

``unroll_and_validate`` turns a parsed :class:`CircuitIR` into a
:class:`FlatCircuit`: loops expanded, every wire index a concrete
integer, every ``inputs``/``weights`` subscript resolved and
bounds-checked.  All failures raise :class:`UnrollError` carrying the
offending construct so the agent can fix its document.
"""

from __future__ import annotations

from . import exprs
from .errors import ExprError, UnrollError
from .ir import (CircuitIR, FlatCircuit, FlatGate, FlatMeasurement, GateNode,
                 LoopNode, MeasureNode, SLOW_QUBIT_THRESHOLD)

UNROLL_GATE_CAP = 100_000


def unroll_and_validate(ir: CircuitIR, n_inputs: int, q_out: int | None) -> FlatCircuit:
    """Expand loops and check every index; returns the flat circuit.

    ``n_inputs`` bounds ``inputs[...]`` references, ``q_out`` is the
    required measurement count (``None`` skips that one check, for
    inspection tools that take the circuit as-is).
    """
    if ir.weights_shape is None:
        raise UnrollError("the circuit declares no 'weights_shape'")
    if n_inputs < 1:
        raise UnrollError(f"n_inputs must be positive, got {n_inputs}")
    if q_out is not None and q_out < 1:
        raise UnrollError(f"the declared output size must be positive, got {q_out}")

    fc = FlatCircuit(n_qubits=ir.n_qubits, n_inputs=n_inputs,
                     weights_shape=tuple(ir.weights_shape), gates=[], measurements=[])
    if ir.n_qubits >= SLOW_QUBIT_THRESHOLD:
        fc.warnings.append(
            f"circuit uses {ir.n_qubits} qubits; fewer than {SLOW_QUBIT_THRESHOLD} "
            "is recommended, otherwise training will be very slow")

    _expand(ir.body, {}, fc, measuring=False)
    _expand(ir.measurements, {}, fc, measuring=True)

    if q_out is not None and len(fc.measurements) != q_out:
        raise UnrollError(
            f"circuit produces {len(fc.measurements)} measurement(s) but the declared "
            f"output size is {q_out}; these must be equal")
    return fc


def _expand(nodes, bindings: dict, fc: FlatCircuit, measuring: bool) -> None:
    for node in nodes:
        if isinstance(node, LoopNode):
            _expand_loop(node, bindings, fc, measuring)
        elif isinstance(node, GateNode):
            _emit_gate(node, bindings, fc)
        elif isinstance(node, MeasureNode):
            _emit_measurement(node, bindings, fc)
        else:  # pragma: no cover - parser emits only the three node types
            raise UnrollError(f"unexpected node {node!r}")


def _expand_loop(node: LoopNode, bindings: dict, fc: FlatCircuit, measuring: bool) -> None:
    construct = _loop_header(node)
    try:
        start = exprs.eval_index(node.start, bindings, exprs.render(node.start))
        stop = exprs.eval_index(node.stop, bindings, exprs.render(node.stop))
        step = exprs.eval_index(node.step, bindings, exprs.render(node.step))
    except ExprError as exc:
        raise UnrollError(str(exc), construct) from None
    if step == 0:
        raise UnrollError("loop step must not be zero", construct)
    if node.var in bindings:
        raise UnrollError(f"loop variable {node.var!r} shadows an enclosing loop variable",
                          construct)
    for value in range(start, stop, step):
        inner = dict(bindings)
        inner[node.var] = value
        _expand(node.body, inner, fc, measuring)


def _emit_gate(node: GateNode, bindings: dict, fc: FlatCircuit) -> None:
    construct = _gate_text(node)
    if len(fc.gates) >= UNROLL_GATE_CAP:
        raise UnrollError(
            f"unroll cap exceeded: the circuit expands to more than {UNROLL_GATE_CAP} "
            "gates; reduce loop ranges", construct)

    wires = []
    for w in node.wires:
        try:
            idx = exprs.eval_index(w, bindings, exprs.render(w))
        except ExprError as exc:
            raise UnrollError(str(exc), construct) from None
        if not 0 <= idx < fc.n_qubits:
            raise UnrollError(
                f"wire index {idx} out of range for {fc.n_qubits} qubit(s)", construct)
        wires.append(idx)
    if len(wires) == 2 and wires[0] == wires[1]:
        raise UnrollError(
            f"{node.kind} needs two distinct wires, got [{wires[0]}, {wires[1]}]", construct)

    angles = tuple(_resolve_angle(a, bindings, construct, fc) for a in node.angles)
    fc.gates.append(FlatGate(kind=node.kind, wires=tuple(wires), angles=angles))


def _emit_measurement(node: MeasureNode, bindings: dict, fc: FlatCircuit) -> None:
    construct = f"measure {node.observable}({exprs.render(node.wire)})"
    try:
        wire = exprs.eval_index(node.wire, bindings, exprs.render(node.wire))
    except ExprError as exc:
        raise UnrollError(str(exc), construct) from None
    if not 0 <= wire < fc.n_qubits:
        raise UnrollError(
            f"measurement wire {wire} out of range for {fc.n_qubits} qubit(s)", construct)
    fc.measurements.append(FlatMeasurement(observable=node.observable, wire=wire))


def _resolve_angle(angle, bindings: dict, construct: str, fc: FlatCircuit):
    """Substitute loop variables and resolve subscripts to literal integers."""
    resolved = exprs.substitute(angle, bindings)
    return _check_angle(resolved, construct, fc)


def _check_angle(expr, construct: str, fc: FlatCircuit):
    if isinstance(expr, (exprs.Num, exprs.Pi)):
        return expr
    if isinstance(expr, exprs.Name):
        raise UnrollError(f"unbound variable {expr.ident!r} in angle expression", construct)
    if isinstance(expr, exprs.Neg):
        return exprs.Neg(_check_angle(expr.operand, construct, fc))
    if isinstance(expr, exprs.BinOp):
        if expr.op in ("//", "%"):
            raise UnrollError(
                f"operator {expr.op!r} is not allowed in angle expressions "
                "(only + - * /)", construct)
        left = _check_angle(expr.left, construct, fc)
        right = _check_angle(expr.right, construct, fc)
        if expr.op == "/" and exprs.const_value(right) == 0:
            raise UnrollError("division by zero in angle expression", construct)
        return exprs.BinOp(expr.op, left, right)
    if isinstance(expr, exprs.Ref):
        indices = []
        for ix in expr.indices:
            try:
                indices.append(exprs.eval_index(ix, {}, exprs.render(ix)))
            except ExprError as exc:
                raise UnrollError(str(exc), construct) from None
        if expr.base == "inputs":
            if len(indices) != 1:
                raise UnrollError(
                    f"'inputs' takes one index, got {len(indices)}", construct)
            if not 0 <= indices[0] < fc.n_inputs:
                raise UnrollError(
                    f"inputs[{indices[0]}] out of range; this circuit receives "
                    f"{fc.n_inputs} input value(s)", construct)
        else:
            shape = fc.weights_shape
            if len(indices) != len(shape):
                raise UnrollError(
                    f"'weights' has shape {list(shape)} (rank {len(shape)}) but was "
                    f"indexed with {len(indices)} subscript(s)", construct)
            for d, (ix, extent) in enumerate(zip(indices, shape)):
                if not 0 <= ix < extent:
                    raise UnrollError(
                        f"weights index {ix} out of range in dimension {d} "
                        f"(shape {list(shape)})", construct)
        literal = tuple(exprs.Num(float(i), is_int=True) for i in indices)
        return exprs.Ref(expr.base, literal)
    raise UnrollError(f"cannot resolve angle node {expr!r}", construct)


def _gate_text(node: GateNode) -> str:
    wires = ", ".join(exprs.render(w) for w in node.wires)
    if node.angles:
        angles = ", ".join(exprs.render(a) for a in node.angles)
        return f"{node.kind}({angles}) on wires [{wires}]"
    return f"{node.kind} on wires [{wires}]"


def _loop_header(node: LoopNode) -> str:
    return (f"for {node.var} in range({exprs.render(node.start)}, "
            f"{exprs.render(node.stop)}, {exprs.render(node.step)})")


# ---------------------------------------------------------------------------
# Statistics


def circuit_stats(fc: FlatCircuit):
    """Return (gate_count, depth, vqc_param_count) for a flat circuit.

    Depth is the longest chain in the wire-dependency DAG: a gate
    depends on the most recent earlier gate touching any of its wires.
    Measurements are not counted.
    """
    gate_count = len(fc.gates)
    front = [0] * fc.n_qubits
    depth = 0
    for gate in fc.gates:
        level = 1 + max(front[w] for w in gate.wires)
        for w in gate.wires:
            front[w] = level
        depth = max(depth, level)
    vqc_params = 1
    for extent in fc.weights_shape:
        vqc_params *= extent
    return gate_count, depth, vqc_params


def backward_light_cone(fc: FlatCircuit):
    """Keep-flags for gates that can influence any measured wire.

    Scans the gate list backwards keeping a live-wire set seeded from
    the measurement wires; a gate touching no live wire cannot affect
    any measurement and may be dropped without changing expectations.
    """
    live = {m.wire for m in fc.measurements}
    keep = [False] * len(fc.gates)
    for i in range(len(fc.gates) - 1, -1, -1):
        wires = fc.gates[i].wires
        if any(w in live for w in wires):
            keep[i] = True
            live.update(wires)
    return keep


def unrolled_ir(fc: FlatCircuit) -> CircuitIR:
    """Re-wrap a flat circuit as loop-free IR (used for idempotence checks)."""
    body = tuple(
        GateNode(kind=g.kind,
                 wires=tuple(exprs.Num(float(w), is_int=True) for w in g.wires),
                 angles=g.angles)
        for g in fc.gates)
    meas = tuple(
        MeasureNode(observable=m.observable, wire=exprs.Num(float(m.wire), is_int=True))
        for m in fc.measurements)
    return CircuitIR(n_qubits=fc.n_qubits, weights_shape=fc.weights_shape,
                     body=body, measurements=meas)


__all__ = ["unroll_and_validate", "circuit_stats", "backward_light_cone",
           "unrolled_ir", "UNROLL_GATE_CAP"]
