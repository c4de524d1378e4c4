"""Independent oracles the simulator and gradient tests check against.

Everything here recomputes results by a different route than the code
under test: dense Kronecker-product unitaries for expectations, central
finite differences and the parameter-shift rule for gradients.
"""

from __future__ import annotations

import json

import numpy as np

from vqclab.circuit import parse_circuit, unroll_and_validate
from vqclab.simulator import simulate_expectations

_I = np.eye(2, dtype=complex)
_PAULI = {
    "PauliX": np.array([[0, 1], [1, 0]], dtype=complex),
    "PauliY": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "PauliZ": np.array([[1, 0], [0, -1]], dtype=complex),
}
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _embed(factors: dict, n: int) -> np.ndarray:
    """Kronecker product with qubit 0 as the leftmost (most significant) factor."""
    out = np.array([[1.0 + 0j]])
    for q in range(n):
        out = np.kron(out, factors.get(q, _I))
    return out


def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    e = np.exp(-0.5j * t)
    return np.array([[e, 0], [0, np.conj(e)]])


def _matrix_1q(kind: str, angles):
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    if kind == "X":
        return _PAULI["PauliX"]
    if kind == "RX":
        return _rx(angles[0])
    if kind == "RY":
        return _ry(angles[0])
    if kind == "RZ":
        return _rz(angles[0])
    if kind == "ROT":
        a, b, c = angles
        return _rz(a) @ _ry(b) @ _rz(c)
    raise ValueError(kind)


def dense_expectations(fc, inputs, weights) -> np.ndarray:
    """Expectations via one dense 2^n x 2^n matrix per gate."""
    from vqclab.circuit import exprs

    n = fc.n_qubits
    state = np.zeros(2 ** n, dtype=complex)
    state[0] = 1.0
    for gate in fc.gates:
        angles = [exprs.angle_value(a, inputs, weights) for a in gate.angles]
        if len(gate.wires) == 1:
            full = _embed({gate.wires[0]: _matrix_1q(gate.kind, angles)}, n)
        elif gate.kind == "CNOT":
            c, t = gate.wires
            full = _embed({c: _P0}, n) + _embed({c: _P1, t: _PAULI["PauliX"]}, n)
        else:  # CZ
            c, t = gate.wires
            full = _embed({c: _P0}, n) + _embed({c: _P1, t: _PAULI["PauliZ"]}, n)
        state = full @ state
    out = []
    for meas in fc.measurements:
        obs = _embed({meas.wire: _PAULI[meas.observable]}, n)
        out.append(float(np.real(np.conj(state) @ obs @ state)))
    return np.array(out)


def loss(fc, inputs, weights, upstream) -> float:
    return float(np.dot(upstream, simulate_expectations(fc, inputs, weights)))


def finite_difference_grads(fc, inputs, weights, upstream, h: float = 1e-6):
    """Central differences of the upstream-weighted expectation sum."""
    inputs = np.asarray(inputs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    d_inputs = np.zeros_like(inputs)
    for i in range(inputs.size):
        plus, minus = inputs.copy(), inputs.copy()
        plus[i] += h
        minus[i] -= h
        d_inputs[i] = (loss(fc, plus, weights, upstream)
                       - loss(fc, minus, weights, upstream)) / (2 * h)
    d_weights = np.zeros_like(weights)
    flat = d_weights.reshape(-1)
    wflat = weights.reshape(-1)
    for i in range(wflat.size):
        plus, minus = wflat.copy(), wflat.copy()
        plus[i] += h
        minus[i] -= h
        flat[i] = (loss(fc, inputs, plus.reshape(weights.shape), upstream)
                   - loss(fc, inputs, minus.reshape(weights.shape), upstream)) / (2 * h)
    return d_weights, d_inputs


def parameter_shift_grads(fc, inputs, weights, upstream):
    """Exact rotation-gate gradients via +-pi/2 evaluations.

    Valid when every weight entry feeds exactly one rotation angle as a
    bare ``weights[...]`` reference.
    """
    weights = np.asarray(weights, dtype=float)
    d_weights = np.zeros_like(weights)
    flat = d_weights.reshape(-1)
    wflat = weights.reshape(-1)
    for i in range(wflat.size):
        plus, minus = wflat.copy(), wflat.copy()
        plus[i] += np.pi / 2
        minus[i] -= np.pi / 2
        flat[i] = (loss(fc, inputs, plus.reshape(weights.shape), upstream)
                   - loss(fc, inputs, minus.reshape(weights.shape), upstream)) / 2.0
    return d_weights


def assert_close_fd(actual, expected, tol: float, floor: float = 0.1):
    """|actual - expected| <= tol * max(|expected|, floor), elementwise."""
    actual = np.asarray(actual, dtype=float)
    expected = np.asarray(expected, dtype=float)
    bound = tol * np.maximum(np.abs(expected), floor)
    gap = np.abs(actual - expected)
    assert np.all(gap <= bound), f"max gap {gap.max()} exceeds bound {bound.min()}"


# ---------------------------------------------------------------------------
# Random circuit generation (documents, so the whole front end is exercised)

GATE_POOL = ("H", "X", "RX", "RY", "RZ", "ROT", "CNOT", "CZ")
OBS_POOL = ("PauliX", "PauliY", "PauliZ")


def random_circuit_doc(rng: np.random.Generator, n_qubits: int, n_gates: int,
                       n_inputs: int, n_weights: int,
                       angle_style: str = "mixed"):
    """Returns (document json, n_inputs, q_out).

    ``angle_style``:
      * "mixed": angles drawn from literals, inputs/weights refs, and
        scaled refs (the general case);
      * "one_rotation_per_weight": weight k appears as the bare angle of
        rotation gate k (parameter-shift territory); other angles are
        literals.
    """
    body = []
    weight_cursor = 0

    def make_angle():
        nonlocal weight_cursor
        if angle_style == "one_rotation_per_weight":
            if weight_cursor < n_weights:
                text = f"weights[{weight_cursor}]"
                weight_cursor += 1
                return text
            return repr(float(rng.uniform(-np.pi, np.pi)))
        choice = rng.integers(0, 5)
        if choice == 0:
            return repr(float(rng.uniform(-np.pi, np.pi)))
        if choice == 1:
            return f"inputs[{rng.integers(0, n_inputs)}]"
        if choice == 2:
            return f"weights[{rng.integers(0, n_weights)}]"
        if choice == 3:
            return (f"weights[{rng.integers(0, n_weights)}] * "
                    f"{float(rng.uniform(0.2, 1.5))!r}")
        return (f"inputs[{rng.integers(0, n_inputs)}] * "
                f"{float(rng.uniform(0.2, 1.5))!r} + "
                f"weights[{rng.integers(0, n_weights)}]")

    pool = GATE_POOL if n_qubits > 1 else tuple(
        g for g in GATE_POOL if g not in ("CNOT", "CZ"))
    for _ in range(n_gates):
        kind = pool[rng.integers(0, len(pool))]
        if kind in ("CNOT", "CZ"):
            w0, w1 = rng.choice(n_qubits, size=2, replace=False)
            body.append({"gate": kind, "wires": [int(w0), int(w1)]})
        elif kind in ("H", "X"):
            body.append({"gate": kind, "wires": [int(rng.integers(0, n_qubits))]})
        elif kind == "ROT":
            body.append({"gate": kind, "wires": [int(rng.integers(0, n_qubits))],
                         "angles": [make_angle() for _ in range(3)]})
        else:
            body.append({"gate": kind, "wires": [int(rng.integers(0, n_qubits))],
                         "angle": make_angle()})
    q_out = int(rng.integers(1, n_qubits + 1))
    measurements = [{"observable": OBS_POOL[rng.integers(0, 3)],
                     "wire": int(rng.integers(0, n_qubits))}
                    for _ in range(q_out)]
    document = json.dumps({"n_qubits": n_qubits, "weights_shape": [n_weights],
                           "body": body, "measurements": measurements})
    return document, n_inputs, q_out


def random_flat_circuit(rng, n_qubits, n_gates, n_inputs, n_weights,
                        angle_style="mixed"):
    document, n_in, q_out = random_circuit_doc(rng, n_qubits, n_gates, n_inputs,
                                               n_weights, angle_style)
    return unroll_and_validate(parse_circuit(document), n_in, q_out)
