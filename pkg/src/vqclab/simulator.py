"""Noiseless statevector execution and adjoint-method gradients.

The register holds 2^n double-precision complex amplitudes with qubit 0
as the most significant index bit.  Expectations of single-qubit Pauli
observables are exact (no shot sampling).

Gradients with respect to gate angles are computed by the adjoint
method: one forward pass to the final state, then a reverse sweep that
undoes each gate on a ket and a bra simultaneously, costing O(gates)
regardless of parameter count.  The chain rule through each gate's
angle expression then accumulates into the ``inputs`` and ``weights``
buffers, so a value referenced by several gates (data re-uploading)
collects every contribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .circuit import FlatCircuit, FlatGate
from .circuit import exprs

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _rx(t: float) -> np.ndarray:
    c, s = cos(t / 2), sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t: float) -> np.ndarray:
    c, s = cos(t / 2), sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t: float) -> np.ndarray:
    e = np.exp(-0.5j * t)
    return np.array([[e, 0], [0, e.conjugate()]])


def _drx(t: float) -> np.ndarray:
    c, s = 0.5 * cos(t / 2), 0.5 * sin(t / 2)
    return np.array([[-s, -1j * c], [-1j * c, -s]])


def _dry(t: float) -> np.ndarray:
    c, s = 0.5 * cos(t / 2), 0.5 * sin(t / 2)
    return np.array([[-s, -c], [c, -s]], dtype=complex)


def _drz(t: float) -> np.ndarray:
    e = np.exp(-0.5j * t)
    return np.array([[-0.5j * e, 0], [0, 0.5j * e.conjugate()]])


def gate_matrix(kind: str, angles: tuple) -> np.ndarray:
    """2x2 matrix of a single-qubit gate; ROT(a, b, c) = RZ(a) @ RY(b) @ RZ(c)."""
    if kind == "H":
        return _H
    if kind == "X":
        return _X
    if kind == "RX":
        return _rx(angles[0])
    if kind == "RY":
        return _ry(angles[0])
    if kind == "RZ":
        return _rz(angles[0])
    if kind == "ROT":
        a, b, c = angles
        return _rz(a) @ _ry(b) @ _rz(c)
    raise ValueError(f"{kind} has no single-qubit matrix")


def _dmatrices(kind: str, angles: tuple):
    """Partial derivative of the gate matrix with respect to each angle."""
    if kind == "RX":
        return (_drx(angles[0]),)
    if kind == "RY":
        return (_dry(angles[0]),)
    if kind == "RZ":
        return (_drz(angles[0]),)
    if kind == "ROT":
        a, b, c = angles
        za, yb, zc = _rz(a), _ry(b), _rz(c)
        return (_drz(a) @ yb @ zc, za @ _dry(b) @ zc, za @ yb @ _drz(c))
    return ()


# ---------------------------------------------------------------------------
# State manipulation


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=np.complex128)
    state[0] = 1.0
    return state


def _apply_1q(state: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    s = state.reshape(1 << q, 2, -1)
    s0, s1 = s[:, 0, :], s[:, 1, :]
    out = np.empty_like(s)
    out[:, 0, :] = mat[0, 0] * s0 + mat[0, 1] * s1
    out[:, 1, :] = mat[1, 0] * s0 + mat[1, 1] * s1
    return out.reshape(-1)


def _apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    a, b = (control, target) if control < target else (target, control)
    s = state.reshape(1 << a, 2, 1 << (b - a - 1), 2, -1).copy()
    if control < target:
        tmp = s[:, 1, :, 0, :].copy()
        s[:, 1, :, 0, :] = s[:, 1, :, 1, :]
        s[:, 1, :, 1, :] = tmp
    else:
        tmp = s[:, 0, :, 1, :].copy()
        s[:, 0, :, 1, :] = s[:, 1, :, 1, :]
        s[:, 1, :, 1, :] = tmp
    return s.reshape(-1)


def _apply_cz(state: np.ndarray, w0: int, w1: int) -> np.ndarray:
    a, b = (w0, w1) if w0 < w1 else (w1, w0)
    s = state.reshape(1 << a, 2, 1 << (b - a - 1), 2, -1).copy()
    s[:, 1, :, 1, :] *= -1.0
    return s.reshape(-1)


def _apply_gate(state: np.ndarray, gate: FlatGate, angles: tuple) -> np.ndarray:
    if len(gate.wires) == 1:
        return _apply_1q(state, gate_matrix(gate.kind, angles), gate.wires[0])
    if gate.kind == "CNOT":
        return _apply_cnot(state, gate.wires[0], gate.wires[1])
    return _apply_cz(state, gate.wires[0], gate.wires[1])


def _apply_gate_adjoint(state: np.ndarray, gate: FlatGate, angles: tuple) -> np.ndarray:
    if len(gate.wires) == 1:
        return _apply_1q(state, gate_matrix(gate.kind, angles).conj().T, gate.wires[0])
    # CNOT and CZ are their own inverses.
    return _apply_gate(state, gate, angles)


def _apply_pauli(state: np.ndarray, observable: str, wire: int) -> np.ndarray:
    s = state.reshape(1 << wire, 2, -1)
    out = np.empty_like(s)
    if observable == "PauliX":
        out[:, 0, :] = s[:, 1, :]
        out[:, 1, :] = s[:, 0, :]
    elif observable == "PauliY":
        out[:, 0, :] = -1j * s[:, 1, :]
        out[:, 1, :] = 1j * s[:, 0, :]
    else:
        out[:, 0, :] = s[:, 0, :]
        out[:, 1, :] = -s[:, 1, :]
    return out.reshape(-1)


def _pauli_expectation(state: np.ndarray, observable: str, wire: int) -> float:
    s = state.reshape(1 << wire, 2, -1)
    s0, s1 = s[:, 0, :], s[:, 1, :]
    if observable == "PauliZ":
        return float(np.sum(np.abs(s0) ** 2) - np.sum(np.abs(s1) ** 2))
    cross = np.vdot(s0, s1)
    return float(2.0 * cross.real) if observable == "PauliX" else float(2.0 * cross.imag)


# ---------------------------------------------------------------------------
# Public API


@dataclass
class GradientResult:
    d_weights: np.ndarray  # matches weights_shape
    d_inputs: np.ndarray  # length n_inputs


def _angle_values(fc: FlatCircuit, inputs, weights):
    return [tuple(exprs.angle_value(a, inputs, weights) for a in g.angles)
            for g in fc.gates]


def run_statevector(fc: FlatCircuit, inputs, weights) -> np.ndarray:
    """Final state prepared from |0...0> (exposed for tests and tooling)."""
    values = _angle_values(fc, inputs, weights)
    state = zero_state(fc.n_qubits)
    for gate, angles in zip(fc.gates, values):
        state = _apply_gate(state, gate, angles)
    return state


def simulate_expectations(fc: FlatCircuit, inputs, weights) -> np.ndarray:
    """Expectation value of each measurement on the prepared state."""
    state = run_statevector(fc, inputs, weights)
    return np.array([_pauli_expectation(state, m.observable, m.wire)
                     for m in fc.measurements])


def adjoint_gradients(fc: FlatCircuit, inputs, weights, upstream) -> GradientResult:
    """Gradient of L = sum_k upstream[k] * <O_k> w.r.t. weights and inputs."""
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (len(fc.measurements),):
        raise ValueError(
            f"upstream has shape {upstream.shape}, expected ({len(fc.measurements)},)")
    values = _angle_values(fc, inputs, weights)

    ket = zero_state(fc.n_qubits)
    for gate, angles in zip(fc.gates, values):
        ket = _apply_gate(ket, gate, angles)

    bra = np.zeros_like(ket)
    for coeff, meas in zip(upstream, fc.measurements):
        if coeff != 0.0:
            bra += coeff * _apply_pauli(ket, meas.observable, meas.wire)

    d_inputs = np.zeros(fc.n_inputs)
    d_weights = np.zeros(fc.weights_shape)
    for gate, angles in zip(reversed(fc.gates), reversed(values)):
        ket = _apply_gate_adjoint(ket, gate, angles)
        if gate.angles:
            wire = gate.wires[0]
            for expr, dmat in zip(gate.angles, _dmatrices(gate.kind, angles)):
                raw = 2.0 * np.vdot(bra, _apply_1q(ket, dmat, wire)).real
                exprs.angle_grad(expr, inputs, weights, raw, d_inputs, d_weights)
        bra = _apply_gate_adjoint(bra, gate, angles)
    return GradientResult(d_weights=d_weights, d_inputs=d_inputs)
