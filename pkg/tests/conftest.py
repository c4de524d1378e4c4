"""Shared fixtures: reference circuit documents and a cached dataset."""

from __future__ import annotations

import json

import pytest

from vqclab.dataset import generate_splits

MASTER_SEED = 42

# The minimal five-qubit starter design: one RY data-encoding layer, one
# trainable RY layer, Z readout on every wire.  10 gates, 5 circuit
# parameters, 121 model parameters in the simple architecture.
ITER1_CIRCUIT = {
    "n_qubits": 5,
    "weights_shape": [5],
    "body": [
        {"for": "i", "range": [0, 5], "body": [
            {"gate": "RY", "wires": ["i"], "angle": "inputs[i]"}]},
        {"for": "i", "range": [0, 5], "body": [
            {"gate": "RY", "wires": ["i"], "angle": "weights[i]"}]},
    ],
    "measurements": [
        {"for": "i", "range": [0, 5], "body": [{"observable": "PauliZ", "wire": "i"}]},
    ],
}

# The nine-qubit design that trains best over 20 epochs: five data qubits
# RY-encoded once, four computation qubits initialized with H, two rotation
# layers with different gates per group, star entanglement from qubit 0,
# data-to-computation links, a computation ring, a final RX layer, and Z
# readout of the data qubits only.  70 gates, 45 circuit parameters.
BEST_CIRCUIT = {
    "n_qubits": 9,
    "weights_shape": [9, 5],
    "body": [
        {"for": "i", "range": [5, 9], "body": [{"gate": "H", "wires": ["i"]}]},
        {"for": "i", "range": [0, 5], "body": [
            {"gate": "RY", "wires": ["i"], "angle": "inputs[i]"}]},
        {"for": "i", "range": [0, 9], "body": [
            {"gate": "RX", "wires": ["i"], "angle": "weights[i, 0]"},
            {"gate": "RY", "wires": ["i"], "angle": "weights[i, 1]"}]},
        {"for": "i", "range": [1, 9], "body": [{"gate": "CNOT", "wires": [0, "i"]}]},
        {"for": "i", "range": [0, 5], "body": [
            {"gate": "RZ", "wires": ["i"], "angle": "weights[i, 2]"},
            {"gate": "RY", "wires": ["i"], "angle": "weights[i, 3]"}]},
        {"for": "i", "range": [5, 9], "body": [
            {"gate": "RX", "wires": ["i"], "angle": "weights[i, 2]"},
            {"gate": "RZ", "wires": ["i"], "angle": "weights[i, 3]"}]},
        {"for": "i", "range": [0, 4], "body": [
            {"gate": "CNOT", "wires": ["i", "i + 5"]}]},
        {"for": "i", "range": [0, 4], "body": [
            {"gate": "CNOT", "wires": ["5 + i", "5 + (i + 1) % 4"]}]},
        {"for": "i", "range": [0, 9], "body": [
            {"gate": "RX", "wires": ["i"], "angle": "weights[i, 4]"}]},
    ],
    "measurements": [
        {"for": "i", "range": [0, 5], "body": [{"observable": "PauliZ", "wire": "i"}]},
    ],
}


def doc(circuit: dict) -> str:
    return json.dumps(circuit)


@pytest.fixture(scope="session")
def splits():
    return generate_splits(MASTER_SEED)


@pytest.fixture()
def iter1_doc():
    return doc(ITER1_CIRCUIT)


@pytest.fixture()
def best_doc():
    return doc(BEST_CIRCUIT)
