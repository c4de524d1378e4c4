"""Statevector semantics against first principles and the dense oracle."""

import json

import numpy as np
import pytest

from vqclab.circuit import parse_circuit, unroll_and_validate
from vqclab.simulator import run_statevector, simulate_expectations

from oracles import dense_expectations, random_flat_circuit


def flat(circuit: dict, n_inputs=1, q_out=None):
    return unroll_and_validate(parse_circuit(json.dumps(circuit)), n_inputs, q_out)


def single_gate(kind, n_qubits=1, wires=(0,), angle=None, angles=None,
                observable="PauliZ", obs_wire=0):
    gate = {"gate": kind, "wires": list(wires)}
    if angle is not None:
        gate["angle"] = angle
    if angles is not None:
        gate["angles"] = angles
    return flat({"n_qubits": n_qubits, "weights_shape": [1], "body": [gate],
                 "measurements": [{"observable": observable, "wire": obs_wire}]})


class TestSingleGateSemantics:
    def test_h_z_expectation_zero(self):
        fc = single_gate("H")
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(0.0, abs=1e-15)

    def test_h_x_expectation_one(self):
        fc = single_gate("H", observable="PauliX")
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(1.0)

    def test_ry_pi_flips(self):
        fc = single_gate("RY", angle="pi")
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(-1.0)

    def test_x_flips(self):
        fc = single_gate("X")
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(-1.0)

    def test_rx_half_pi_y(self):
        # RX(pi/2)|0> has <Y> = -1.
        fc = single_gate("RX", angle="pi / 2", observable="PauliY")
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(-1.0)

    def test_cnot_on_plus_state(self):
        circuit = {"n_qubits": 2, "weights_shape": [1],
                   "body": [{"gate": "H", "wires": [0]},
                            {"gate": "CNOT", "wires": [0, 1]}],
                   "measurements": [{"observable": "PauliZ", "wire": 1}]}
        fc = flat(circuit)
        # Bell state: <Z1> = 0.
        assert simulate_expectations(fc, np.zeros(1), np.zeros(1))[0] == \
            pytest.approx(0.0, abs=1e-15)

    def test_cnot_reversed_control(self):
        circuit = {"n_qubits": 2, "weights_shape": [1],
                   "body": [{"gate": "X", "wires": [1]},
                            {"gate": "CNOT", "wires": [1, 0]}],
                   "measurements": [{"observable": "PauliZ", "wire": 0}]}
        assert simulate_expectations(flat(circuit), np.zeros(1),
                                     np.zeros(1))[0] == pytest.approx(-1.0)

    def test_cz_phase(self):
        circuit = {"n_qubits": 2, "weights_shape": [1],
                   "body": [{"gate": "X", "wires": [0]},
                            {"gate": "H", "wires": [1]},
                            {"gate": "CZ", "wires": [0, 1]}],
                   "measurements": [{"observable": "PauliX", "wire": 1}]}
        # CZ on |1>|+> turns the target into |->: <X> = -1.
        assert simulate_expectations(flat(circuit), np.zeros(1),
                                     np.zeros(1))[0] == pytest.approx(-1.0)

    def test_qubit0_most_significant(self):
        fc = single_gate("X", n_qubits=2, wires=(0,))
        state = run_statevector(fc, np.zeros(1), np.zeros(1))
        # |10> must sit at index 2, not 1.
        assert state[2] == pytest.approx(1.0)


class TestRotDecomposition:
    @pytest.mark.parametrize("seed", range(5))
    def test_rot_equals_rz_ry_rz(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (float(v) for v in rng.uniform(-np.pi, np.pi, 3))
        composed = {"n_qubits": 1, "weights_shape": [1],
                    "body": [{"gate": "RZ", "wires": [0], "angle": repr(c)},
                             {"gate": "RY", "wires": [0], "angle": repr(b)},
                             {"gate": "RZ", "wires": [0], "angle": repr(a)}],
                    "measurements": [{"observable": "PauliZ", "wire": 0}]}
        fused = {"n_qubits": 1, "weights_shape": [1],
                 "body": [{"gate": "ROT", "wires": [0],
                           "angles": [repr(a), repr(b), repr(c)]}],
                 "measurements": [{"observable": "PauliZ", "wire": 0}]}
        s1 = run_statevector(flat(composed), np.zeros(1), np.zeros(1))
        s2 = run_statevector(flat(fused), np.zeros(1), np.zeros(1))
        np.testing.assert_allclose(s1, s2, atol=1e-14)


class TestOracleEquivalence:
    def test_random_circuits_match_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(1, 5))
            fc = random_flat_circuit(rng, n, int(rng.integers(1, 26)), 3, 4)
            inputs = rng.uniform(-np.pi, np.pi, 3)
            weights = rng.uniform(-np.pi, np.pi, 4)
            mine = simulate_expectations(fc, inputs, weights)
            oracle = dense_expectations(fc, inputs, weights)
            np.testing.assert_allclose(mine, oracle, atol=1e-12, rtol=0)


class TestInvariants:
    def test_norm_preserved_gate_by_gate(self):
        from vqclab.simulator import _angle_values, _apply_gate, zero_state

        rng = np.random.default_rng(3)
        fc = random_flat_circuit(rng, 4, 25, 3, 4)
        inputs = rng.uniform(-1, 1, 3)
        weights = rng.uniform(-1, 1, 4)
        state = zero_state(fc.n_qubits)
        for gate, angles in zip(fc.gates, _angle_values(fc, inputs, weights)):
            state = _apply_gate(state, gate, angles)
            assert abs(np.linalg.norm(state) - 1.0) < 1e-12

    def test_expectations_bounded(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            fc = random_flat_circuit(rng, 3, 15, 2, 3)
            vals = simulate_expectations(fc, rng.uniform(-3, 3, 2),
                                         rng.uniform(-3, 3, 3))
            assert np.all(vals <= 1.0 + 1e-12)
            assert np.all(vals >= -1.0 - 1e-12)

    def test_wire_permutation_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n = 4
            doc_text, n_in, q_out = __import__("oracles").random_circuit_doc(
                rng, n, 15, 2, 3)
            perm = rng.permutation(n)
            raw = json.loads(doc_text)
            for gate in raw["body"]:
                gate["wires"] = [int(perm[w]) for w in gate["wires"]]
            for meas in raw["measurements"]:
                meas["wire"] = int(perm[meas["wire"]])
            fc = unroll_and_validate(parse_circuit(doc_text), n_in, q_out)
            fc_perm = unroll_and_validate(parse_circuit(json.dumps(raw)), n_in, q_out)
            inputs = rng.uniform(-1, 1, 2)
            weights = rng.uniform(-1, 1, 3)
            np.testing.assert_allclose(
                simulate_expectations(fc, inputs, weights),
                simulate_expectations(fc_perm, inputs, weights), atol=1e-12)
