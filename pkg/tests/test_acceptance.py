"""Acceptance suite: one test per criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS lines
as they complete.  Pinned tolerances live next to each assertion; the
training criteria are bands (initialization differs run-to-run only via
the master seed, which is fixed here).
"""

import json
import math

import numpy as np
import pytest

from vqclab.agent.loop import run_agent_loop
from vqclab.agent.runlog import load_run_log, replay_run
from vqclab.agent.types import EndpointConfig, RunConfig
from vqclab.architectures import (FullQuantumConfig, QuanvConfig,
                                  SimpleQNNConfig, build_model)
from vqclab.circuit import parse_circuit
from vqclab.dataset import (GaussianSampleParams, baseline_rmse, normalize,
                            peak_curve)
from vqclab.nn.autodiff import mse_loss
from vqclab.simulator import adjoint_gradients, simulate_expectations
from vqclab.train_tools import ToolRequest, execute_with_trace

from conftest import BEST_CIRCUIT, ITER1_CIRCUIT, MASTER_SEED, doc
from oracles import (assert_close_fd, dense_expectations,
                     finite_difference_grads, parameter_shift_grads,
                     random_flat_circuit)


def report(name: str):
    print(f"[PASS] {name}", flush=True)


def iter1_request(epochs):
    return ToolRequest(variant="simple", circuit_document=doc(ITER1_CIRCUIT),
                       epochs=epochs, q_enc_size=5, q_out_size=5)


def best_request(epochs):
    return ToolRequest(variant="simple", circuit_document=doc(BEST_CIRCUIT),
                       epochs=epochs, q_enc_size=5, q_out_size=5)


@pytest.fixture(scope="module")
def best_twenty(splits):
    """The 20-epoch reference training run, shared by two criteria."""
    result, trace = execute_with_trace(best_request(20), splits, MASTER_SEED)
    return result, trace


def test_accounting_reproduction(splits):
    """Exact parameter and gate accounting for the reference designs."""
    result, _ = execute_with_trace(iter1_request(1), splits, MASTER_SEED)
    assert result.n_trainable_params_total == 121
    assert result.n_trainable_params_VQC == 5
    assert result.n_gates_in_VQC == 10

    report_best = build_model(
        SimpleQNNConfig(q_enc_size=5, q_out_size=5,
                        circuit=parse_circuit(doc(BEST_CIRCUIT))),
        master_seed=MASTER_SEED).param_report()
    assert report_best.n_gates_in_VQC == 70
    assert report_best.n_trainable_params_VQC == 45

    quanv = QuanvConfig(kernel_size=5, stride=2, vqc_output_dim=1,
                        circuit=parse_circuit(doc(ITER1_CIRCUIT)))
    assert quanv.window_count == 9
    report("accounting: 121/5/10 params-gates, 70 gates + 45 params, 9 windows")


def test_simulator_oracle_equivalence():
    """200 random circuits (<=4 qubits, <=25 gates) vs the dense oracle."""
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 5))
        fc = random_flat_circuit(rng, n, int(rng.integers(1, 26)), 3, 4)
        inputs = rng.uniform(-np.pi, np.pi, 3)
        weights = rng.uniform(-np.pi, np.pi, 4)
        mine = simulate_expectations(fc, inputs, weights)
        oracle = dense_expectations(fc, inputs, weights)
        gap = float(np.max(np.abs(mine - oracle))) if mine.size else 0.0
        worst = max(worst, gap)
        assert gap <= 1e-12
    report(f"simulator matches dense unitary oracle (200 circuits, "
           f"max gap {worst:.2e} <= 1e-12)")


def test_gradient_correctness():
    """Adjoint vs finite differences, parameter shift, and model backprop."""
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        fc = random_flat_circuit(rng, n, int(rng.integers(3, 26)), 3, 5)
        inputs = rng.uniform(-np.pi, np.pi, 3)
        weights = rng.uniform(-np.pi, np.pi, 5)
        upstream = rng.uniform(-1, 1, len(fc.measurements))
        grads = adjoint_gradients(fc, inputs, weights, upstream)
        fd_w, fd_in = finite_difference_grads(fc, inputs, weights, upstream)
        assert_close_fd(grads.d_weights, fd_w, 1e-6)
        assert_close_fd(grads.d_inputs, fd_in, 1e-6)

    for _ in range(20):
        n = int(rng.integers(1, 5))
        fc = random_flat_circuit(rng, n, 15, 2, 6,
                                 angle_style="one_rotation_per_weight")
        inputs = rng.uniform(-np.pi, np.pi, 2)
        weights = rng.uniform(-np.pi, np.pi, 6)
        upstream = rng.uniform(-1, 1, len(fc.measurements))
        grads = adjoint_gradients(fc, inputs, weights, upstream)
        shifted = parameter_shift_grads(fc, inputs, weights, upstream)
        np.testing.assert_allclose(grads.d_weights, shifted, atol=1e-10, rtol=0)

    toy = {
        "n_qubits": 3, "weights_shape": [3, 2],
        "body": [
            {"for": "i", "range": [0, 3], "body": [
                {"gate": "RY", "wires": ["i"], "angle": "inputs[i % 3]"},
                {"gate": "RX", "wires": ["i"], "angle": "weights[i, 0]"}]},
            {"for": "i", "range": [0, 2], "body": [
                {"gate": "CNOT", "wires": ["i", "i + 1"]}]},
            {"for": "i", "range": [0, 3], "body": [
                {"gate": "RY", "wires": ["i"], "angle": "weights[i, 1]"}]},
        ],
        "measurements": [{"for": "i", "range": [0, 3], "body": [
            {"observable": "PauliZ", "wire": "i"}]}],
    }
    full_toy = json.loads(json.dumps(toy))
    full_toy["body"][0]["body"][0]["angle"] = "inputs[i * 7]"
    configs = [
        SimpleQNNConfig(q_enc_size=3, q_out_size=3,
                        circuit=parse_circuit(doc(toy))),
        QuanvConfig(kernel_size=3, stride=4, vqc_output_dim=3,
                    circuit=parse_circuit(doc(toy))),
        FullQuantumConfig(q_out_size=3, circuit=parse_circuit(doc(full_toy))),
    ]
    data_rng = np.random.default_rng(17)
    batch = data_rng.uniform(0, 1, (3, 21))
    target = data_rng.uniform(0, 1, 3)
    for config in configs:
        model = build_model(config, master_seed=5)
        loss = mse_loss(model.forward(batch), target)
        loss.backward()
        for param in model.parameters():
            analytic = param.grad.copy()
            param.zero_grad()
            fd = np.zeros_like(param.data)
            flat_fd, flat_p = fd.reshape(-1), param.data.reshape(-1)
            for i in range(flat_p.size):
                orig = flat_p[i]
                flat_p[i] = orig + 1e-6
                up = mse_loss(model.forward(batch), target).data
                flat_p[i] = orig - 1e-6
                down = mse_loss(model.forward(batch), target).data
                flat_p[i] = orig
                flat_fd[i] = (up - down) / 2e-6
            assert_close_fd(analytic, fd, 1e-4)
    report("gradients: adjoint==FD (100 circuits, rel 1e-6), ==shift rule "
           "(1e-10), model backprop==FD (rel 1e-4)")


def test_training_efficacy_band(splits, best_twenty):
    """The two reference trainings land in their published bands."""
    baseline = baseline_rmse(splits)
    assert abs(baseline - 1 / math.sqrt(12)) < 0.02

    result7, _ = execute_with_trace(iter1_request(7), splits, MASTER_SEED)
    assert len(result7.val_RMSE_history) == 7
    assert result7.test_RMSE <= 0.09
    assert result7.test_RMSE <= baseline / 3.0
    assert result7.val_RMSE_history[-1] < result7.val_RMSE_history[0]

    result20, _ = best_twenty
    assert result20.test_RMSE <= 0.06
    report(f"training efficacy: starter 7-epoch RMSE {result7.test_RMSE:.4f} "
           f"<= 0.09 (baseline {baseline:.4f}); reference 20-epoch RMSE "
           f"{result20.test_RMSE:.4f} <= 0.06")


def test_loop_behavior(splits, tmp_path):
    """Invalid circuit recovered within repair budget; replay bit-identical."""
    bad = json.loads(doc(ITER1_CIRCUIT))
    bad["body"][1]["body"][0]["angle"] = "weights[7]"  # out of bounds
    args = {"circuit": ITER1_CIRCUIT, "q_enc_size": 5, "q_out_size": 5,
            "epochs": 1}
    turns = [
        {"text": "start", "tool": "train_simple_qnn", "arguments": args},
        {"text": "grow", "tool": "train_simple_qnn",
         "arguments": {**args, "circuit": bad}},
        {"text": "repair", "tool": "train_simple_qnn",
         "arguments": {**args, "epochs": 2}},
        {"text": "refine", "tool": "train_simple_qnn",
         "arguments": {**args, "epochs": 3}},
    ]
    config = RunConfig(architecture="simple", budget=3, prompt="go",
                       endpoint=EndpointConfig(kind="scripted",
                                               turns=tuple(turns)),
                       master_seed=MASTER_SEED)
    view = run_agent_loop(config, log_dir=str(tmp_path), splits=splits)
    records = view.iteration_records()
    assert view.status == "budget_exhausted"  # errors did not abort the run
    assert [r.ok for r in records] == [True, False, True, True]
    assert records[1].error["phase"] == "validate"
    # One failed turn, then recovery: within the 3-attempt repair budget.
    comparisons = replay_run(load_run_log(str(tmp_path)), splits=splits)
    assert all(c["ok"] for c in comparisons)
    report(f"loop: error repaired in 1 turn, budget completed, replay "
           f"bit-identical over {len(comparisons)} iterations")


def test_schedule_conformance(best_twenty):
    """Recorded lr per epoch over 20 epochs follows the milestone halvings."""
    _, trace = best_twenty
    expected = [0.10] * 3 + [0.05] * 5 + [0.025] * 7 + [0.0125] * 5
    assert trace.lr_history == expected
    report("schedule: lr 0.10/0.05/0.025/0.0125 switching exactly at "
           "epochs 3, 8, 15")


def test_dataset_statistics(splits):
    """Split sizes, target moments, symmetry and peak-position gridding."""
    assert (len(splits.train), len(splits.val), len(splits.test)) == \
        (150, 250, 500)
    targets = splits.targets("test")
    assert 0.45 <= float(targets.mean()) <= 0.55

    rng = np.random.default_rng(301)
    for _ in range(1000):
        amplitude = float(rng.uniform(0.5, 1.5))
        sigma = float(rng.uniform(0.01, 0.1))
        mu = float(rng.uniform(0.0, 1.0))
        feats = normalize(peak_curve(GaussianSampleParams(
            amplitude=amplitude, sigma=sigma, mu=mu)))
        assert int(np.argmax(feats)) == int(round(20 * mu))
        # Symmetry holds about the grid centre, so pin mu there.
        centred = normalize(peak_curve(GaussianSampleParams(
            amplitude=amplitude, sigma=sigma, mu=0.5)))
        np.testing.assert_allclose(centred[:10], centred[11:][::-1], atol=1e-12)
    report("dataset: 150/250/500 sizes, test-target mean in [0.45, 0.55], "
           "symmetry + argmax grid over 1000 parameter draws")
