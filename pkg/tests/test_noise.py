import numpy as np
import pytest

from lqsim.circuits import Circuit
from lqsim.noise import (NoiseModel, attach_noise, run_circuit, sample_fired,
                         sample_trajectory, simulate_ideal)


def bell_circuit():
    c = Circuit(2)
    c.gate("H", 0).gate("CNOT", 0, 1)
    c.measure(0, "m0").measure(1, "m1")
    return c


def test_zero_noise_model_attaches_nothing():
    nc = attach_noise(bell_circuit(), NoiseModel())
    assert nc.mechanisms == []


def test_cz_mechanism_count_and_total():
    c = Circuit(2).gate("CZ", 0, 1)
    nc = attach_noise(c, NoiseModel(p_2q=0.007))
    assert len(nc.mechanisms) == 15
    assert np.isclose(sum(m.p for m in nc.mechanisms), 0.007)
    assert all(np.isclose(m.p, 0.007 / 15) for m in nc.mechanisms)


def test_single_qubit_gate_split():
    c = Circuit(1).gate("H", 0)
    nc = attach_noise(c, NoiseModel(p_1q=0.003))
    assert len(nc.mechanisms) == 3
    assert np.isclose(sum(m.p for m in nc.mechanisms), 0.003)


def test_idle_bias_split():
    c = Circuit(1).idle([0])
    nc = attach_noise(c, NoiseModel(p_idle=0.04, idle_bias=1.0))
    by_letter = {m.pauli[0][1]: m.p for m in nc.mechanisms}
    assert np.isclose(by_letter["Z"], 0.04)
    assert "X" not in by_letter  # zero-probability entries dropped
    nc = attach_noise(c, NoiseModel(p_idle=0.03, idle_bias=0.0))
    by_letter = {m.pauli[0][1]: m.p for m in nc.mechanisms}
    assert np.allclose([by_letter[k] for k in "XYZ"], 0.01)


def test_measurement_flip_rates():
    c = Circuit(2)
    c.measure(0, "anc").measure(1, "data")
    nc = attach_noise(c, NoiseModel(p_spam=0.01, p_meas_anc=0.02),
                      anc_keys=frozenset(["anc"]))
    rates = {m.flips_key: m.p for m in nc.mechanisms}
    assert np.isclose(rates["anc"], 0.02)
    assert np.isclose(rates["data"], 0.01)


def test_forced_x_flips_measurement():
    c = Circuit(1)
    c.gate("X", 0)  # a gate to hang the mechanism on
    c.measure(0, "m")
    nc = attach_noise(c, NoiseModel(p_1q=0.3))
    x_mech = next(m for m in nc.mechanisms if m.pauli[0][1] == "X")
    # firing the X mechanism flips the (already flipped) qubit back
    record, _ = run_circuit(c, frozenset([x_mech.id]), nc.mechanisms,
                            np.random.default_rng(0))
    assert record["m"] == 0
    record, _ = run_circuit(c, frozenset(), nc.mechanisms,
                            np.random.default_rng(0))
    assert record["m"] == 1


def test_empty_fault_set_matches_ideal():
    c = bell_circuit()
    nc = attach_noise(c, NoiseModel(p_2q=0.1, p_spam=0.1))
    for seed in range(20):
        rec_noisy, _ = run_circuit(c, frozenset(), nc.mechanisms,
                                   np.random.default_rng(seed))
        rec_ideal, _ = simulate_ideal(c, seed)
        assert rec_noisy == rec_ideal
        assert rec_noisy["m0"] == rec_noisy["m1"]


def test_firing_frequency():
    c = Circuit(2).gate("CZ", 0, 1).gate("H", 0)
    nc = attach_noise(c, NoiseModel(p_2q=0.15, p_1q=0.09))
    rng = np.random.default_rng(123)
    shots = 20_000
    counts = np.zeros(len(nc.mechanisms))
    for _ in range(shots):
        for mid in sample_fired(nc, rng):
            counts[mid] += 1
    for m in nc.mechanisms:
        sigma = np.sqrt(shots * m.p * (1 - m.p))
        assert abs(counts[m.id] - shots * m.p) < 4 * sigma


def test_mean_fired_count():
    c = Circuit(3)
    for q in range(3):
        c.gate("H", q)
    c.gate("CNOT", 0, 1).gate("CZ", 1, 2).idle([0, 1, 2])
    nc = attach_noise(c, NoiseModel(p_2q=0.05, p_1q=0.02, p_idle=0.03))
    expected = sum(m.p for m in nc.mechanisms)
    rng = np.random.default_rng(7)
    shots = 30_000
    total = sum(len(sample_fired(nc, rng)) for _ in range(shots))
    sigma = np.sqrt(sum(m.p * (1 - m.p) for m in nc.mechanisms) / shots)
    assert abs(total / shots - expected) < 3 * sigma


def test_trajectory_returns_ground_truth():
    c = bell_circuit()
    nc = attach_noise(c, NoiseModel(p_2q=0.2, p_spam=0.1))
    fired, record = sample_trajectory(nc, seed=99)
    assert fired <= {m.id for m in nc.mechanisms}
    assert set(record) == {"m0", "m1"}


def test_conditional_gate_only_when_bit_set():
    c = Circuit(2)
    c.gate("H", 0).measure(0, "m")
    c.gate("X", 1, cond="m")
    c.measure(1, "out")
    for seed in range(30):
        record, _ = simulate_ideal(c, seed)
        assert record["out"] == record["m"]


def test_invalid_model():
    with pytest.raises(ValueError):
        NoiseModel(p_2q=0.7)
    with pytest.raises(ValueError):
        NoiseModel(idle_bias=1.5)


def test_model_scaling():
    m = NoiseModel(p_2q=0.01, p_idle=0.04).scaled(2.0)
    assert np.isclose(m.p_2q, 0.02)
    assert np.isclose(m.p_idle, 0.08)
