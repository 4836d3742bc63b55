import numpy as np
import pytest

from lqsim.pauli import PauliString
from lqsim.statevector import StateVector, walsh_hadamard

from test_pauli import pauli_matrix

RNG = np.random.default_rng(3)

GATES = [("H", 1), ("S", 1), ("SDG", 1), ("T", 1), ("TDG", 1),
         ("X", 1), ("Y", 1), ("Z", 1), ("CNOT", 2), ("CZ", 2),
         ("SWAP", 2), ("CCZ", 3)]


def random_state(n):
    amps = RNG.normal(size=1 << n) + 1j * RNG.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def test_t_gate_diagonal():
    sv = StateVector(1)
    sv.apply_gate("T", 0)
    assert np.allclose(sv.amps, [1, 0])
    sv = StateVector(1, [0, 1])
    sv.apply_gate("T", 0)
    assert np.allclose(sv.amps, [0, np.exp(1j * np.pi / 4)])


def test_t_fourth_power_is_z():
    for _ in range(5):
        sv = random_state(3)
        ref = sv.copy().apply_gate("Z", 1)
        for _ in range(4):
            sv.apply_gate("T", 1)
        assert np.allclose(sv.amps, ref.amps, atol=1e-12)


def test_ccz_definition():
    for b in range(8):
        amps = np.zeros(8)
        amps[b] = 1
        sv = StateVector(3, amps).apply_gate("CCZ", 0, 1, 2)
        want = np.zeros(8)
        want[b] = -1 if b == 7 else 1
        assert np.allclose(sv.amps, want)


def test_norm_preserved():
    sv = random_state(5)
    for _ in range(200):
        kind, arity = GATES[int(RNG.integers(len(GATES)))]
        qubits = RNG.choice(5, size=arity, replace=False)
        sv.apply_gate(kind, *(int(q) for q in qubits))
    assert abs(sv.norm() - 1) < 1e-10


def test_cnot_truth_table():
    # control q0, target q1: |01> (q0=1) -> |11>
    sv = StateVector(2, [0, 1, 0, 0]).apply_gate("CNOT", 0, 1)
    assert np.allclose(sv.amps, [0, 0, 0, 1])
    sv = StateVector(2, [0, 0, 1, 0]).apply_gate("CNOT", 0, 1)
    assert np.allclose(sv.amps, [0, 0, 1, 0])


def test_apply_pauli_matches_matrix():
    for _ in range(40):
        n = int(RNG.integers(1, 5))
        p = PauliString(n, int(RNG.integers(1 << n)), int(RNG.integers(1 << n)),
                        int(RNG.integers(4)))
        sv = random_state(n)
        want = pauli_matrix(p) @ sv.amps
        assert np.allclose(sv.copy().apply_pauli(p).amps, want, atol=1e-12)


def test_expectation_hermitian():
    sv = StateVector(1)
    assert np.isclose(sv.expectation(PauliString.from_label("Z")), 1)
    sv.apply_gate("H", 0)
    assert np.isclose(sv.expectation(PauliString.from_label("X")), 1)
    assert abs(sv.expectation(PauliString.from_label("Z"))) < 1e-12


def test_measure_qubit_collapse():
    rng = np.random.default_rng(11)
    sv = StateVector(2)
    sv.apply_gate("H", 0).apply_gate("CNOT", 0, 1)
    m0 = sv.measure_qubit(0, rng)
    m1 = sv.measure_qubit(1, rng)
    assert m0 == m1
    assert abs(sv.norm() - 1) < 1e-12


def test_measure_born_statistics():
    rng = np.random.default_rng(5)
    ones = 0
    for _ in range(2000):
        sv = StateVector(1).apply_gate("H", 0)
        ones += sv.measure_qubit(0, rng)
    # 3 sigma on Binomial(2000, 0.5)
    assert abs(ones - 1000) < 3 * np.sqrt(2000 * 0.25)


def test_walsh_hadamard_matches_gates():
    for n in (1, 3, 5):
        sv = random_state(n)
        ref = sv.copy()
        for q in range(n):
            ref.apply_gate("H", q)
        assert np.allclose(walsh_hadamard(sv.amps), ref.amps, atol=1e-12)


def test_reduced_purity_oracle():
    # Bell pair: each half maximally mixed
    sv = StateVector(2).apply_gate("H", 0).apply_gate("CNOT", 0, 1)
    assert np.isclose(sv.reduced_purity([0]), 0.5)
    assert np.isclose(sv.reduced_purity([0, 1]), 1.0)
    # product state
    sv = StateVector(3).apply_gate("H", 2)
    for sub in ([0], [1], [2], [0, 2]):
        assert np.isclose(sv.reduced_purity(sub), 1.0)


def test_qubit_out_of_range():
    with pytest.raises(ValueError):
        StateVector(2).apply_gate("H", 2)
    with pytest.raises(ValueError):
        StateVector(30)
