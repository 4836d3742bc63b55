import numpy as np
import pytest

from lqsim.pauli import PauliString
from lqsim.statevector import StateVector
from lqsim.tableau import StabilizerTableau

RNG = np.random.default_rng(42)

CLIFFORD = [("H", 1), ("S", 1), ("SDG", 1), ("X", 1), ("Y", 1), ("Z", 1),
            ("CNOT", 2), ("CZ", 2), ("SWAP", 2)]


def random_clifford_circuit(n, depth):
    ops = []
    for _ in range(depth):
        kind, arity = CLIFFORD[int(RNG.integers(len(CLIFFORD)))]
        qubits = tuple(int(q) for q in RNG.choice(n, size=arity, replace=False))
        ops.append((kind, qubits))
    return ops


def run_both(n, ops):
    t = StabilizerTableau(n)
    sv = StateVector(n)
    for kind, qubits in ops:
        t.apply_gate(kind, *qubits)
        sv.apply_gate(kind, *qubits)
    return t, sv


def test_initial_state():
    t = StabilizerTableau(2)
    assert t.expectation(PauliString.from_label("ZI")) == 1
    assert t.expectation(PauliString.from_label("IZ")) == 1
    assert t.expectation(PauliString.from_label("XI")) == 0


def test_measure_z_on_zero_deterministic():
    rng = np.random.default_rng(0)
    t = StabilizerTableau(1)
    assert t.measure_z(0, rng) == 0


def test_plus_state_born_rule():
    rng = np.random.default_rng(1)
    ones = 0
    shots = 10_000
    for _ in range(shots):
        t = StabilizerTableau(1).apply_gate("H", 0)
        ones += t.measure_z(0, rng)
    assert abs(ones / shots - 0.5) < 0.02


def test_bell_pair_correlations():
    rng = np.random.default_rng(2)
    for _ in range(200):
        t = StabilizerTableau(2).apply_gate("H", 0).apply_gate("CNOT", 0, 1)
        assert t.measure_z(0, rng) == t.measure_z(1, rng)


def test_stabilizer_expectations_match_statevector():
    for _ in range(60):
        n = int(RNG.integers(2, 9))
        t, sv = run_both(n, random_clifford_circuit(n, 40))
        for s in t.stabilizers():
            assert np.isclose(sv.expectation(s), 1.0, atol=1e-9)


def test_random_pauli_expectations_match_statevector():
    for _ in range(40):
        n = int(RNG.integers(2, 7))
        t, sv = run_both(n, random_clifford_circuit(n, 30))
        for _ in range(10):
            p = PauliString(n, int(RNG.integers(1 << n)),
                            int(RNG.integers(1 << n)))
            p = PauliString(n, p.x, p.z, bin(p.x & p.z).count("1"))  # Hermitian
            got = t.expectation(p)
            want = sv.expectation(p)
            assert np.isclose(got, want, atol=1e-9)


def test_measurement_statistics_match_born_rule():
    # 10-qubit GHZ via tableau: check Z-basis sampling frequencies
    rng = np.random.default_rng(7)
    shots = 10_000
    all_zero = all_one = 0
    for _ in range(shots):
        t = StabilizerTableau(5).apply_gate("H", 0)
        for q in range(4):
            t.apply_gate("CNOT", q, q + 1)
        bits = [t.measure_z(q, rng) for q in range(5)]
        if sum(bits) == 0:
            all_zero += 1
        elif sum(bits) == 5:
            all_one += 1
    assert all_zero + all_one == shots
    assert abs(all_zero / shots - 0.5) < 3 * np.sqrt(0.25 / shots)


def test_forced_measurement_replay():
    rng = np.random.default_rng(9)
    t = StabilizerTableau(1).apply_gate("H", 0)
    out = t.measure_z(0, rng, forced=1)
    assert out == 1
    # now deterministic; forcing the wrong value must raise
    assert t.measure_z(0, rng) == 1
    with pytest.raises(ValueError):
        t.measure_z(0, rng, forced=0)


def test_measure_pauli_projects():
    rng = np.random.default_rng(13)
    t = StabilizerTableau(2)
    xx = PauliString.from_label("XX")
    zz = PauliString.from_label("ZZ")
    out = t.measure_pauli(xx, rng)
    assert out in (1, -1)
    assert t.expectation(xx) == out
    assert t.expectation(zz) == 1  # |00>+-|11> keeps ZZ = +1


def test_reset():
    rng = np.random.default_rng(21)
    for _ in range(20):
        t = StabilizerTableau(2).apply_gate("H", 0).apply_gate("CNOT", 0, 1)
        t.reset_z(0, rng)
        assert t.measure_z(0, rng) == 0
