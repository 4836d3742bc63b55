import numpy as np
import pytest

from lqsim.pauli import PauliString, CliffordGate, conjugate

RNG = np.random.default_rng(20240817)

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])

_GATE_1Q = {
    "H": _H,
    "S": _S,
    "SDG": _S.conj(),
    "X": _X,
    "Y": 1j * _X @ _Z,
    "Z": _Z,
}


def pauli_matrix(p):
    """Dense matrix oracle: kron over qubits, qubit n-1 first (q0 = LSB)."""
    m = np.array([[1]], dtype=complex)
    for q in range(p.n - 1, -1, -1):
        xb = (p.x >> q) & 1
        zb = (p.z >> q) & 1
        factor = (_X if xb else _I) @ (_Z if zb else _I)
        m = np.kron(m, factor)
    return (1j ** p.phase_exp) * m


def gate_matrix(gate, n):
    if gate.kind in _GATE_1Q:
        q = gate.qubits[0]
        m = np.array([[1]], dtype=complex)
        for k in range(n - 1, -1, -1):
            m = np.kron(m, _GATE_1Q[gate.kind] if k == q else _I)
        return m
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    if gate.kind == "CNOT":
        c, t = gate.qubits
        for b in range(dim):
            out = b ^ (((b >> c) & 1) << t)
            m[out, b] = 1
    elif gate.kind == "CZ":
        c, t = gate.qubits
        for b in range(dim):
            m[b, b] = -1 if ((b >> c) & 1) and ((b >> t) & 1) else 1
    elif gate.kind == "SWAP":
        a, b_ = gate.qubits
        for b in range(dim):
            ba, bb = (b >> a) & 1, (b >> b_) & 1
            out = b & ~((1 << a) | (1 << b_))
            out |= (bb << a) | (ba << b_)
            m[out, b] = 1
    else:
        raise AssertionError(gate.kind)
    return m


def random_pauli(n):
    return PauliString(
        n,
        int(RNG.integers(0, 1 << n)),
        int(RNG.integers(0, 1 << n)),
        int(RNG.integers(0, 4)),
    )


def test_label_round_trip():
    for label in ["+X", "-Y", "+iZ", "XIZ", "-YYX", "+iIXYZ", "III"]:
        p = PauliString.from_label(label)
        assert PauliString.from_label(p.to_label()) == p


def test_x_times_z_is_minus_i_y():
    x = PauliString.from_label("X")
    z = PauliString.from_label("Z")
    assert (x * z).to_label() == "-iY"


def test_square_is_identity():
    for label in ["X", "Y", "Z", "XY", "-iZZ", "+iYXZ"]:
        p = PauliString.from_label(label)
        sq = p * p
        assert sq.x == 0 and sq.z == 0
        # P*P = +I for Hermitian P; phased inputs square to a phase
        if label[0] not in "+-":
            assert sq.is_identity()


def test_multiply_matches_matrix_oracle():
    for _ in range(200):
        n = int(RNG.integers(1, 4))
        p, q = random_pauli(n), random_pauli(n)
        got = pauli_matrix(p * q)
        want = pauli_matrix(p) @ pauli_matrix(q)
        assert np.allclose(got, want, atol=1e-12)


def test_multiply_10_qubit_phase_via_per_qubit_oracle():
    # phases from each qubit multiply independently
    for _ in range(100):
        p, q = random_pauli(10), random_pauli(10)
        prod = p * q
        phase = (1j ** p.phase_exp) * (1j ** q.phase_exp)
        for k in range(10):
            p1 = PauliString(1, (p.x >> k) & 1, (p.z >> k) & 1)
            q1 = PauliString(1, (q.x >> k) & 1, (q.z >> k) & 1)
            r1 = p1 * q1
            phase *= 1j ** r1.phase_exp
        assert np.isclose(1j ** prod.phase_exp, phase)


def test_commutes_all_3_qubit_pairs():
    paulis = [PauliString(3, x, z) for x in range(8) for z in range(8)]
    for p in paulis:
        mp = pauli_matrix(p)
        for q in paulis:
            mq = pauli_matrix(q)
            want = np.allclose(mp @ mq, mq @ mp, atol=1e-12)
            assert p.commutes(q) == want


def test_commutes_length_mismatch():
    with pytest.raises(ValueError):
        PauliString(2).commutes(PauliString(3))


def test_conjugate_examples():
    # H: X -> Z
    p = conjugate(CliffordGate("H", (0,)), PauliString.from_label("X"))
    assert p.to_label() == "+Z"
    # CNOT copies X from control to target
    p = conjugate(CliffordGate("CNOT", (0, 1)), PauliString.from_label("XI"))
    assert p.to_label() == "+XX"
    # CZ_{12} CZ_{13}: X x I x I -> X x Z x Z
    p = PauliString.from_label("XII")
    p = conjugate(CliffordGate("CZ", (0, 1)), p)
    p = conjugate(CliffordGate("CZ", (0, 2)), p)
    assert p.to_label() == "+XZZ"


@pytest.mark.parametrize("kind,arity", [
    ("H", 1), ("S", 1), ("SDG", 1), ("X", 1), ("Y", 1), ("Z", 1),
    ("CNOT", 2), ("CZ", 2), ("SWAP", 2),
])
def test_conjugate_matches_matrix_oracle(kind, arity):
    n = 3
    for _ in range(60):
        qubits = tuple(int(v) for v in RNG.choice(n, size=arity, replace=False))
        g = CliffordGate(kind, qubits)
        p = random_pauli(n)
        got = pauli_matrix(conjugate(g, p))
        u = gate_matrix(g, n)
        want = u @ pauli_matrix(p) @ u.conj().T
        assert np.allclose(got, want, atol=1e-12)


def test_conjugate_distributes_over_multiply():
    for _ in range(300):
        n = int(RNG.integers(2, 6))
        kind = ["H", "S", "CNOT", "CZ", "SWAP"][int(RNG.integers(0, 5))]
        arity = 1 if kind in ("H", "S") else 2
        qubits = tuple(int(v) for v in RNG.choice(n, size=arity, replace=False))
        g = CliffordGate(kind, qubits)
        p, q = random_pauli(n), random_pauli(n)
        assert conjugate(g, p * q) == conjugate(g, p) * conjugate(g, q)


def test_single_and_weight():
    p = PauliString.single(4, 2, "Y")
    assert p.to_label() == "+IIYI"
    assert p.weight == 1
    assert p.support() == (2,)


def test_adjoint():
    for _ in range(50):
        p = random_pauli(3)
        assert np.allclose(
            pauli_matrix(p.adjoint()), pauli_matrix(p).conj().T, atol=1e-12
        )


def test_tensor():
    p = PauliString.from_label("XZ")
    q = PauliString.from_label("Y")
    assert p.tensor(q).to_label(with_phase=False) == "XZY"


def test_out_of_range_target():
    with pytest.raises(ValueError):
        conjugate(CliffordGate("H", (3,)), PauliString(2))
