"""Dense statevector engine for small circuits, Clifford and non-Clifford.

Amplitudes are a flat complex128 array of length 2^n indexed by the
computational basis integer, qubit 0 = least significant bit.  Gates act
in place through reshaped views; n is capped at 26 so two 24-qubit halves
of a split contraction still fit comfortably in memory.
"""

from __future__ import annotations

import numpy as np

from .pauli import PauliString

__all__ = ["StateVector", "MAX_QUBITS"]

MAX_QUBITS = 26

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_1Q = {
    "H": _H,
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "TDG": np.diag([1, np.exp(-1j * np.pi / 4)]),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]).astype(complex),
}


class StateVector:
    """Mutable pure state of n qubits, single owner."""

    def __init__(self, n: int, amps: np.ndarray | None = None):
        if not 0 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count {n} outside [0, {MAX_QUBITS}]")
        self.n = n
        if amps is None:
            self.amps = np.zeros(1 << n, dtype=complex)
            self.amps[0] = 1.0
        else:
            amps = np.asarray(amps, dtype=complex)
            if amps.shape != (1 << n,):
                raise ValueError("amplitude array has wrong length")
            self.amps = amps.copy()

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    # -- views ---------------------------------------------------------

    def _axis_front(self, qubits):
        """Reshape to (2,)*n and move the given qubits to the leading axes.

        Axis n-1-q corresponds to qubit q in the reshaped tensor.
        """
        view = self.amps.reshape((2,) * self.n)
        src = [self.n - 1 - q for q in qubits]
        return np.moveaxis(view, src, range(len(qubits)))

    # -- gates ---------------------------------------------------------

    def apply_gate(self, kind: str, *qubits: int):
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range")
        if len(set(qubits)) != len(qubits):
            raise ValueError("repeated qubit target")
        kind = kind.upper()
        if kind in _1Q:
            (q,) = qubits
            v = self._axis_front((q,))
            m = _1Q[kind]
            a0, a1 = v[0].copy(), v[1]
            v[0] = m[0, 0] * a0 + m[0, 1] * a1
            v[1] = m[1, 0] * a0 + m[1, 1] * a1
        elif kind == "CNOT":
            c, t = qubits
            v = self._axis_front((c, t))
            v[1, 0], v[1, 1] = v[1, 1].copy(), v[1, 0].copy()
        elif kind == "CZ":
            c, t = qubits
            v = self._axis_front((c, t))
            v[1, 1] *= -1
        elif kind == "SWAP":
            a, b = qubits
            v = self._axis_front((a, b))
            v[0, 1], v[1, 0] = v[1, 0].copy(), v[0, 1].copy()
        elif kind == "CCZ":
            a, b, c = qubits
            v = self._axis_front((a, b, c))
            v[1, 1, 1] *= -1
        else:
            raise ValueError(f"unknown gate {kind!r}")
        return self

    def apply_pauli(self, p: PauliString):
        if p.n != self.n:
            raise ValueError("length mismatch")
        idx = np.arange(1 << self.n)
        # i^s * (-1)^{z . (b xor x)} after X flips: value acts as
        # (X^x Z^z psi)(b) = i^s (-1)^{z.(b^x)} psi(b^x)
        signs = (-1.0) ** _bit_parity((idx ^ p.x) & p.z)
        self.amps = (1j ** p.phase_exp) * signs * self.amps[idx ^ p.x]
        return self

    # -- measurement and queries ---------------------------------------

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def expectation(self, p: PauliString) -> complex:
        other = self.copy().apply_pauli(p)
        return complex(np.vdot(self.amps, other.amps))

    def measure_all(self, rng: np.random.Generator) -> int:
        prob = self.probabilities()
        prob = prob / prob.sum()
        return int(rng.choice(len(prob), p=prob))

    def measure_qubit(self, q: int, rng: np.random.Generator) -> int:
        """Projective Z measurement of one qubit; collapses the state."""
        v = self._axis_front((q,))
        p1 = float(np.sum(np.abs(v[1]) ** 2))
        outcome = int(rng.random() < p1)
        keep, kill = (1, 0) if outcome else (0, 1)
        p_keep = p1 if outcome else 1.0 - p1
        v[kill] = 0
        v[keep] /= np.sqrt(p_keep)
        return outcome

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        prob = self.probabilities()
        return rng.choice(len(prob), size=shots, p=prob / prob.sum())

    def reduced_purity(self, subsystem) -> float:
        """Tr(rho_A^2) for the given qubit subset, via the dense bipartition."""
        sub = sorted(subsystem)
        rest = [q for q in range(self.n) if q not in sub]
        v = self._axis_front(tuple(sub) + tuple(rest))
        mat = v.reshape(1 << len(sub), 1 << len(rest))
        rho = mat @ mat.conj().T
        return float(np.trace(rho @ rho).real)


def _bit_parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


def walsh_hadamard(amps: np.ndarray) -> np.ndarray:
    """H^{\\otimes n} acting on a flat amplitude array, returned normalized."""
    n = amps.size.bit_length() - 1
    out = np.asarray(amps, dtype=complex).copy()
    for q in range(n):
        v = out.reshape(-1, 2, 1 << q)
        a0 = v[:, 0, :].copy()
        v[:, 0, :] = a0 + v[:, 1, :]
        v[:, 1, :] = a0 - v[:, 1, :]
    return out / np.sqrt(1 << n)
