"""Instruction-level circuit representation shared by all simulators.

A Circuit is an ordered list of immutable instructions over n qubits:
unitary gates, Z-basis measurements (keyed so later instructions and the
analysis can refer to them), resets, explicit idle windows, and gates
conditioned on an earlier measurement record.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["Instruction", "Circuit", "GATE_ARITY", "CLIFFORD_GATES",
           "NONCLIFFORD_GATES"]

GATE_ARITY = {
    "H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1,
    "T": 1, "TDG": 1,
    "CNOT": 2, "CZ": 2, "SWAP": 2, "CCZ": 3,
}
CLIFFORD_GATES = frozenset(k for k in GATE_ARITY if k not in ("T", "TDG", "CCZ"))
NONCLIFFORD_GATES = frozenset(("T", "TDG", "CCZ"))
TWO_QUBIT_GATES = frozenset(("CNOT", "CZ", "SWAP"))


@dataclass(frozen=True)
class Instruction:
    """One circuit step.

    kind: a gate name, or one of M (Z measurement), R (reset to |0>),
          IDLE (declared idle window).
    qubits: targets, in gate order.
    key: record label, required for M.
    cond: measurement key; the gate is applied only on shots where that
          recorded bit is 1.
    idle_weight: relative share of the integrated idle budget (IDLE only).
    """

    kind: str
    qubits: tuple[int, ...]
    key: str | None = None
    cond: str | None = None
    idle_weight: float = 1.0

    def __post_init__(self):
        if self.kind in GATE_ARITY:
            if len(self.qubits) != GATE_ARITY[self.kind]:
                raise ValueError(f"{self.kind} takes {GATE_ARITY[self.kind]} qubits")
            if len(set(self.qubits)) != len(self.qubits):
                raise ValueError("repeated qubit target")
        elif self.kind == "M":
            if len(self.qubits) != 1 or self.key is None:
                raise ValueError("M takes one qubit and a record key")
        elif self.kind == "R":
            if len(self.qubits) != 1:
                raise ValueError("R takes one qubit")
        elif self.kind == "IDLE":
            if not self.qubits:
                raise ValueError("IDLE needs at least one qubit")
        else:
            raise ValueError(f"unknown instruction {self.kind!r}")
        if self.cond is not None and self.kind not in GATE_ARITY:
            raise ValueError("only gates can be conditional")


@dataclass
class Circuit:
    """Ordered instruction list on a fixed-size register."""

    n: int
    instructions: list[Instruction] = field(default_factory=list)

    def _check(self, qubits):
        for q in qubits:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range for n={self.n}")

    def gate(self, kind: str, *qubits: int, cond: str | None = None):
        self._check(qubits)
        self.instructions.append(Instruction(kind.upper(), tuple(qubits), cond=cond))
        return self

    def measure(self, q: int, key: str):
        self._check((q,))
        if key in self.measurement_keys():
            raise ValueError(f"duplicate measurement key {key!r}")
        self.instructions.append(Instruction("M", (q,), key=key))
        return self

    def reset(self, q: int):
        self._check((q,))
        self.instructions.append(Instruction("R", (q,)))
        return self

    def idle(self, qubits, weight: float = 1.0):
        qubits = tuple(qubits)
        self._check(qubits)
        self.instructions.append(Instruction("IDLE", qubits, idle_weight=weight))
        return self

    def extend(self, other: "Circuit"):
        if other.n != self.n:
            raise ValueError("register size mismatch")
        self.instructions.extend(other.instructions)
        return self

    def measurement_keys(self):
        return [ins.key for ins in self.instructions if ins.kind == "M"]

    def is_clifford(self) -> bool:
        return all(ins.kind not in NONCLIFFORD_GATES for ins in self.instructions)

    def has_feedforward(self) -> bool:
        return any(ins.cond is not None for ins in self.instructions)
