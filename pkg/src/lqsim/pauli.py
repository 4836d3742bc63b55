"""Phased Pauli strings and their Clifford conjugation rules.

A Pauli operator on n qubits is stored as a pair of n-bit masks (x, z) plus
a power of i, representing ``i^phase_exp * prod_q X_q^{x_q} Z_q^{z_q}``.
Qubit 0 is the least significant bit of the masks.  All group operations
(multiplication, commutation, conjugation by Clifford gates) are exact in
phase; correctness is pinned against dense matrix oracles in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["PauliString", "CliffordGate", "CLIFFORD_KINDS", "conjugate"]

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}
_PHASE_LABEL = {0: "+", 1: "+i", 2: "-", 3: "-i"}

# Gate kind -> number of qubit targets.
CLIFFORD_KINDS = {
    "H": 1, "S": 1, "SDG": 1, "X": 1, "Y": 1, "Z": 1,
    "CNOT": 2, "CZ": 2, "SWAP": 2,
}


def _parity(v: int) -> int:
    return bin(v).count("1") & 1


def _popcount(v: int) -> int:
    return bin(v).count("1")


class PauliString:
    """Immutable phased Pauli operator on a fixed number of qubits."""

    __slots__ = ("n", "x", "z", "phase_exp")

    def __init__(self, n: int, x: int = 0, z: int = 0, phase_exp: int = 0):
        if n < 0:
            raise ValueError("qubit count must be nonnegative")
        mask = (1 << n) - 1
        if x & ~mask or z & ~mask:
            raise ValueError("mask has bits outside the qubit range")
        self.n = n
        self.x = x
        self.z = z
        self.phase_exp = phase_exp & 3

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. ``"XIZ"``, ``"-YY"``, ``"+iXZ"``.

        label[0] (after the optional sign) acts on qubit 0.
        """
        s = label.strip()
        phase = 0
        for prefix, p in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if s.startswith(prefix):
                phase = p
                s = s[len(prefix):]
                break
        x = z = 0
        for q, letter in enumerate(s):
            try:
                xb, zb = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValueError(f"bad Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
            if xb and zb:  # Y = i * X Z
                phase += 1
        return cls(len(s), x, z, phase)

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> "PauliString":
        """A single-site Pauli ``letter`` on qubit ``q`` of an n-qubit register."""
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for n={n}")
        xb, zb = _LETTER_TO_BITS[letter]
        return cls(n, xb << q, zb << q, 1 if (xb and zb) else 0)

    # -- queries ------------------------------------------------------

    def to_label(self, with_phase: bool = True) -> str:
        letters = []
        for q in range(self.n):
            xb = (self.x >> q) & 1
            zb = (self.z >> q) & 1
            letters.append(_BITS_TO_LETTER[(xb, zb)])
        shown = (self.phase_exp - _popcount(self.x & self.z)) & 3
        body = "".join(letters)
        return (_PHASE_LABEL[shown] + body) if with_phase else body

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase_exp == 0

    def support(self) -> tuple[int, ...]:
        m = self.x | self.z
        return tuple(q for q in range(self.n) if (m >> q) & 1)

    def commutes(self, other: "PauliString") -> bool:
        """True iff the symplectic form x1.z2 + z1.x2 is even."""
        if self.n != other.n:
            raise ValueError("length mismatch")
        return (_parity(self.x & other.z) ^ _parity(self.z & other.x)) == 0

    def mul(self, other: "PauliString") -> "PauliString":
        """Group product self * other with exact phase."""
        if self.n != other.n:
            raise ValueError("length mismatch")
        # X^x2 moves left through Z^z1, each crossing gives -1.
        phase = self.phase_exp + other.phase_exp + 2 * _parity(self.z & other.x)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    __mul__ = mul

    def adjoint(self) -> "PauliString":
        # (i^s P)^dag = i^{-s} P for the Hermitian X^x Z^z ... not Hermitian
        # in general: (X^x Z^z)^dag = Z^z X^x = (-1)^{x.z} X^x Z^z.
        phase = -self.phase_exp + 2 * _parity(self.x & self.z)
        return PauliString(self.n, self.x, self.z, phase)

    def negate(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.phase_exp + 2)

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(
            self.n + other.n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase_exp + other.phase_exp,
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliString)
            and self.n == other.n
            and self.x == other.x
            and self.z == other.z
            and self.phase_exp == other.phase_exp
        )

    def __hash__(self) -> int:
        return hash((self.n, self.x, self.z, self.phase_exp))

    def __repr__(self) -> str:
        return f"PauliString({self.to_label()!r})"


@dataclass(frozen=True)
class CliffordGate:
    """A named Clifford gate acting on explicit qubit targets."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in CLIFFORD_KINDS:
            raise ValueError(f"unknown Clifford gate {self.kind!r}")
        arity = CLIFFORD_KINDS[self.kind]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s)")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("repeated qubit target")


def conjugate(gate: CliffordGate, p: PauliString) -> PauliString:
    """Return g p g-dagger, phase-exact."""
    for q in gate.qubits:
        if not 0 <= q < p.n:
            raise ValueError(f"gate target {q} out of range for n={p.n}")
    x, z, s = p.x, p.z, p.phase_exp
    kind = gate.kind
    if kind == "CZ":
        # CZ = H(t) CNOT(c,t) H(t)
        c, t = gate.qubits
        for g in (CliffordGate("H", (t,)), CliffordGate("CNOT", (c, t)),
                  CliffordGate("H", (t,))):
            p = conjugate(g, p)
        return p
    if kind in ("H", "S", "SDG", "X", "Y", "Z"):
        q = gate.qubits[0]
        b = 1 << q
        xq, zq = x & b, z & b
        if kind == "H":
            if xq and zq:  # Y -> -Y
                s += 2
            x = (x & ~b) | (b if zq else 0)
            z = (z & ~b) | (b if xq else 0)
        elif kind == "S":
            if xq:
                z ^= b
                s += 1
        elif kind == "SDG":
            if xq:
                z ^= b
                s += 3
        elif kind == "X":
            if zq:
                s += 2
        elif kind == "Y":
            if bool(xq) ^ bool(zq):
                s += 2
        elif kind == "Z":
            if xq:
                s += 2
        return PauliString(p.n, x, z, s)
    if kind == "CNOT":
        c, t = gate.qubits
        bc, bt = 1 << c, 1 << t
        # X_c -> X_c X_t and Z_t -> Z_c Z_t; in the i^s X^x Z^z
        # convention the rearrangement to canonical form is phase-free.
        if x & bc:
            x ^= bt
        if z & bt:
            z ^= bc
        return PauliString(p.n, x, z, s)
    if kind == "SWAP":
        a, b_ = gate.qubits
        xa, za = (x >> a) & 1, (z >> a) & 1
        xb, zb = (x >> b_) & 1, (z >> b_) & 1
        x &= ~((1 << a) | (1 << b_))
        z &= ~((1 << a) | (1 << b_))
        x |= (xb << a) | (xa << b_)
        z |= (zb << a) | (za << b_)
        return PauliString(p.n, x, z, s)
    raise AssertionError(kind)
