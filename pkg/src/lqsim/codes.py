"""Code families: rotated surface codes, the d=3 color code, the cube code.

Each CssCode carries stabilizer generators, logical operators, coordinates,
and a catalog of transversal-gate specs.  Encoding circuits are emitted as
Circuit objects over data qubits (plus stabilizer ancillas for the surface
code).  All structural claims (commutation, distances, logical actions of
transversal patterns) are locked by tests against dense oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuits import Circuit
from .pauli import PauliString

__all__ = ["CssCode", "TransversalGateSpec", "EncodingCircuit",
           "build_rotated_surface_code", "build_color_code_d3",
           "build_832_code", "encoding_circuit", "expand_transversal",
           "export_code_text"]


def pauli_on(n: int, qubits, letter: str) -> PauliString:
    x = z = 0
    for q in qubits:
        if letter == "X":
            x |= 1 << q
        elif letter == "Z":
            z |= 1 << q
        else:
            raise ValueError(letter)
    return PauliString(n, x, z, 0)


@dataclass(frozen=True)
class TransversalGateSpec:
    """Per-qubit instruction pattern implementing one logical gate.

    kind "onsite": gates[q] applied to qubit q of the block ("I" = skip).
    kind "permutation": perm[q] is where qubit q's state goes (in-block
    relabeling realized by SWAPs or physical moves).
    kind "interblock": pairwise physical CNOTs control-block -> target-block.
    logical_label documents the claimed logical action.
    """

    label: str
    kind: str
    logical_label: str
    gates: tuple[str, ...] = ()
    perm: tuple[int, ...] = ()


@dataclass(frozen=True)
class CssCode:
    name: str
    n: int
    k: int
    d_x: int
    d_z: int
    x_stabilizers: tuple[PauliString, ...]
    z_stabilizers: tuple[PauliString, ...]
    logical_x: tuple[PauliString, ...]
    logical_z: tuple[PauliString, ...]
    qubit_coords: tuple[tuple[float, ...], ...]
    transversal: tuple[TransversalGateSpec, ...] = ()

    def stabilizers(self):
        return self.x_stabilizers + self.z_stabilizers

    def spec(self, label: str) -> TransversalGateSpec:
        for s in self.transversal:
            if s.label == label:
                return s
        raise KeyError(label)


@dataclass
class EncodingCircuit:
    """Preparation circuit plus bookkeeping for its ancilla readout."""

    circuit: Circuit
    data_qubits: tuple[int, ...]
    anc_keys: dict[str, int] = field(default_factory=dict)  # key -> stab index
    anc_basis: dict[str, str] = field(default_factory=dict)  # key -> X or Z
    fault_tolerant: bool = False


# -- rotated surface code ------------------------------------------------

def _surface_plaquettes(d: int):
    """(type, [data indices], center) for all d*d-1 stabilizers.

    Data qubit (r, c) -> index r*d + c.  Bulk plaquette at (r, c) covers the
    2x2 square with corner (r, c); X type when r+c is even.  Weight-2 halves
    continue the checkerboard: Z along top/bottom rows, X along the sides.
    """
    plaq = []
    for r in range(d - 1):
        for c in range(d - 1):
            t = "X" if (r + c) % 2 == 0 else "Z"
            qs = [r * d + c, r * d + c + 1, (r + 1) * d + c, (r + 1) * d + c + 1]
            plaq.append((t, qs, (r + 0.5, c + 0.5)))
    for c in range(d - 1):
        if c % 2 == 0:  # virtual row -1, odd parity -> Z
            plaq.append(("Z", [c, c + 1], (-0.5, c + 0.5)))
        else:  # virtual row d-1 below: parity (d-1+c) odd for odd d
            plaq.append(("Z", [(d - 1) * d + c, (d - 1) * d + c + 1],
                         (d - 0.5, c + 0.5)))
    for r in range(d - 1):
        if r % 2 == 1:  # virtual column -1: parity (r-1) even -> X
            plaq.append(("X", [r * d, (r + 1) * d], (r + 0.5, -0.5)))
        else:  # virtual column d-1: parity (r+d-1) even for odd d
            plaq.append(("X", [r * d + d - 1, (r + 1) * d + d - 1],
                         (r + 0.5, d - 0.5)))
    return plaq


def build_rotated_surface_code(d: int) -> CssCode:
    if d not in (3, 5, 7):
        raise ValueError(f"unsupported distance {d}")
    n = d * d
    plaq = _surface_plaquettes(d)
    xs = tuple(pauli_on(n, qs, "X") for t, qs, _ in plaq if t == "X")
    zs = tuple(pauli_on(n, qs, "Z") for t, qs, _ in plaq if t == "Z")
    # X_L along row 0, Z_L along column 0
    lx = pauli_on(n, range(d), "X")
    lz = pauli_on(n, [r * d for r in range(d)], "Z")
    coords = tuple((float(q // d), float(q % d)) for q in range(n))
    return CssCode(f"surface_d{d}", n, 1, d, d, xs, zs, (lx,), (lz,), coords)


def surface_plaquette_info(d: int):
    """Public view of (type, data qubits, center) per stabilizer, in the
    same order the stabilizer lists and measurement schedule use."""
    plaq = _surface_plaquettes(d)
    return ([p for p in plaq if p[0] == "X"] + [p for p in plaq if p[0] == "Z"])


# -- d=3 color code (7-qubit code) ---------------------------------------

_STEANE_PLAQUETTES = ((3, 4, 5, 6), (1, 2, 5, 6), (0, 2, 4, 6))


def build_color_code_d3() -> CssCode:
    n = 7
    xs = tuple(pauli_on(n, qs, "X") for qs in _STEANE_PLAQUETTES)
    zs = tuple(pauli_on(n, qs, "Z") for qs in _STEANE_PLAQUETTES)
    lx = pauli_on(n, (0, 1, 2), "X")
    lz = pauli_on(n, (0, 1, 2), "Z")
    coords = ((0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 2.0),
              (1.0, 2.0), (2.0, 2.0), (1.0, 3.0))
    transversal = (
        TransversalGateSpec("H", "onsite", "H_L", gates=("H",) * 7),
        TransversalGateSpec("S", "onsite", "S_L", gates=("SDG",) * 7),
        TransversalGateSpec("SDG", "onsite", "SDG_L", gates=("S",) * 7),
    )
    return CssCode("color_d3", n, 1, 3, 3, xs, zs, (lx,), (lz,), coords,
                   transversal)


# -- [[8,3,2]] cube code -------------------------------------------------

def _cube_bit(q: int, axis: int) -> int:
    """Coordinate v_axis (axis in 1..3) of cube vertex q = v1 + 2 v2 + 4 v3."""
    return (q >> (axis - 1)) & 1


_CUBE_XL = {1: (0, 1, 2, 3), 2: (0, 1, 4, 5), 3: (0, 2, 4, 6)}
_CUBE_ZL = {1: (0, 4), 2: (0, 2), 3: (0, 1)}
_CUBE_ZSTABS = ((0, 2, 4, 6), (0, 1, 4, 5), (0, 1, 2, 3), (1, 3, 5, 7))
# S-face pattern on face v_axis = 0 realizes CZ on this logical pair
_S_FACE_PAIR = {1: (1, 2), 2: (1, 3), 3: (2, 3)}


def _s_face_gates(axis: int) -> tuple[str, ...]:
    gates = ["I"] * 8
    others = [a for a in (1, 2, 3) if a != axis]
    for q in range(8):
        if _cube_bit(q, axis):
            continue
        par = _cube_bit(q, others[0]) ^ _cube_bit(q, others[1])
        gates[q] = "SDG" if par else "S"
    return tuple(gates)


def build_832_code() -> CssCode:
    n = 8
    xs = (pauli_on(n, range(8), "X"),)
    zs = tuple(pauli_on(n, qs, "Z") for qs in _CUBE_ZSTABS)
    lx = tuple(pauli_on(n, _CUBE_XL[i], "X") for i in (1, 2, 3))
    lz = tuple(pauli_on(n, _CUBE_ZL[i], "Z") for i in (1, 2, 3))
    coords = tuple((float(_cube_bit(q, 1)), float(_cube_bit(q, 2)),
                    float(_cube_bit(q, 3))) for q in range(8))
    # permutation: swap 2<->6 and 3<->7 (vertices across the v3 axis on the
    # v2=1 face) realizes CNOT from logical 1 onto logical 2
    perm = list(range(8))
    perm[2], perm[6] = 6, 2
    perm[3], perm[7] = 7, 3
    transversal = (
        TransversalGateSpec(
            "GLOBAL_TDG", "onsite",
            "CCZ_L123 CZ_L12 CZ_L13 CZ_L23 Z_L1 Z_L2 Z_L3",
            gates=("TDG",) * 8),
        TransversalGateSpec(
            "T_FACE", "onsite", "CCZ_L123 CZ_L13 CZ_L23 Z_L3",
            gates=tuple("T" if _cube_bit(q, 1) else "TDG" for q in range(8))),
        TransversalGateSpec("S_FACE_1", "onsite", "CZ_L12",
                            gates=_s_face_gates(1)),
        TransversalGateSpec("S_FACE_2", "onsite", "CZ_L13",
                            gates=_s_face_gates(2)),
        TransversalGateSpec("S_FACE_3", "onsite", "CZ_L23",
                            gates=_s_face_gates(3)),
        TransversalGateSpec("PERM_CNOT_12", "permutation", "CNOT_L1->L2",
                            perm=tuple(perm)),
        TransversalGateSpec("INTERBLOCK_CNOT", "interblock",
                            "CNOT_L1 CNOT_L2 CNOT_L3"),
    )
    return CssCode("cube_832", n, 3, 4, 2, xs, zs, lx, lz, coords, transversal)


# -- encoding circuits ---------------------------------------------------

# plaquette measurement order within the 2x2 square, per ancilla type.
# A mid-round ancilla fault leaves a Pauli pair on the last two data qubits
# touched, so each sweep ends on a pair perpendicular to the logical of the
# same type: X ancillas finish on a vertical pair (X_L runs along a row),
# Z ancillas on a horizontal pair (Z_L runs down a column).
SURFACE_SCHEDULE = {"X": (0, 2, 1, 3), "Z": (0, 1, 2, 3)}


def _surface_encoding(code: CssCode, d: int, target: str) -> EncodingCircuit:
    n_data = d * d
    plaq = surface_plaquette_info(d)
    circ = Circuit(n_data + len(plaq))
    data = tuple(range(n_data))
    if target == "+":
        for q in data:
            circ.gate("H", q)
    elif target != "0":
        raise ValueError(f"unsupported target state {target!r}")
    anc_keys: dict[str, int] = {}
    anc_basis: dict[str, str] = {}
    for i, (t, qs, _) in enumerate(plaq):
        anc = n_data + i
        if t == "X":
            circ.gate("H", anc)
        for step in SURFACE_SCHEDULE[t]:
            if step >= len(qs):
                continue
            q = qs[step]
            if t == "X":
                circ.gate("CNOT", anc, q)
            else:
                circ.gate("CNOT", q, anc)
        if t == "X":
            circ.gate("H", anc)
        key = f"prep_{t}{i}"
        circ.measure(anc, key)
        anc_keys[key] = i
        anc_basis[key] = t
    return EncodingCircuit(circ, data, anc_keys, anc_basis, fault_tolerant=False)


# 9-CNOT graph-style Steane encoder: |+> sources on 0, 1, 3 fan out onto
# the X plaquettes; produces |0_L> with every stabilizer +1
_STEANE_ENCODER = ((3, 4), (3, 5), (3, 6), (1, 2), (1, 5), (1, 6),
                   (0, 2), (0, 4), (0, 6))


def _color_encoding(target: str) -> EncodingCircuit:
    circ = Circuit(7)
    for q in (0, 1, 3):
        circ.gate("H", q)
    for c, t in _STEANE_ENCODER:
        circ.gate("CNOT", c, t)
    if target == "+":
        # transversal H maps |0_L> to |+_L> (self-dual code)
        for q in range(7):
            circ.gate("H", q)
    elif target != "0":
        raise ValueError(f"unsupported target state {target!r}")
    return EncodingCircuit(circ, tuple(range(7)), fault_tolerant=False)


def _cube_encoding(target: str) -> EncodingCircuit:
    if target != "-+-":
        raise ValueError(f"unsupported target state {target!r}")
    circ = Circuit(8)
    circ.gate("H", 0)
    for t in (2, 4, 6):
        circ.gate("CNOT", 0, t)
    circ.gate("H", 1)
    for t in (3, 5, 7):
        circ.gate("CNOT", 1, t)
    for q in (1, 3, 5, 7):
        circ.gate("H", q)
    for c, t in ((1, 0), (3, 2), (5, 4), (7, 6)):
        circ.gate("CNOT", c, t)
    # explicit sign fix: leaves every stabilizer genuinely +1
    for q in (1, 4):
        circ.gate("Z", q)
    return EncodingCircuit(circ, tuple(range(8)), fault_tolerant=False)


def encoding_circuit(code: CssCode, target: str) -> EncodingCircuit:
    """Preparation circuit for |0_L>/|+_L> (surface, color) or the cube
    code's |-,+,-> product of logical X eigenstates (target "-+-")."""
    if code.name.startswith("surface_d"):
        return _surface_encoding(code, int(code.name[-1]), target)
    if code.name == "color_d3":
        return _color_encoding(target)
    if code.name == "cube_832":
        return _cube_encoding(target)
    raise ValueError(f"no encoder for {code.name}")


# -- transversal expansion ----------------------------------------------

def expand_transversal(spec: TransversalGateSpec, circuit: Circuit,
                       offset: int, target_offset: int | None = None,
                       n: int = 8):
    """Append the physical realization of a transversal spec to a circuit.

    offset: first qubit of the (control) block; target_offset is required
    for interblock specs.
    """
    if spec.kind == "onsite":
        for q, g in enumerate(spec.gates):
            if g != "I":
                circuit.gate(g, offset + q)
    elif spec.kind == "permutation":
        # decompose the relabeling into SWAPs
        perm = list(spec.perm)
        for q in range(len(perm)):
            while perm[q] != q:
                j = perm[q]
                circuit.gate("SWAP", offset + q, offset + j)
                perm[q], perm[j] = perm[j], perm[q]
    elif spec.kind == "interblock":
        if target_offset is None:
            raise ValueError("interblock spec needs a target block")
        for q in range(n):
            circuit.gate("CNOT", offset + q, target_offset + q)
    else:
        raise ValueError(spec.kind)
    return circuit


def encoded_zbasis_state(code: CssCode, bits):
    """Dense |b_1 ... b_k>_L: project |0...0> onto the codespace, then apply
    logical X for each set bit.  Fixes the logical phase convention used by
    the gate-identity tests and the physical sampling path."""
    from .statevector import StateVector  # local import to keep codes light
    import numpy as np

    sv = StateVector(code.n)
    idx = np.arange(1 << code.n)
    for s in code.x_stabilizers:
        assert s.z == 0 and s.phase_exp == 0
        sv.amps = (sv.amps + sv.amps[idx ^ s.x]) / np.sqrt(2)
    for i, b in enumerate(bits):
        if b:
            sv.apply_pauli(code.logical_x[i])
    return sv


# -- text export ---------------------------------------------------------

def export_code_text(code: CssCode) -> str:
    """Letter-notation dump of a code's structure (q0 leftmost)."""
    lines = [f"code {code.name}",
             f"params [[{code.n},{code.k},{code.d_z}]] dx={code.d_x} dz={code.d_z}"]
    for tag, ops in (("x_stabilizer", code.x_stabilizers),
                     ("z_stabilizer", code.z_stabilizers),
                     ("logical_x", code.logical_x),
                     ("logical_z", code.logical_z)):
        for p in ops:
            lines.append(f"{tag} {p.to_label(with_phase=False)}")
    return "\n".join(lines) + "\n"
