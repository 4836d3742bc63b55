"""Detectors, observables, and decoding-hypergraph construction.

Detectors and logical observables are parities of measurement-record keys.
Each noise mechanism is turned into a hyperedge by propagating its Pauli
fault symbolically through the remainder of the circuit (Pauli-frame
tracking: CNOT copies X control->target and Z target->control, a frame X
on a measured qubit flips that record bit, resets clear the frame) and
collecting which detector/observable parities flip.  Mechanisms with equal
flip signatures merge into one hyperedge with XOR-combined probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit
from .noise import NoisyCircuit, ErrorMechanism
from .pauli import CliffordGate, PauliString, conjugate

__all__ = ["DetectorSpec", "ObservableSpec", "Hyperedge",
           "DecodingHypergraph", "build_hypergraph", "detector_values",
           "observable_values", "mechanism_flip_signature",
           "calibrate_expected", "scale_interlogical"]


@dataclass(frozen=True)
class DetectorSpec:
    """Parity of measurement keys with a fixed noiseless value `expected`.

    block: label used to classify hyperedges as inter-logical and to
    restrict decoding per code block.
    """

    id: int
    keys: frozenset[str]
    block: str = ""
    expected: int = 0


@dataclass(frozen=True)
class ObservableSpec:
    """Logical observable read out as a parity of measurement keys;
    expected is its noiseless value (0 or 1)."""

    id: int
    keys: frozenset[str]
    expected: int = 0


@dataclass(frozen=True)
class Hyperedge:
    id: int
    p: float
    det_mask: int
    obs_mask: int
    inter_logical: bool
    mechanism_ids: tuple[int, ...] = ()

    @property
    def weight(self) -> float:
        return float(np.log((1 - self.p) / self.p))


@dataclass
class DecodingHypergraph:
    detectors: list[DetectorSpec]
    observables: list[ObservableSpec]
    edges: list[Hyperedge] = field(default_factory=list)

    @property
    def n_detectors(self) -> int:
        return len(self.detectors)

    def syndrome_of(self, fired_edges) -> int:
        s = 0
        for e in fired_edges:
            s ^= e.det_mask
        return s


def _propagate_fault(circuit: Circuit, start_index: int,
                     pauli: tuple[tuple[int, str], ...]) -> frozenset[str]:
    """Keys whose recorded bits flip when the fault fires, ideal elsewhere."""
    frame = PauliString.identity(circuit.n)
    for q, let in pauli:
        frame = frame * PauliString.single(circuit.n, q, let)
    flipped: set[str] = set()
    for ins in circuit.instructions[start_index + 1:]:
        if ins.kind == "M":
            q = ins.qubits[0]
            if (frame.x >> q) & 1:
                flipped.add(ins.key)
        elif ins.kind == "R":
            q = ins.qubits[0]
            bit = 1 << q
            frame = PauliString(frame.n, frame.x & ~bit, frame.z & ~bit, 0)
        elif ins.kind == "IDLE":
            pass
        elif ins.cond is not None:
            raise ValueError("feedforward circuits are not hypergraph-decodable")
        else:
            frame = conjugate(CliffordGate(ins.kind, ins.qubits), frame)
    return frozenset(flipped)


def mechanism_flip_signature(circuit: Circuit, mech: ErrorMechanism,
                             detectors, observables):
    if mech.flips_key is not None:
        flipped = frozenset([mech.flips_key])
    else:
        flipped = _propagate_fault(circuit, mech.after_index, mech.pauli)
    det_mask = obs_mask = 0
    for d in detectors:
        if len(d.keys & flipped) % 2:
            det_mask |= 1 << d.id
    for o in observables:
        if len(o.keys & flipped) % 2:
            obs_mask |= 1 << o.id
    return det_mask, obs_mask


def build_hypergraph(nc: NoisyCircuit, detectors: list[DetectorSpec],
                     observables: list[ObservableSpec]) -> DecodingHypergraph:
    if not nc.circuit.is_clifford():
        raise ValueError("hypergraph extraction needs a Clifford circuit")
    block_of = {d.id: d.block for d in detectors}
    merged: dict[tuple[int, int], tuple[float, list[int]]] = {}
    for m in nc.mechanisms:
        det_mask, obs_mask = mechanism_flip_signature(
            nc.circuit, m, detectors, observables)
        if det_mask == 0 and obs_mask == 0:
            continue
        key = (det_mask, obs_mask)
        p_old, ids = merged.get(key, (0.0, []))
        # two independent events flip the signature iff exactly one fires
        merged[key] = (p_old * (1 - m.p) + m.p * (1 - p_old), ids + [m.id])
    edges = []
    for (det_mask, obs_mask), (p, ids) in sorted(merged.items()):
        blocks = {block_of[i] for i in _bits(det_mask)}
        edges.append(Hyperedge(len(edges), p, det_mask, obs_mask,
                               inter_logical=len(blocks) > 1,
                               mechanism_ids=tuple(ids)))
    return DecodingHypergraph(list(detectors), list(observables), edges)


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def detector_values(detectors, record: dict[str, int]) -> int:
    """Measured syndrome as a bitmask over detector ids."""
    s = 0
    for d in detectors:
        v = d.expected
        for k in d.keys:
            v ^= record[k]
        if v:
            s |= 1 << d.id
    return s


def calibrate_expected(circuit, detectors, observables, seed=0):
    """Pin detector/observable noiseless parities from one ideal run.

    Detector and observable parities are deterministic on noiseless shots,
    so a single trajectory fixes them; basis-change prefactors in the
    readout (e.g. transversal S before measurement) can make them 1.
    """
    from .noise import run_circuit
    record, _ = run_circuit(circuit, rng=np.random.default_rng(seed))
    dets = []
    for d in detectors:
        v = 0
        for k in d.keys:
            v ^= record[k]
        dets.append(DetectorSpec(d.id, d.keys, d.block, v))
    obs = []
    for o in observables:
        v = 0
        for k in o.keys:
            v ^= record[k]
        obs.append(ObservableSpec(o.id, o.keys, v))
    return dets, obs


def observable_values(observables, record: dict[str, int]) -> dict[int, int]:
    out = {}
    for o in observables:
        v = 0
        for k in o.keys:
            v ^= record[k]
        out[o.id] = v
    return out


def scale_interlogical(h: DecodingHypergraph, factor: float) -> DecodingHypergraph:
    """Rescale inter-logical edge probabilities before weight computation.

    factor 0 removes inter-logical edges entirely (conventional decoding);
    probabilities are clamped below 0.5.
    """
    if factor < 0:
        raise ValueError("factor must be nonnegative")
    edges = []
    for e in h.edges:
        if not e.inter_logical or factor == 1.0:
            edges.append(Hyperedge(len(edges), e.p, e.det_mask, e.obs_mask,
                                   e.inter_logical, e.mechanism_ids))
            continue
        p = e.p * factor
        if p <= 0:
            continue
        if p >= 0.5:
            import warnings
            warnings.warn("inter-logical scaling clamped probability at 0.5")
            p = 0.4999999
        edges.append(Hyperedge(len(edges), p, e.det_mask, e.obs_mask,
                               e.inter_logical, e.mechanism_ids))
    return DecodingHypergraph(h.detectors, h.observables, edges)


# -- text formats (versioned, line oriented) -----------------------------

FORMAT_VERSION = "hypergraph-v1"


def export_hypergraph(h: DecodingHypergraph) -> str:
    lines = [FORMAT_VERSION, f"detectors {h.n_detectors}",
             f"observables {len(h.observables)}"]
    for d in h.detectors:
        lines.append(f"detector {d.id} {d.block} {d.expected} "
                     + ",".join(sorted(d.keys)))
    for o in h.observables:
        lines.append(f"observable {o.id} {o.expected} " + ",".join(sorted(o.keys)))
    for e in h.edges:
        dets = ",".join(str(i) for i in _bits(e.det_mask)) or "-"
        obs = ",".join(str(i) for i in _bits(e.obs_mask)) or "-"
        lines.append(f"edge {e.p:.12g} {dets} {obs}")
    return "\n".join(lines) + "\n"


def import_hypergraph(text: str) -> DecodingHypergraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines[0] != FORMAT_VERSION:
        raise ValueError(f"unsupported format {lines[0]!r}")
    detectors, observables, edges = [], [], []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "detector":
            keys = frozenset(parts[4].split(",")) if len(parts) > 4 else frozenset()
            detectors.append(DetectorSpec(int(parts[1]), keys, parts[2],
                                          int(parts[3])))
        elif parts[0] == "observable":
            keys = frozenset(parts[3].split(",")) if len(parts) > 3 else frozenset()
            observables.append(ObservableSpec(int(parts[1]), keys, int(parts[2])))
        elif parts[0] == "edge":
            p = float(parts[1])
            det_mask = obs_mask = 0
            if parts[2] != "-":
                for i in parts[2].split(","):
                    det_mask |= 1 << int(i)
            if parts[3] != "-":
                for i in parts[3].split(","):
                    obs_mask |= 1 << int(i)
            block_of = {d.id: d.block for d in detectors}
            blocks = {block_of[i] for i in _bits(det_mask)}
            edges.append(Hyperedge(len(edges), p, det_mask, obs_mask,
                                   len(blocks) > 1))
    return DecodingHypergraph(detectors, observables, edges)
