"""Hypercube IQP circuits over [[8,3,2]] blocks: exact logical output
distributions (dense or split-contraction), bitstring sampling, XEB
scoring, the split-halves spoofing attack, anticoncentration scans, and
the classical-cost model.

A plan arranges 2^D blocks of 3 logical qubits on a D-dimensional
hypercube.  Layers alternate between in-block diagonal gates (drawn from
CCZ / pairwise CZ / single Z on the block triple) and transversal CNOT
layers along one hypercube axis.  Every block starts in the X-basis
product state |-,+,->, and readout is in the X basis, so the whole
circuit is Hadamard-conjugated diagonal evolution: amplitudes follow from
phase accumulation plus Walsh-Hadamard transforms.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit
from .codes import (_CUBE_XL, _CUBE_ZL, build_832_code, encoding_circuit,
                    expand_transversal)
from .noise import NoiseModel, attach_noise, sample_fired
from .statevector import StateVector

__all__ = ["InBlockLayer", "OutBlockLayer", "HypercubeCircuit",
           "BitstringDistribution", "XebResult", "parse_plan", "format_plan",
           "load_plan", "random_plan", "gate_census", "simulate_logical",
           "sample_bitstrings", "xeb", "depolarized_samples",
           "spoof_split_halves", "anticoncentration_study", "cost_estimate",
           "clifford_self_xeb", "physical_circuit", "run_physical",
           "PLAN_FORMAT_VERSION"]

PLAN_FORMAT_VERSION = "hypercube-plan-v1"

# diagonal tokens on a block triple (logical qubits 1,2,3), plus in-block
# qubit permutations realized by transversal permutation CNOTs
_DIAG_TOKENS = ("CCZ", "CZ12", "CZ13", "CZ23", "Z1", "Z2", "Z3")
_PERM_TOKENS = ("SWAP12", "SWAP13", "SWAP23")
# the two transversal T patterns realize these diagonal combinations
ALIASES = {
    "TDG": ("CCZ", "CZ12", "CZ13", "CZ23", "Z1", "Z2", "Z3"),
    "TFACE": ("CCZ", "CZ13", "CZ23", "Z3"),
}
_DENSE_MAX_D = 3


@dataclass(frozen=True)
class InBlockLayer:
    gates: tuple[tuple[str, ...], ...]   # per block, tokens from _DIAG_TOKENS


@dataclass(frozen=True)
class OutBlockLayer:
    axis: int
    control_low: bool = True   # control on the block with the axis bit clear


@dataclass
class HypercubeCircuit:
    D: int
    layers: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.D <= 4:
            raise ValueError(f"dimension {self.D} outside [0, 4]")
        for lay in self.layers:
            if isinstance(lay, OutBlockLayer):
                if not 0 <= lay.axis < self.D:
                    raise ValueError(f"axis {lay.axis} invalid for D={self.D}")
            elif isinstance(lay, InBlockLayer):
                if len(lay.gates) != self.n_blocks:
                    raise ValueError("in-block layer must cover every block")
                for g in lay.gates:
                    for tok in g:
                        if tok not in _DIAG_TOKENS and tok not in _PERM_TOKENS:
                            raise ValueError(f"unknown gate token {tok!r}")
            else:
                raise ValueError(f"unknown layer {lay!r}")

    @property
    def n_blocks(self) -> int:
        return 1 << self.D

    @property
    def n_logical(self) -> int:
        return 3 * self.n_blocks


# -- plan text format -----------------------------------------------------

def _parse_blockspec(tok: str) -> tuple[str, ...]:
    out: list[str] = []
    for part in tok.split(","):
        if part in ALIASES:
            out.extend(ALIASES[part])
        elif part in _DIAG_TOKENS or part in _PERM_TOKENS:
            out.append(part)
        elif part == "I":
            pass
        else:
            raise ValueError(f"unknown gate token {part!r}")
    return tuple(out)


def parse_plan(text: str) -> HypercubeCircuit:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if lines[0] != PLAN_FORMAT_VERSION:
        raise ValueError(f"unsupported plan format {lines[0]!r}")
    if not lines[1].startswith("D "):
        raise ValueError("missing dimension line")
    D = int(lines[1].split()[1])
    nb = 1 << D
    layers: list = []
    for ln in lines[2:]:
        parts = ln.split()
        if parts[0] == "inblock":
            gates: list[tuple[str, ...]] = [()] * nb
            for spec in parts[1:]:
                which, _, gl = spec.partition(":")
                gs = _parse_blockspec(gl)
                if which == "*":
                    gates = [gs] * nb
                else:
                    gates[int(which)] = gs
            layers.append(InBlockLayer(tuple(gates)))
        elif parts[0] == "outblock":
            layers.append(OutBlockLayer(int(parts[1]), parts[2] == "lo"))
        else:
            raise ValueError(f"unknown plan line {ln!r}")
    return HypercubeCircuit(D, layers)


def format_plan(c: HypercubeCircuit) -> str:
    lines = [PLAN_FORMAT_VERSION, f"D {c.D}"]
    for lay in c.layers:
        if isinstance(lay, InBlockLayer):
            lines.append("inblock " + " ".join(
                f"{b}:{','.join(g) if g else 'I'}"
                for b, g in enumerate(lay.gates)))
        else:
            lines.append(f"outblock {lay.axis} "
                         f"{'lo' if lay.control_low else 'hi'}")
    return "\n".join(lines) + "\n"


def load_plan(name: str) -> HypercubeCircuit:
    path = os.path.join(os.path.dirname(__file__), "plans", name + ".txt")
    with open(path) as f:
        return parse_plan(f.read())


def random_plan(D: int, seed: int, non_clifford: bool = True,
                rounds: int | None = None) -> HypercubeCircuit:
    """Seed-deterministic plan: one in-block layer per round followed by an
    out-block layer cycling through the axes (none at D=0)."""
    rng = np.random.default_rng(seed)
    nb = 1 << D
    if rounds is None:
        rounds = max(2 * D, 1)
    layers: list = []
    for r in range(rounds):
        gates = []
        for _ in range(nb):
            if non_clifford:
                # dense in-block content: one T pattern per block per round
                g = ALIASES["TDG"] if rng.random() < 0.5 \
                    else ALIASES["TFACE"]
            else:
                g = tuple(t for t in _DIAG_TOKENS[1:]
                          if rng.random() < 0.5)
            # free in-block qubit shuffle (transversal permutation CNOTs)
            g = g + (_PERM_TOKENS[rng.integers(3)],) \
                if rng.random() < 0.75 else g
            gates.append(g)
        layers.append(InBlockLayer(tuple(gates)))
        if D > 0:
            layers.append(OutBlockLayer(r % D, bool(rng.integers(2))))
    return HypercubeCircuit(D, layers)


def gate_census(c: HypercubeCircuit) -> dict[str, int]:
    """Counts of applied logical gates (single-qubit Zs not tallied)."""
    ccz = cz = cnot = 0
    for lay in c.layers:
        if isinstance(lay, InBlockLayer):
            for g in lay.gates:
                ccz += sum(1 for t in g if t == "CCZ")
                cz += sum(1 for t in g if t.startswith("CZ"))
        else:
            cnot += 3 * (c.n_blocks // 2)
    return {"CCZ": ccz, "CZ": cz, "CNOT": cnot}


# -- exact simulation -----------------------------------------------------

# block-local initial X-basis pattern: |-,+,->
_MINUS_PATTERN = (1, 0, 1)


def _initial_phase_mask(n_blocks: int) -> int:
    mask = 0
    for b in range(n_blocks):
        for i, m in enumerate(_MINUS_PATTERN):
            if m:
                mask |= 1 << (3 * b + i)
    return mask


def _apply_layers(amps: np.ndarray, c: HypercubeCircuit, blocks: range):
    """Evolve the diagonal-frame amplitudes of a contiguous block range."""
    base = blocks.start
    nq = 3 * len(blocks)
    idx = np.arange(amps.size, dtype=np.int64)

    def bit(q):
        return (idx >> q) & 1

    for lay in c.layers:
        if isinstance(lay, InBlockLayer):
            phase = np.zeros(amps.size, dtype=np.int64)
            for b in blocks:
                q0 = 3 * (b - base)
                for tok in lay.gates[b]:
                    if tok == "CCZ":
                        phase += bit(q0) & bit(q0 + 1) & bit(q0 + 2)
                    elif tok.startswith("CZ"):
                        i, j = int(tok[2]) - 1, int(tok[3]) - 1
                        phase += bit(q0 + i) & bit(q0 + j)
                    elif tok.startswith("SWAP"):
                        # permutations do not commute with the diagonal
                        # part, so flush accumulated phases first
                        amps = np.where(phase & 1, -amps, amps)
                        phase[:] = 0
                        p1 = q0 + int(tok[4]) - 1
                        p2 = q0 + int(tok[5]) - 1
                        diff = ((idx >> p1) ^ (idx >> p2)) & 1
                        amps = amps[idx ^ (diff << p1) ^ (diff << p2)]
                    else:
                        phase += bit(q0 + int(tok[1]) - 1)
            amps = np.where(phase & 1, -amps, amps)
        else:
            lo = 1 << lay.axis
            if not (blocks.start % (2 * lo) == 0 and len(blocks) % (2 * lo) == 0):
                raise ValueError("out-block layer crosses the block range")
            perm = idx
            for b in blocks:
                if b & lo:
                    continue
                bl, bh = b - base, b - base + lo
                cq, tq = (bl, bh) if lay.control_low else (bh, bl)
                for i in range(3):
                    cbit = (perm >> (3 * cq + i)) & 1
                    perm = perm ^ (cbit << (3 * tq + i))
            amps = amps[perm]
    return amps


def _half_distribution(c: HypercubeCircuit, blocks: range,
                       layers_mask=None) -> np.ndarray:
    """|WHT|^2 over one contiguous block range, skipping masked layers."""
    nq = 3 * len(blocks)
    idx = np.arange(1 << nq, dtype=np.int64)
    local_mask = _initial_phase_mask(len(blocks))
    amps = np.where(_popcount_odd(idx & local_mask), -1.0, 1.0)
    amps = amps / np.sqrt(1 << nq)
    sub = HypercubeCircuit(c.D, [lay for k, lay in enumerate(c.layers)
                                 if layers_mask is None or layers_mask[k]])
    amps = _apply_layers(amps, sub, blocks)
    from .statevector import walsh_hadamard
    amps = walsh_hadamard(amps)
    return np.abs(amps) ** 2


def logical_state(c: HypercubeCircuit) -> np.ndarray:
    """Real amplitude vector of the logical output state (dense sizes)."""
    if c.D > _DENSE_MAX_D:
        raise ValueError("logical state too large for dense amplitudes")
    nq = c.n_logical
    idx = np.arange(1 << nq, dtype=np.int64)
    mask = _initial_phase_mask(c.n_blocks)
    amps = np.where(_popcount_odd(idx & mask), -1.0, 1.0) / np.sqrt(1 << nq)
    amps = _apply_layers(amps, c, range(c.n_blocks))
    from .statevector import walsh_hadamard
    return np.real(walsh_hadamard(amps))


def _popcount_odd(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    shift = 1
    while shift < 64:
        out ^= out >> shift
        shift <<= 1
    return (out & 1).astype(bool)


@dataclass
class BitstringDistribution:
    """Dense table (N_L <= 26) or split-contraction oracle for p(x)."""

    n_logical: int
    probs: np.ndarray | None = None
    # split contraction: p(x) = half_a[x_a ^ x_b] * half_b[x_b] (control on
    # the low half) or half_a[x_a] * half_b[x_a ^ x_b]
    half_a: np.ndarray | None = None
    half_b: np.ndarray | None = None
    control_low: bool = True

    def probability(self, x: int) -> float:
        if self.probs is not None:
            return float(self.probs[x])
        nh = self.n_logical // 2
        xa = x & ((1 << nh) - 1)
        xb = x >> nh
        if self.control_low:
            return float(self.half_a[xa ^ xb] * self.half_b[xb])
        return float(self.half_a[xa] * self.half_b[xa ^ xb])

    def probabilities(self, xs: np.ndarray) -> np.ndarray:
        if self.probs is not None:
            return self.probs[xs]
        nh = self.n_logical // 2
        xa = xs & ((1 << nh) - 1)
        xb = xs >> nh
        if self.control_low:
            return self.half_a[xa ^ xb] * self.half_b[xb]
        return self.half_a[xa] * self.half_b[xa ^ xb]

    def self_xeb(self) -> float:
        if self.probs is not None:
            return float((1 << self.n_logical) * np.sum(self.probs ** 2) - 1)
        sa = float(np.sum(self.half_a ** 2))
        sb = float(np.sum(self.half_b ** 2))
        return float((1 << self.n_logical) * sa * sb - 1)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.probs is not None:
            cdf = np.cumsum(self.probs)
            return np.searchsorted(cdf, rng.random(n) * cdf[-1]).astype(np.int64)
        nh = self.n_logical // 2
        ca = np.cumsum(self.half_a)
        cb = np.cumsum(self.half_b)
        u = np.searchsorted(ca, rng.random(n) * ca[-1]).astype(np.int64)
        v = np.searchsorted(cb, rng.random(n) * cb[-1]).astype(np.int64)
        if self.control_low:
            xa, xb = u ^ v, v
        else:
            xa, xb = u, u ^ v
        return xa | (xb << nh)


def simulate_logical(c: HypercubeCircuit,
                     method: str = "auto") -> BitstringDistribution:
    """Exact X-basis output distribution.

    Dense up to D=3 (24 logical qubits); D=4 uses the split contraction:
    both hypercube halves evolve independently until the final axis-(D-1)
    CNOT layer, which folds into the readout as
    p(x_a, x_b) = |phi_a(x_a ^ x_b)|^2 |phi_b(x_b)|^2.
    Pass method="split" to force the contraction at lower D (D >= 1).
    """
    if method not in ("auto", "dense", "split"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense" and c.D > _DENSE_MAX_D:
        raise ValueError("dense table too large beyond D=3")
    if method == "split" and c.D < 1:
        raise ValueError("split contraction needs at least two blocks")
    if c.D <= _DENSE_MAX_D and method != "split":
        probs = _half_distribution(c, range(c.n_blocks))
        return BitstringDistribution(c.n_logical, probs=probs)
    last = c.layers[-1]
    if not (isinstance(last, OutBlockLayer) and last.axis == c.D - 1):
        raise ValueError("split contraction needs the top-axis CNOT layer "
                         "last and nowhere else")
    for lay in c.layers[:-1]:
        if isinstance(lay, OutBlockLayer) and lay.axis == c.D - 1:
            raise ValueError("split contraction needs the top-axis CNOT "
                             "layer last and nowhere else")
    half = c.n_blocks // 2
    mask = [True] * (len(c.layers) - 1) + [False]
    pa = _half_distribution(c, range(0, half), mask)
    pb = _half_distribution(c, range(half, c.n_blocks), mask)
    return BitstringDistribution(c.n_logical, half_a=pa, half_b=pb,
                                 control_low=last.control_low)


# -- sampling and XEB -----------------------------------------------------

def sample_bitstrings(dist: BitstringDistribution, n: int,
                      seed: int) -> np.ndarray:
    return dist.sample(n, np.random.default_rng(seed))


def depolarized_samples(dist: BitstringDistribution, fidelity: float, n: int,
                        seed: int) -> np.ndarray:
    """Mix of ideal samples (weight = fidelity) and uniform bitstrings."""
    rng = np.random.default_rng(seed)
    out = dist.sample(n, rng)
    bad = rng.random(n) >= fidelity
    out[bad] = rng.integers(0, 1 << dist.n_logical, int(bad.sum()))
    return out


@dataclass(frozen=True)
class XebResult:
    raw: float
    normalized: float
    n_samples: int
    se_raw: float
    se_normalized: float
    self_xeb: float


def xeb(samples: np.ndarray, ideal: BitstringDistribution,
        n_boot: int = 1000, seed: int = 0) -> XebResult:
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ValueError("empty sample set")
    qs = ideal.probabilities(samples) * float(1 << ideal.n_logical)
    raw = float(np.mean(qs)) - 1.0
    s = ideal.self_xeb()
    rng = np.random.default_rng(seed)
    boots = np.empty(n_boot)
    for b in range(n_boot):
        boots[b] = np.mean(rng.choice(qs, qs.size)) - 1.0
    se = float(np.std(boots))
    return XebResult(raw, raw / s, samples.size, se, se / s, s)


# -- spoofing and anticoncentration --------------------------------------

def spoof_split_halves(c: HypercubeCircuit, n: int, seed: int,
                       extra_layers: int = 0) -> XebResult:
    """Sample the two top-axis halves independently (final cross layer
    dropped) and score against the honest distribution.

    extra_layers appends that many random in-block + lower-axis CNOT
    rounds before the final cross layer, which degrades the spoof.
    """
    if c.D < 1:
        raise ValueError("spoofing needs at least two blocks")
    work = HypercubeCircuit(c.D, list(c.layers))
    if extra_layers:
        filler = random_plan(c.D, seed + 1, rounds=extra_layers)
        inject = [lay for lay in filler.layers
                  if isinstance(lay, InBlockLayer)
                  or lay.axis < max(c.D - 1, 1)]
        if c.D == 1:
            inject = [lay for lay in inject if isinstance(lay, InBlockLayer)]
        work.layers = work.layers[:-1] + inject + work.layers[-1:]
    last = work.layers[-1]
    if not (isinstance(last, OutBlockLayer) and last.axis == c.D - 1):
        raise ValueError("plan must end with the top-axis CNOT layer")
    truth = simulate_logical(work) if c.D == 4 else \
        BitstringDistribution(work.n_logical,
                              probs=_half_distribution(work,
                                                       range(work.n_blocks)))
    mask = [True] * (len(work.layers) - 1) + [False]
    half = work.n_blocks // 2
    pa = _half_distribution(work, range(0, half), mask)
    pb = _half_distribution(work, range(half, work.n_blocks), mask)
    rng = np.random.default_rng(seed)
    nh = work.n_logical // 2
    xa = np.searchsorted(np.cumsum(pa), rng.random(n) * pa.sum())
    xb = np.searchsorted(np.cumsum(pb), rng.random(n) * pb.sum())
    samples = xa.astype(np.int64) | (xb.astype(np.int64) << nh)
    return xeb(samples, truth, seed=seed)


def _f2_rank(m: np.ndarray) -> int:
    m = m.copy()
    rank = 0
    rows, cols = m.shape
    col = 0
    for col in range(cols):
        piv = np.nonzero(m[rank:, col])[0]
        if piv.size == 0:
            continue
        p = rank + piv[0]
        m[[rank, p]] = m[[p, rank]]
        hits = np.nonzero(m[:, col])[0]
        hits = hits[hits != rank]
        m[hits] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def clifford_self_xeb(c: HypercubeCircuit) -> float:
    """Exact self-XEB of a CCZ-free plan.

    The accumulated phase is a quadratic form q(z); the output
    distribution is uniform on 2^rank points where rank is that of the
    alternating coefficient matrix, so self-XEB = 2^(N - rank) - 1.
    """
    n = c.n_logical
    A = np.zeros((n, n), dtype=np.uint8)
    M = np.eye(n, dtype=np.uint8)
    for lay in c.layers:
        if isinstance(lay, InBlockLayer):
            for b, g in enumerate(lay.gates):
                q0 = 3 * b
                for tok in g:
                    if tok == "CCZ":
                        raise ValueError("plan is not Clifford")
                    if tok.startswith("SWAP"):
                        i = q0 + int(tok[4]) - 1
                        j = q0 + int(tok[5]) - 1
                        M[[i, j]] = M[[j, i]]
                    elif tok.startswith("CZ"):
                        i = q0 + int(tok[2]) - 1
                        j = q0 + int(tok[3]) - 1
                        # CZ on current labels M z: add outer-product term
                        A ^= np.outer(M[i], M[j]) ^ np.outer(M[j], M[i])
        else:
            lo = 1 << lay.axis
            for b in range(c.n_blocks):
                if b & lo:
                    continue
                cb, tb = (b, b + lo) if lay.control_low else (b + lo, b)
                for i in range(3):
                    M[3 * tb + i] ^= M[3 * cb + i]
    np.fill_diagonal(A, 0)
    return float(2.0 ** (n - _f2_rank(A)) - 1.0)


def anticoncentration_study(dims=(0, 1, 2, 3), n_instances: int = 8,
                            seed: int = 0, non_clifford: bool = True):
    """Mean ideal self-XEB of random plans per hypercube dimension.

    Clifford ensembles use the closed-form rank computation, so large
    instance counts are cheap; non-Clifford ones fall back to dense
    simulation and should stay small.
    """
    out = {}
    for D in dims:
        vals = []
        for k in range(n_instances):
            plan = random_plan(D, seed + 1000 * D + k,
                               non_clifford=non_clifford)
            if non_clifford:
                vals.append(simulate_logical(plan).self_xeb())
            else:
                vals.append(clifford_self_xeb(plan))
        out[D] = (float(np.mean(vals)), float(np.std(vals)))
    return out


def cost_estimate(l: int, anchor_seconds: float = 1.44,
                  max_l: int = 3) -> dict:
    """Predicted split-contraction cost with l extra intra-half layers."""
    if not 0 <= l <= max_l:
        raise ValueError(f"extra-layer count {l} outside [0, {max_l}]")
    scale = (8.0 ** (2 ** l) / 2 ** l) / 8.0
    return {"l": l, "scale": scale,
            "anchor_seconds": anchor_seconds,
            "predicted_seconds": anchor_seconds * scale}


# -- physical [[8,3,2]] realization (D <= 1) ------------------------------

# logical qubit i of a block lives on cube coordinate axis 4-i, so an
# in-block SWAP of logicals (i, j) permutes vertices by exchanging the
# corresponding coordinate bits
def _swap_vertex_pairs(i: int, j: int):
    bi, bj = 3 - i, 3 - j
    pairs = []
    for q in range(8):
        p = q ^ (1 << bi) ^ (1 << bj)
        if ((q >> bi) & 1) != ((q >> bj) & 1) and q < p:
            pairs.append((q, p))
    return pairs


_COMBO_SETS = {frozenset(v): k for k, v in ALIASES.items()}
_CZ_TO_FACE = {"CZ12": "S_FACE_1", "CZ13": "S_FACE_2", "CZ23": "S_FACE_3"}


def physical_circuit(c: HypercubeCircuit,
                     idle_weight: float = 0.0) -> Circuit:
    """Compile a D <= 1 plan onto [[8,3,2]] blocks.

    Each block is prepared in the encoded |-,+,-> state; CCZ-bearing
    in-block layers must match one of the two transversal T patterns
    exactly, CZs map to face S patterns, Zs to physical support strings.
    Ends with a transversal X-basis readout of every qubit.
    """
    if c.D > 1:
        raise ValueError("physical compilation supports D <= 1 only")
    code = build_832_code()
    byname = {s.label: s for s in code.transversal}
    nq = 8 * c.n_blocks
    circ = Circuit(nq)
    enc = encoding_circuit(code, "-+-")
    for b in range(c.n_blocks):
        for ins in enc.circuit.instructions:
            circ.gate(ins.kind, *(8 * b + q for q in ins.qubits))
    for lay in c.layers:
        if isinstance(lay, InBlockLayer):
            for b, g in enumerate(lay.gates):
                off = 8 * b
                pending: list[str] = []
                for tok in list(g) + ["flush"]:
                    if tok in _DIAG_TOKENS:
                        pending.append(tok)
                        continue
                    # flush the commuting diagonal run before a permutation
                    if "CCZ" in pending:
                        combo = _COMBO_SETS.get(frozenset(pending))
                        if combo is None or len(set(pending)) != len(pending):
                            raise ValueError(
                                "CCZ is only available through the two "
                                "transversal T patterns")
                        spec = byname["GLOBAL_TDG" if combo == "TDG"
                                      else "T_FACE"]
                        expand_transversal(spec, circ, off)
                    else:
                        for t in pending:
                            if t in _CZ_TO_FACE:
                                expand_transversal(byname[_CZ_TO_FACE[t]],
                                                   circ, off)
                            else:
                                for q in _CUBE_ZL[int(t[1])]:
                                    circ.gate("Z", off + q)
                    pending = []
                    if tok.startswith("SWAP"):
                        for a, bq in _swap_vertex_pairs(int(tok[4]),
                                                        int(tok[5])):
                            circ.gate("SWAP", off + a, off + bq)
        else:
            cb, tb = (0, 1) if lay.control_low else (1, 0)
            expand_transversal(byname["INTERBLOCK_CNOT"], circ,
                               8 * cb, 8 * tb)
        if idle_weight > 0:
            circ.idle(range(nq), idle_weight)
    for q in range(nq):
        circ.gate("H", q)
    for q in range(nq):
        circ.measure(q, f"m{q}")
    return circ


_DIAG_PHASE = {"T": np.exp(1j * np.pi / 4),
               "TDG": np.exp(-1j * np.pi / 4),
               "S": 1j, "SDG": -1j, "Z": -1.0}
_DIAG_FLIP = {"T": "TDG", "TDG": "T", "S": "SDG", "SDG": "S"}


def _sim_probs(circ: Circuit, flips: frozenset = frozenset()) -> np.ndarray:
    """Slice-based statevector run; flips toggles T/S gates to their
    adjoints at the given instruction indices."""
    n = circ.n
    amps = np.zeros(1 << n, dtype=np.complex64)
    amps[0] = 1.0
    for i, ins in enumerate(circ.instructions):
        k = ins.kind
        if k in ("M", "IDLE"):
            continue
        if i in flips:
            k = _DIAG_FLIP[k]
        if k == "H":
            q = ins.qubits[0]
            v = amps.reshape(-1, 2, 1 << q)
            a0 = v[:, 0, :].copy()
            v[:, 0, :] += v[:, 1, :]
            v[:, 1, :] = a0 - v[:, 1, :]
            amps *= np.float32(np.sqrt(0.5))
        elif k in _DIAG_PHASE:
            q = ins.qubits[0]
            v = amps.reshape(-1, 2, 1 << q)
            v[:, 1, :] *= _DIAG_PHASE[k]
        elif k in ("CNOT", "SWAP"):
            a, b = ins.qubits
            hi, lo = (a, b) if a > b else (b, a)
            v = amps.reshape(-1, 2, 1 << (hi - lo - 1) if hi > lo + 1 else 1,
                             2, 1 << lo)
            if k == "SWAP":
                t = v[:, 0, :, 1, :].copy()
                v[:, 0, :, 1, :] = v[:, 1, :, 0, :]
                v[:, 1, :, 0, :] = t
            else:
                ci = 1 if a == hi else 3   # control axis position
                if ci == 1:
                    t = v[:, 1, :, 0, :].copy()
                    v[:, 1, :, 0, :] = v[:, 1, :, 1, :]
                    v[:, 1, :, 1, :] = t
                else:
                    t = v[:, 0, :, 1, :].copy()
                    v[:, 0, :, 1, :] = v[:, 1, :, 1, :]
                    v[:, 1, :, 1, :] = t
        else:
            raise ValueError(f"unsupported physical gate {k!r}")
    return (np.abs(amps) ** 2).astype(np.float64)


def _push_faults(circ: Circuit, faults_by_index) -> tuple[int, frozenset]:
    """Propagate inserted Paulis to the end of the circuit.

    Clifford gates transform the frame as usual; a bit-flip component
    crossing a diagonal non-self-adjoint gate conjugates that gate, which
    up to global phase just swaps it with its adjoint.  Returns the final
    X-component mask (readout bit flips) and the toggled gate indices.
    """
    n = circ.n
    x = [0] * n
    z = [0] * n
    flips: set[int] = set()
    for i, ins in enumerate(circ.instructions):
        k = ins.kind
        if k == "H":
            q = ins.qubits[0]
            x[q], z[q] = z[q], x[q]
        elif k == "CNOT":
            c, t = ins.qubits
            x[t] ^= x[c]
            z[c] ^= z[t]
        elif k == "SWAP":
            a, b = ins.qubits
            x[a], x[b] = x[b], x[a]
            z[a], z[b] = z[b], z[a]
        elif k in _DIAG_FLIP:
            if x[ins.qubits[0]]:
                flips.symmetric_difference_update((i,))
        for q, let in faults_by_index.get(i, ()):
            if let != "Z":
                x[q] ^= 1
            if let != "X":
                z[q] ^= 1
    mask = sum(1 << q for q in range(n) if x[q])
    return mask, frozenset(flips)


def run_physical(c: HypercubeCircuit, model: NoiseModel | None = None,
                 shots: int = 10_000, seed: int = 0,
                 idle_weight: float = 0.0) -> dict:
    """Monte Carlo of the compiled D <= 1 plan under circuit noise.

    Returns logical X-readout bitstrings, the per-shot error-detection
    verdict (every block's X^8 parity even), and both raw and
    postselected normalized XEB against the exact logical distribution.
    """
    circ = physical_circuit(c, idle_weight)
    rng = np.random.default_rng(seed)
    nb = c.n_blocks
    if model is None:
        from .noise import PAPER_NOISE
        model = PAPER_NOISE
    nc = attach_noise(circ, model)
    mechs = nc.mechanisms
    cdf_cache: dict[frozenset, np.ndarray] = {}

    def cdf_for(flips: frozenset) -> np.ndarray:
        if flips not in cdf_cache:
            if len(cdf_cache) > 512:
                cdf_cache.pop(next(iter(cdf_cache)))
            cdf_cache[flips] = np.cumsum(_sim_probs(circ, flips))
        return cdf_cache[flips]

    cdf_for(frozenset())
    samples = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        fired = sample_fired(nc, rng)
        flip_mask = 0
        by_index: dict[int, list] = {}
        for fid in fired:
            m = mechs[fid]
            if m.flips_key is not None:
                flip_mask ^= 1 << int(m.flips_key[1:])
            else:
                by_index.setdefault(m.after_index, []).extend(m.pauli)
        if by_index:
            xmask, flips = _push_faults(circ, by_index)
            flip_mask ^= xmask
            cdf = cdf_for(flips)
        else:
            cdf = cdf_for(frozenset())
        out = int(np.searchsorted(cdf, rng.random() * cdf[-1]))
        samples[s] = out ^ flip_mask

    det_ok = np.ones(shots, dtype=bool)
    logical = np.zeros(shots, dtype=np.int64)
    for b in range(nb):
        block = (samples >> (8 * b)) & 0xFF
        det_ok &= ~_popcount_odd(block)
        for i in (1, 2, 3):
            mask = sum(1 << q for q in _CUBE_XL[i])
            bit = _popcount_odd(block & mask).astype(np.int64)
            logical |= bit << (3 * b + i - 1)

    dist = simulate_logical(c)
    raw = xeb(logical, dist, seed=seed + 1)
    detected = xeb(logical[det_ok], dist, seed=seed + 2)
    return {"samples": logical, "detector_ok": det_ok,
            "acceptance": float(np.mean(det_ok)),
            "xeb_raw": raw, "xeb_detected": detected}
