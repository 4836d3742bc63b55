"""Two-copy Bell-basis measurements: purity, Pauli spectra, and magic.

Two identical copies of a scrambled register are rotated pairwise into the
Bell basis (CNOT from the control copy onto the target copy, then H on the
control) and read out. Each shot then carries one Pauli-operator label, and
simple bit parities over shots estimate subsystem purities, the complete
squared Pauli spectrum, and additive Bell magic.

Datasets can be taken at the logical level (any dense plan size) or at the
physical level for single-column plans compiled onto [[8,3,2]] blocks, where
each shot additionally carries stabilizer check bits for postselection.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .codes import _CUBE_XL, _CUBE_ZL, _CUBE_ZSTABS
from .iqp import HypercubeCircuit, logical_state, physical_circuit
from .noise import NoiseModel, attach_noise, sample_fired
from .statevector import MAX_QUBITS, StateVector

__all__ = [
    "BellShot", "BellDataset", "PauliSpectrum", "MagicEstimate",
    "simulate_two_copy", "to_logical", "purity", "page_curve",
    "pauli_spectrum", "bell_magic", "exact_bell_magic", "zne_extrapolate",
]

SHOT_FORMAT_VERSION = "bell-shots-v1"

_SPECTRUM_MAX_N = 12  # full 4^N spectrum table cap


# ---------------------------------------------------------------------------
# datasets

@dataclass(frozen=True)
class BellShot:
    """One Bell-basis readout: a is the control copy, b the target copy."""

    a: np.ndarray
    b: np.ndarray
    syndromes: np.ndarray


@dataclass
class BellDataset:
    """Array-backed collection of Bell shots over n sites per copy.

    a, b: (shots, n) 0/1 arrays; syndromes: (shots, k) check bits, k = 0
    at the logical level.
    """

    n: int
    a: np.ndarray
    b: np.ndarray
    syndromes: np.ndarray
    level: str = "logical"

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=np.uint8)
        self.b = np.asarray(self.b, dtype=np.uint8)
        self.syndromes = np.asarray(self.syndromes, dtype=np.uint8)
        if self.a.shape != self.b.shape or self.a.shape[1] != self.n:
            raise ValueError("inconsistent shot arrays")
        if self.syndromes.shape[0] != self.a.shape[0]:
            raise ValueError("syndrome rows do not match shots")

    def __len__(self) -> int:
        return self.a.shape[0]

    def __getitem__(self, i: int) -> BellShot:
        return BellShot(self.a[i], self.b[i], self.syndromes[i])

    def filter(self, mask: np.ndarray) -> "BellDataset":
        mask = np.asarray(mask, dtype=bool)
        return BellDataset(self.n, self.a[mask], self.b[mask],
                           self.syndromes[mask], self.level)

    def postselect(self) -> "BellDataset":
        """Keep shots whose every check bit is zero."""
        if self.syndromes.shape[1] == 0:
            return self
        return self.filter(~self.syndromes.any(axis=1))

    @property
    def acceptance(self) -> float:
        if self.syndromes.shape[1] == 0:
            return 1.0
        return float((~self.syndromes.any(axis=1)).mean())

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(f"# {SHOT_FORMAT_VERSION} level={self.level} "
                     f"n={self.n} checks={self.syndromes.shape[1]}\n")
            for i in range(len(self)):
                fh.write("%s\t%s\t%s\n" % (
                    "".join(map(str, self.a[i])),
                    "".join(map(str, self.b[i])),
                    "".join(map(str, self.syndromes[i]))))

    @staticmethod
    def load(path) -> "BellDataset":
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) < 2 or header[1] != SHOT_FORMAT_VERSION:
                raise ValueError("unrecognized shot file")
            meta = dict(kv.split("=") for kv in header[2:])
            n, k = int(meta["n"]), int(meta["checks"])
            rows_a, rows_b, rows_s = [], [], []
            for line in fh:
                fa, fb, fs = (line.rstrip("\n").split("\t") + [""])[:3]
                rows_a.append([int(c) for c in fa])
                rows_b.append([int(c) for c in fb])
                rows_s.append([int(c) for c in fs])
        shape = (len(rows_a), n)
        return BellDataset(
            n,
            np.array(rows_a, dtype=np.uint8).reshape(shape),
            np.array(rows_b, dtype=np.uint8).reshape(shape),
            np.array(rows_s, dtype=np.uint8).reshape((shape[0], k)),
            meta["level"])


# ---------------------------------------------------------------------------
# simulation

def _fwht(v: np.ndarray) -> np.ndarray:
    # unnormalized, over the last axis (length must be a power of two)
    v = np.array(v)
    h = 1
    n = v.shape[-1]
    while h < n:
        v = v.reshape(v.shape[:-1] + (n // (2 * h), 2, h))
        a, b = v[..., 0, :].copy(), v[..., 1, :].copy()
        v[..., 0, :] = a + b
        v[..., 1, :] = a - b
        v = v.reshape(v.shape[:-3] + (n,))
        h *= 2
    return v


def _bell_conditionals(psi: np.ndarray, b: int) -> np.ndarray:
    """p(a | b) for pairwise Bell readout of two copies of psi.

    The joint amplitude is <a,b| (H x I) CNOT |psi,psi>, which reduces to
    a Walsh-Hadamard transform of psi(u) psi(b ^ u) over u.
    """
    idx = np.arange(psi.size)
    w = _fwht(psi * psi[idx ^ b])
    p = np.abs(w) ** 2
    s = p.sum()
    return p / s if s > 0 else np.full(psi.size, 1.0 / psi.size)


def _bell_marginal(psi: np.ndarray) -> np.ndarray:
    # p(b) = sum_u |psi(u)|^2 |psi(b^u)|^2, an XOR self-convolution
    q = np.abs(psi) ** 2
    c = _fwht(_fwht(q) ** 2) / q.size
    c = np.maximum(c, 0.0)
    return c / c.sum()


def _bell_sample(psi: np.ndarray, shots: int, rng: np.random.Generator,
                 fidelity: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Sample (a, b) outcome integers for two copies of a pure state.

    fidelity < 1 mixes in a global white-noise floor per copy; any shot
    with a depolarized copy lands uniformly on the 4^n outcomes.
    """
    n_out = psi.size
    pb = _bell_marginal(psi)
    clean = rng.random(shots) < fidelity * fidelity
    b = np.empty(shots, dtype=np.int64)
    a = np.empty(shots, dtype=np.int64)
    n_clean = int(clean.sum())
    b[clean] = rng.choice(n_out, size=n_clean, p=pb)
    b[~clean] = rng.integers(0, n_out, size=shots - n_clean)
    a[~clean] = rng.integers(0, n_out, size=shots - n_clean)
    cache: dict[int, np.ndarray] = {}
    for bv in np.unique(b[clean]):
        cache[int(bv)] = np.cumsum(_bell_conditionals(psi, int(bv)))
    u = rng.random(shots)
    for i in np.flatnonzero(clean):
        a[i] = np.searchsorted(cache[int(b[i])], u[i], side="right")
    return a, b


def _bits(v: np.ndarray, n: int) -> np.ndarray:
    # integer outcomes -> (shots, n) bit rows, site 0 in column 0
    return (v[:, None] >> np.arange(n)) & 1


def _physical_state(c: HypercubeCircuit) -> np.ndarray:
    circ = physical_circuit(c)
    sv = StateVector(circ.n)
    for ins in circ.instructions:
        if ins.kind == "M":
            continue
        sv.apply_gate(ins.kind, *ins.qubits)
    return sv.amps.reshape(-1)


def _physical_checks(a_bits: np.ndarray, b_bits: np.ndarray,
                     n_blocks: int) -> np.ndarray:
    """Per-block check bits from Bell outcomes of encoded copies.

    After the transversal readout rotation the roles of the X and Z
    stabilizer groups are exchanged, so the target copy carries the
    whole-block parity and the control copy the four face parities.
    """
    cols = []
    for blk in range(n_blocks):
        off = 8 * blk
        cols.append(b_bits[:, off:off + 8].sum(axis=1) & 1)
        for supp in _CUBE_ZSTABS:
            cols.append(a_bits[:, [off + q for q in supp]].sum(axis=1) & 1)
    return np.stack(cols, axis=1).astype(np.uint8)


def to_logical(ds: BellDataset) -> BellDataset:
    """Decode a physical [[8,3,2]] dataset to logical-level shots.

    Logical bits are parities over the (readout-rotated) logical operator
    supports; check bits are dropped, so postselect first if wanted.
    """
    if ds.level != "physical" or ds.n % 8:
        raise ValueError("expected a physical [[8,3,2]] dataset")
    n_blocks = ds.n // 8
    a_cols, b_cols = [], []
    for blk in range(n_blocks):
        off = 8 * blk
        for k in (1, 2, 3):
            a_cols.append(ds.a[:, [off + q for q in _CUBE_ZL[k]]]
                          .sum(axis=1) & 1)
            b_cols.append(ds.b[:, [off + q for q in _CUBE_XL[k]]]
                          .sum(axis=1) & 1)
    shots = len(ds)
    return BellDataset(3 * n_blocks,
                       np.stack(a_cols, axis=1) if a_cols else
                       np.zeros((shots, 0)),
                       np.stack(b_cols, axis=1),
                       np.zeros((shots, 0), dtype=np.uint8), "logical")


def simulate_two_copy(circuit: HypercubeCircuit, shots: int, seed: int = 0,
                      *, fidelity: float = 1.0, level: str = "logical",
                      model: NoiseModel | None = None) -> BellDataset:
    """Bell-basis readout of two copies of a plan's output state.

    level "logical": sites are the plan's logical qubits; fidelity < 1
    adds an independent white-noise admixture per copy.
    level "physical": single-column plans only; sites are the physical
    qubits of the [[8,3,2]] blocks and shots carry check bits. With a
    NoiseModel the joint two-copy circuit is run shot by shot, so keep
    the register small (one block) and the shot count moderate.
    """
    rng = np.random.default_rng(seed)
    if level == "logical":
        psi = logical_state(circuit).astype(np.float64)
        a, b = _bell_sample(psi, shots, rng, fidelity)
        n = circuit.n_logical
        return BellDataset(n, _bits(a, n), _bits(b, n),
                           np.zeros((shots, 0), dtype=np.uint8), "logical")
    if level != "physical":
        raise ValueError("level must be 'logical' or 'physical'")
    if fidelity != 1.0:
        raise ValueError("fidelity admixture is a logical-level model")
    n = 8 * circuit.n_blocks
    if model is None:
        psi = _physical_state(circuit).astype(np.complex128)
        a, b = _bell_sample(psi, shots, rng)
        a_bits, b_bits = _bits(a, n), _bits(b, n)
    else:
        if 2 * n > MAX_QUBITS:
            raise ValueError("noisy two-copy register exceeds the "
                             "statevector cap")
        out = _run_noisy_joint(circuit, model, shots, rng)
        a_bits = _bits(out & ((1 << n) - 1), n)
        b_bits = _bits(out >> n, n)
    checks = _physical_checks(a_bits, b_bits, circuit.n_blocks)
    return BellDataset(n, a_bits, b_bits, checks, "physical")


def _run_noisy_joint(c: HypercubeCircuit, model: NoiseModel, shots: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Monte Carlo readout integers for the noisy joint two-copy circuit.

    Pauli faults are pushed to the readout as bit flips plus gate-adjoint
    toggles, so each distinct toggle pattern costs one statevector pass.
    """
    from .iqp import _push_faults, _sim_probs
    joint = _joint_circuit(c)
    nc = attach_noise(joint, model)
    mechs = nc.mechanisms
    n = joint.n // 2
    key_bit = {f"a{q}": q for q in range(n)}
    key_bit.update({f"b{q}": n + q for q in range(n)})
    cdf_cache: dict[frozenset, np.ndarray] = {}

    def cdf_for(flips: frozenset) -> np.ndarray:
        if flips not in cdf_cache:
            if len(cdf_cache) > 512:
                cdf_cache.pop(next(iter(cdf_cache)))
            cdf_cache[flips] = np.cumsum(_sim_probs(joint, flips))
        return cdf_cache[flips]

    out = np.empty(shots, dtype=np.int64)
    for s in range(shots):
        fired = sample_fired(nc, rng)
        flip_mask = 0
        by_index: dict[int, list] = {}
        for fid in fired:
            m = mechs[fid]
            if m.flips_key is not None:
                flip_mask ^= 1 << key_bit[m.flips_key]
            else:
                by_index.setdefault(m.after_index, []).extend(m.pauli)
        flips = frozenset()
        if by_index:
            xmask, flips = _push_faults(joint, by_index)
            flip_mask ^= xmask
        cdf = cdf_for(flips)
        v = int(np.searchsorted(cdf, rng.random() * cdf[-1]))
        out[s] = v ^ flip_mask
    return out


def _joint_circuit(c: HypercubeCircuit):
    """Two encoded copies, pairwise readout rotation, measure everything."""
    base = physical_circuit(c)
    n = base.n
    from .circuits import Circuit
    joint = Circuit(2 * n)
    for off in (0, n):
        for ins in base.instructions:
            if ins.kind == "M":
                continue
            joint.gate(ins.kind, *(off + q for q in ins.qubits))
    for q in range(n):
        joint.gate("CNOT", q, n + q)
    for q in range(n):
        joint.gate("H", q)
    for q in range(n):
        joint.measure(q, f"a{q}")
    for q in range(n):
        joint.measure(n + q, f"b{q}")
    return joint


# ---------------------------------------------------------------------------
# purity and entanglement

def purity(ds: BellDataset, subsystem=None, n_boot: int = 0,
           seed: int = 0):
    """Estimate Tr rho_A^2 as the mean singlet parity over subsystem A.

    A site reads as a singlet when both copies return 1. Returns the
    estimate, or (estimate, bootstrap standard error) when n_boot > 0.
    """
    sites = (np.arange(ds.n) if subsystem is None
             else np.asarray(subsystem, dtype=np.int64))
    singlets = (ds.a[:, sites] & ds.b[:, sites]).sum(axis=1) & 1
    signs = 1.0 - 2.0 * singlets
    est = float(signs.mean())
    if not n_boot:
        return est
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(signs), size=(n_boot, len(signs)))
    se = float(signs[idx].mean(axis=1).std(ddof=1))
    return est, se


def page_curve(ds: BellDataset, max_subsets: int = 4096, seed: int = 0,
               eps: float = 1e-12) -> dict[int, float]:
    """Mean Renyi-2 entropy -log2 purity by subsystem size.

    Averages over every subsystem of each size when there are at most
    max_subsets of them, otherwise over a random sample.
    """
    rng = np.random.default_rng(seed)
    singlets = (ds.a & ds.b).astype(np.float32)
    out: dict[int, float] = {}
    from itertools import combinations
    from math import comb
    for k in range(ds.n + 1):
        if k == 0:
            out[0] = 0.0
            continue
        if comb(ds.n, k) <= max_subsets:
            subsets = list(combinations(range(ds.n), k))
        else:
            subsets = [tuple(rng.choice(ds.n, size=k, replace=False))
                       for _ in range(max_subsets)]
        mask = np.zeros((ds.n, len(subsets)), dtype=np.float32)
        for j, sub in enumerate(subsets):
            mask[list(sub), j] = 1.0
        parity = (singlets @ mask).astype(np.int64) & 1
        p = (1.0 - 2.0 * parity).mean(axis=0)
        out[k] = float(np.mean(-np.log2(np.maximum(p, eps))))
    return out


# ---------------------------------------------------------------------------
# Pauli spectrum

# site codes 2a+b -> I, X, Z, Y; per-operator readout signs
_SITE_SIGNS = np.array([
    [1, 1, 1, 1],      # I
    [1, 1, -1, -1],    # X: + iff control bit a = 0
    [1, -1, 1, -1],    # Z: + iff target bit b = 0
    [-1, 1, 1, -1],    # Y: + iff a != b
], dtype=np.float64)


@dataclass
class PauliSpectrum:
    """Squared Pauli expectations |tr(P rho)|^2 for all 4^n strings.

    Strings index by per-site 2-bit codes (I, X, Z, Y) = (0, 1, 2, 3),
    site 0 in the least significant pair. The identity entry is exactly
    the all-ones parity, so it estimates 1 with zero variance.
    """

    n: int
    estimates: np.ndarray
    ideal: np.ndarray | None = None
    n_shots: int = 0

    def total(self) -> float:
        """sum_P |tr(P rho)|^2 / 2^n, an estimate of the purity."""
        return float(self.estimates.sum() / (1 << self.n))

    def groups(self, decimals: int = 6) -> dict[float, np.ndarray]:
        """String indices grouped by rounded ideal value."""
        if self.ideal is None:
            raise ValueError("no ideal reference attached")
        keys = np.round(self.ideal, decimals)
        return {float(v): np.flatnonzero(keys == v)
                for v in np.unique(keys)[::-1]}

    def save_csv(self, path, decimals: int = 6):
        if self.ideal is None:
            raise ValueError("no ideal reference attached")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["group", "ideal", "estimate", "error"])
            for gid, (val, idx) in enumerate(self.groups(decimals).items()):
                for i in idx:
                    w.writerow([gid, f"{val:.6g}",
                                f"{self.estimates[i]:.6g}",
                                f"{self.estimates[i] - self.ideal[i]:.6g}"])


def _spectrum_transform(weights: np.ndarray, n: int) -> np.ndarray:
    """Apply the per-site sign matrix along every axis of a 4^n table."""
    t = weights.reshape((4,) * n)
    for ax in range(n):
        t = np.moveaxis(np.tensordot(_SITE_SIGNS, t, axes=([1], [ax])),
                        0, ax)
    return t.reshape(-1)


def _outcome_codes(ds: BellDataset) -> np.ndarray:
    codes = (2 * ds.a + ds.b).astype(np.int64)
    return (codes << (2 * np.arange(ds.n))).sum(axis=1)


def pauli_spectrum(ds: BellDataset,
                   circuit: HypercubeCircuit | None = None) -> PauliSpectrum:
    """Estimate the full squared Pauli spectrum from Bell shots.

    Histograms the 4^n outcomes, then one sign-matrix pass per site turns
    counts into all 4^n estimates at once. When the plan is supplied the
    exact spectrum is attached for grouping and error columns.
    """
    if ds.n > _SPECTRUM_MAX_N:
        raise ValueError("full spectrum supported for n <= "
                         f"{_SPECTRUM_MAX_N}")
    hist = np.bincount(_outcome_codes(ds), minlength=4 ** ds.n)
    est = _spectrum_transform(hist / len(ds), ds.n)
    ideal = None
    if circuit is not None:
        ideal = _spectrum_transform(_exact_bell_table(
            logical_state(circuit)), ds.n)
    return PauliSpectrum(ds.n, est, ideal, len(ds))


def _exact_bell_table(psi: np.ndarray) -> np.ndarray:
    """Exact Bell outcome distribution, indexed by per-site codes 2a+b."""
    n = psi.size.bit_length() - 1
    table = np.empty(4 ** n)
    site_codes = (np.arange(psi.size)[:, None] >> np.arange(n)) & 1
    for b in range(psi.size):
        pa = np.abs(_fwht(psi * psi[np.arange(psi.size) ^ b])) ** 2
        pa /= psi.size  # normalization of the readout rotation
        codes_a = (np.arange(psi.size)[:, None] >> np.arange(n)) & 1
        flat = ((2 * codes_a + site_codes[b]) <<
                (2 * np.arange(n))).sum(axis=1)
        table[flat] = pa
    return table / table.sum()


# ---------------------------------------------------------------------------
# magic

@dataclass(frozen=True)
class MagicEstimate:
    """Bell magic B in [0, 1) and its additive form -log2(1 - B)."""

    bell: float
    additive: float
    se: float
    n_samples: int
    mitigated: bool = False


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    return (bits.astype(np.int64) << np.arange(bits.shape[1])).sum(axis=1)


def bell_magic(ds: BellDataset, n_samples: int = 10_000_000, seed: int = 0,
               purity_correction: float | None = None) -> MagicEstimate:
    """Monte Carlo additive Bell magic from Bell shots.

    Each sample draws two shot pairs; the XOR inside a pair labels a Pauli
    string (site code (b, a) = 00, 01, 10, 11 -> I, X, Z, Y) and the
    sample contributes 2 when the two strings anticommute. B is 0 exactly
    for stabilizer states.

    purity_correction rescales the commuting fraction by an externally
    measured sample purity; the correction itself is not derived here.
    """
    if ds.n > 62:
        raise ValueError("packed Pauli labels support n <= 62")
    x = _pack_bits(ds.a)  # X component of the site code
    z = _pack_bits(ds.b)
    rng = np.random.default_rng(seed)
    anti = np.zeros(n_samples, dtype=np.float64)
    chunk = 1 << 20
    for lo in range(0, n_samples, chunk):
        m = min(chunk, n_samples - lo)
        r = rng.integers(0, len(ds), size=(4, m))
        x1, z1 = x[r[0]] ^ x[r[1]], z[r[0]] ^ z[r[1]]
        x2, z2 = x[r[2]] ^ x[r[3]], z[r[2]] ^ z[r[3]]
        sym = np.bitwise_count(x1 & z2) + np.bitwise_count(z1 & x2)
        anti[lo:lo + m] = sym & 1
    b_raw = 2.0 * float(anti.mean())
    se = 2.0 * float(anti.std(ddof=1)) / np.sqrt(n_samples)
    mitigated = purity_correction is not None
    b = b_raw
    if mitigated:
        b = float(np.clip(1.0 - (1.0 - b_raw) / purity_correction,
                          0.0, 1.0 - 1e-12))
    b = min(b, 1.0 - 1e-12)
    return MagicEstimate(b, float(-np.log2(1.0 - b)), se, n_samples,
                         mitigated)


def exact_bell_magic(psi: np.ndarray) -> float:
    """Enumerated additive Bell magic of a pure state (small n only)."""
    n = psi.size.bit_length() - 1
    if n > 6:
        raise ValueError("exact enumeration supported for n <= 6")
    # Bell outcome distribution over Pauli labels (x, z) = (a, b)
    p = np.empty((psi.size, psi.size))
    idx = np.arange(psi.size)
    for b in range(psi.size):
        p[:, b] = np.abs(_fwht(psi * psi[idx ^ b])) ** 2 / psi.size
    p /= p.sum()
    # XOR self-convolution over both label components gives the
    # distribution of within-pair differences
    w = _fwht(_fwht(p.T).T)
    d = _fwht(_fwht((w * w).T).T) / p.size ** 2
    d = np.maximum(d, 0.0)
    d /= d.sum()
    flat = d.reshape(-1)  # label (x << n) | z
    xf = np.repeat(idx, psi.size)
    zf = np.tile(idx, psi.size)
    anti = ((np.bitwise_count(xf[:, None] & zf[None, :]) +
             np.bitwise_count(zf[:, None] & xf[None, :])) & 1)
    b_val = 2.0 * float(flat @ anti.astype(np.float64) @ flat)
    return float(-np.log2(max(1.0 - b_val, 1e-300)))


# ---------------------------------------------------------------------------
# zero-noise extrapolation

def zne_extrapolate(points) -> tuple[float, float]:
    """Extrapolate (purity, value) pairs linearly to unit purity.

    Unweighted least squares; returns the value at purity 1 and the fit
    uncertainty propagated from the residual covariance.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (purity, value) points")
    x, y = pts[:, 0], pts[:, 1]
    coef, cov = np.polyfit(x, y, 1, cov=True)
    at_one = float(np.polyval(coef, 1.0))
    j = np.array([1.0, 1.0])
    return at_one, float(np.sqrt(j @ cov @ j))
