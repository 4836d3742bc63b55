"""Multi-code logical experiments: Bell pairs, GHZ states, teleportation,
idle scaling, and state-preparation error scaling.

All Clifford experiments run as hyperedge-level Monte Carlo: detector and
observable parities are deterministic on noiseless shots, so a shot is
fully described by which hyperedges fired.  Edges fire independently with
their merged probabilities, syndromes are decoded (jointly or per block),
and residual logical flips are counted.  Only the teleportation experiment,
which feeds a decoded logical bit forward into a conditional gate, falls
back to per-shot tableau simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit
from .codes import (CssCode, build_color_code_d3, build_rotated_surface_code,
                    encoding_circuit, surface_plaquette_info)
from .hypergraph import (DecodingHypergraph, DetectorSpec, ObservableSpec,
                         build_hypergraph, calibrate_expected,
                         scale_interlogical)
from .matching import MatchingDecoder
from .mle import MleDecoder
from .noise import NoiseModel, attach_noise, run_circuit

__all__ = ["run_bell_pair", "run_ghz", "run_teleportation",
           "run_idle_scaling", "run_spam_scaling", "ShotTable",
           "embed_circuit", "binomial_se", "GHZ_SETTINGS"]


def binomial_se(p: float, n: int) -> float:
    return float(np.sqrt(max(p * (1 - p), 1e-12) / n))


def embed_circuit(dst: Circuit, src: Circuit, offset: int,
                  key_prefix: str = "") -> Circuit:
    """Replay src's instructions on dst with shifted qubits, prefixed keys."""
    for ins in src.instructions:
        qs = tuple(q + offset for q in ins.qubits)
        if ins.kind == "M":
            dst.measure(qs[0], key_prefix + ins.key)
        elif ins.kind == "R":
            dst.reset(qs[0])
        elif ins.kind == "IDLE":
            dst.idle(qs, ins.idle_weight)
        else:
            cond = key_prefix + ins.cond if ins.cond else None
            dst.gate(ins.kind, *qs, cond=cond)
    return dst


# -- hyperedge-level Monte Carlo -----------------------------------------

@dataclass
class ShotTable:
    """Per-shot detector/observable flip bits for a batch of samples.

    det[s, i] is 1 when detector i fired on shot s (expected parity already
    folded in at hypergraph construction); obs[s, j] likewise for the raw
    logical parity flip before any correction.
    """

    h: DecodingHypergraph
    det: np.ndarray   # (shots, n_det) uint8
    obs: np.ndarray   # (shots, n_obs) uint8
    syndromes: list[int] = field(default_factory=list)

    @property
    def shots(self) -> int:
        return self.det.shape[0]

    def syndrome_ints(self) -> list[int]:
        if not self.syndromes:
            pows = [1 << i for i in range(self.det.shape[1])]
            for row in self.det:
                self.syndromes.append(sum(p for p, b in zip(pows, row) if b))
        return self.syndromes


def sample_shot_table(h: DecodingHypergraph, shots: int,
                      rng: np.random.Generator) -> ShotTable:
    E = len(h.edges)
    nd = h.n_detectors
    no = len(h.observables)
    detmat = np.zeros((E, nd), dtype=np.uint8)
    obsmat = np.zeros((E, no), dtype=np.uint8)
    for e in h.edges:
        for i in range(nd):
            if (e.det_mask >> i) & 1:
                detmat[e.id, i] = 1
        for j in range(no):
            if (e.obs_mask >> j) & 1:
                obsmat[e.id, j] = 1
    ps = np.array([e.p for e in h.edges])
    det = np.zeros((shots, nd), dtype=np.uint8)
    obs = np.zeros((shots, no), dtype=np.uint8)
    # batch the Bernoulli draws to bound peak memory
    step = max(1, int(4e7) // max(E, 1))
    for lo in range(0, shots, step):
        hi = min(shots, lo + step)
        fired = (rng.random((hi - lo, E)) < ps).astype(np.uint8)
        det[lo:hi] = (fired @ detmat) & 1
        obs[lo:hi] = (fired @ obsmat) & 1
    return ShotTable(h, det, obs)


class CachedDecoder:
    """Syndrome -> (obs_mask, weight) with memoization across shots.

    cap (correlated mode only) bounds the correction weight: above it the
    decode exits early with weight inf and no correction.  The cache is
    per-instance, so one cap applies to every entry.
    """

    def __init__(self, h: DecodingHypergraph, mode: str,
                 cap: float | None = None):
        if mode == "correlated":
            self._dec = MleDecoder(h)
        elif mode == "conventional":
            if cap is not None:
                raise ValueError("weight cap applies to correlated mode")
            self._dec = MatchingDecoder(scale_interlogical(h, 0.0))
        else:
            raise ValueError(f"unknown decoder mode {mode!r}")
        self.cap = cap
        self._cache: dict[int, tuple[int, float]] = {}

    def decode(self, syndrome: int) -> tuple[int, float]:
        hit = self._cache.get(syndrome)
        if hit is None:
            if self.cap is None:
                a = self._dec.decode(syndrome)
            else:
                a = self._dec.decode(syndrome, cap=self.cap)
            hit = (a.obs_mask, a.weight)
            self._cache[syndrome] = hit
        return hit


def decode_shot_table(table: ShotTable, mode: str,
                      cap: float | None = None,
                      mask: np.ndarray | None = None):
    """Corrected observable flips and correction weights, one row per shot.

    mask restricts decoding to selected shots; skipped rows keep the raw
    observable and weight inf, matching how a capped decode reports shots
    it refuses.
    """
    dec = CachedDecoder(table.h, mode, cap)
    no = len(table.h.observables)
    resid = table.obs.copy()
    weights = np.full(table.shots, np.inf)
    for s, syn in enumerate(table.syndrome_ints()):
        if mask is not None and not mask[s]:
            continue
        corr_obs, w = dec.decode(syn)
        weights[s] = w
        for j in range(no):
            resid[s, j] = table.obs[s, j] ^ ((corr_obs >> j) & 1)
    return resid, weights


# -- surface-code Bell pair ----------------------------------------------

def _surface_bell_setup(d: int, basis: str, model: NoiseModel,
                        idle_weight: float):
    """Circuit + calibrated detectors/observable for one readout basis.

    Code A is prepared in |+_L>, code B in |0_L>, each with one round of
    stabilizer measurements and one idle window, then a transversal CNOT
    A -> B entangles the logical pair before destructive data readout.
    """
    code = build_rotated_surface_code(d)
    n = code.n
    plaq = surface_plaquette_info(d)
    ns = len(plaq)
    circ = Circuit(2 * (n + ns))
    offA, offB = 0, n + ns
    encA = encoding_circuit(code, "+")
    encB = encoding_circuit(code, "0")
    embed_circuit(circ, encA.circuit, offA, "A_")
    circ.idle(range(offA, offA + n), idle_weight)
    embed_circuit(circ, encB.circuit, offB, "B_")
    circ.idle(range(offB, offB + n), idle_weight)
    for q in range(n):
        circ.gate("CNOT", offA + q, offB + q)
    if basis == "X":
        for q in range(n):
            circ.gate("H", offA + q)
            circ.gate("H", offB + q)
    elif basis != "Z":
        raise ValueError(f"unknown readout basis {basis!r}")
    for q in range(n):
        circ.measure(offA + q, f"A_d{q}")
    for q in range(n):
        circ.measure(offB + q, f"B_d{q}")

    # index stabilizers exactly as the prep keys do
    x_idx = [i for i, (t, _, _) in enumerate(plaq) if t == "X"]
    z_idx = [i for i, (t, _, _) in enumerate(plaq) if t == "Z"]
    dets: list[DetectorSpec] = []

    def add(keys, block):
        dets.append(DetectorSpec(len(dets), frozenset(keys), block))

    if basis == "Z":
        for i in z_idx:
            sup = plaq[i][1]
            # A's final Z plaquette commutes through the CNOT unchanged
            add({f"A_prep_Z{i}"} | {f"A_d{q}" for q in sup}, "A")
            # B's final Z plaquette pulls back to Z_A Z_B before the CNOT
            add({f"A_prep_Z{i}", f"B_prep_Z{i}"} | {f"B_d{q}" for q in sup},
                "B")
            # |0>^n data makes B's own Z round deterministic; without this
            # an early data X flips prep and readout together, cancelling
            # in the combined detector
            add({f"B_prep_Z{i}"}, "B")
        for i in x_idx:
            # |+>^n data makes the X round deterministic on code A
            add({f"A_prep_X{i}"}, "A")
        obs_keys = ({f"A_d{q}" for q in code.logical_z[0].support()}
                    | {f"B_d{q}" for q in code.logical_z[0].support()})
    else:
        for i in x_idx:
            sup = plaq[i][1]
            # A's final X plaquette pulls back to X_A X_B before the CNOT
            add({f"A_prep_X{i}", f"B_prep_X{i}"} | {f"A_d{q}" for q in sup},
                "A")
            add({f"B_prep_X{i}"} | {f"B_d{q}" for q in sup}, "B")
            # |+>^n data makes A's own X round deterministic (see Z basis)
            add({f"A_prep_X{i}"}, "A")
        for i in z_idx:
            # |0>^n data makes the Z round deterministic on code B
            add({f"B_prep_Z{i}"}, "B")
        obs_keys = ({f"A_d{q}" for q in code.logical_x[0].support()}
                    | {f"B_d{q}" for q in code.logical_x[0].support()})
    observables = [ObservableSpec(0, frozenset(obs_keys))]
    dets, observables = calibrate_expected(circ, dets, observables)

    anc = frozenset(f"A_{k}" for k in encA.anc_keys) | \
        frozenset(f"B_{k}" for k in encB.anc_keys)
    nc = attach_noise(circ, model, anc_keys=anc)
    h = build_hypergraph(nc, dets, observables)
    return h


_BELL_CACHE: dict[tuple, DecodingHypergraph] = {}


def bell_hypergraph(d: int, basis: str, model: NoiseModel,
                    idle_weight: float = 1.0) -> DecodingHypergraph:
    key = (d, basis, model, idle_weight)
    if key not in _BELL_CACHE:
        _BELL_CACHE[key] = _surface_bell_setup(d, basis, model, idle_weight)
    return _BELL_CACHE[key]


def mean_stabilizer_success(h: DecodingHypergraph) -> float:
    """Average over detectors of the exact no-flip probability."""
    out = []
    for det in h.detectors:
        prod = 1.0
        for e in h.edges:
            if (e.det_mask >> det.id) & 1:
                prod *= 1 - 2 * e.p
        out.append((1 + prod) / 2)
    return float(np.mean(out))


def run_bell_pair(d: int, model: NoiseModel, decoder: str = "correlated",
                  shots: int = 10_000, seed: int = 0,
                  idle_weight: float = 1.0) -> dict:
    """Logical Bell-pair characterization on distance-d surface codes.

    Returns the ZZ population error, the XX parity error, their average
    (the Bell infidelity proxy), and the fidelity lower bound
    F >= P(ZZ correct) + P(XX correct) - 1.
    """
    rng = np.random.default_rng(seed)
    errs = {}
    for basis in ("Z", "X"):
        h = bell_hypergraph(d, basis, model, idle_weight)
        table = sample_shot_table(h, shots, rng)
        resid, _ = decode_shot_table(table, decoder)
        errs[basis] = float(np.mean(resid[:, 0]))
    p_zz, p_xx = errs["Z"], errs["X"]
    bell_error = (p_zz + p_xx) / 2
    se = np.hypot(binomial_se(p_zz, shots), binomial_se(p_xx, shots)) / 2
    return {
        "d": d, "decoder": decoder, "shots": shots,
        "p_zz_error": p_zz, "p_xx_error": p_xx,
        "population": 1 - p_zz, "parity": 1 - p_xx,
        "bell_error": bell_error, "bell_error_se": float(se),
        "fidelity_lb": 1 - p_zz - p_xx,
    }


# -- flagged color-code GHZ ----------------------------------------------

from itertools import combinations

from .codes import _STEANE_PLAQUETTES  # plaquette supports, X and Z alike

# one Z-basis setting covers every Z-type element of the GHZ stabilizer
# group; the eight X-type elements (X^4 times an even number of Ys) each
# need their own transversal readout setting
GHZ_SETTINGS = ("ZZZZ",) + tuple(
    "".join(s) for k in (0, 2, 4)
    for s in sorted(set(
        tuple("Y" if i in ys else "X" for i in range(4))
        for ys in combinations(range(4), k))))


def _ghz_setup(setting: str, model: NoiseModel, idle_weight: float):
    """GHZ_4 of color-code logicals with flag-verified preparation.

    c0 is prepared in |+_L> and checked by a |+_L> flag (CNOT flag->c0,
    flag read in X: a Z_L slipping into c0 during prep copies onto the
    flag's X_L readout).  c1..c3 are |0_L> checked by |0_L> flags
    (CNOT code->flag, flag read in Z, catching X_L).  Three transversal
    CNOTs from c0 then grow the logical GHZ state.

    Every block idles once after its encoding, and the whole register
    idles around each transversal layer: the flags move to storage and
    the computation blocks shuttle between gate zones while the GHZ state
    is grown, so decoherence keeps accumulating after flag verification.
    """
    code = build_color_code_d3()
    n = code.n
    labels = [f"c{k}" for k in range(4)] + [f"f{k}" for k in range(4)]
    off = {lbl: i * n for i, lbl in enumerate(labels)}
    circ = Circuit(8 * n)
    for k in range(4):
        for lbl in (f"c{k}", f"f{k}"):
            target = "+" if lbl in ("c0", "f0") else "0"
            enc = encoding_circuit(code, target)
            embed_circuit(circ, enc.circuit, off[lbl], lbl + "_")
            circ.idle(range(off[lbl], off[lbl] + n), idle_weight)
    for q in range(n):
        circ.gate("CNOT", off["f0"] + q, off["c0"] + q)
    for k in range(1, 4):
        for q in range(n):
            circ.gate("CNOT", off[f"c{k}"] + q, off[f"f{k}"] + q)
    circ.idle(range(8 * n), idle_weight)
    for k in range(1, 4):
        for q in range(n):
            circ.gate("CNOT", off["c0"] + q, off[f"c{k}"] + q)
        circ.idle(range(8 * n), idle_weight)

    def rotate(lbl, letter):
        if letter == "Y":
            for q in range(n):
                circ.gate("S", off[lbl] + q)
        if letter in ("X", "Y"):
            for q in range(n):
                circ.gate("H", off[lbl] + q)

    for k in range(4):
        rotate(f"c{k}", "Z" if setting == "ZZZZ" else setting[k])
    rotate("f0", "X")
    for lbl in labels:
        for q in range(n):
            circ.measure(off[lbl] + q, f"{lbl}_d{q}")

    # the code is self-dual, so each plaquette support carries a diagonal
    # stabilizer in every readout basis used here
    dets: list[DetectorSpec] = []
    for lbl in labels:
        for sup in _STEANE_PLAQUETTES:
            dets.append(DetectorSpec(len(dets),
                                     frozenset(f"{lbl}_d{q}" for q in sup),
                                     lbl))
    lsup = tuple(code.logical_z[0].support())  # == logical_x support
    for k in range(4):
        dets.append(DetectorSpec(
            len(dets), frozenset(f"f{k}_d{q}" for q in lsup), f"f{k}"))

    obs: list[ObservableSpec] = []
    if setting == "ZZZZ":
        for r in (2, 4):
            for codes_in in combinations(range(4), r):
                keys = frozenset(f"c{k}_d{q}"
                                 for k in codes_in for q in lsup)
                obs.append(ObservableSpec(len(obs), keys))
    else:
        keys = frozenset(f"c{k}_d{q}" for k in range(4) for q in lsup)
        obs.append(ObservableSpec(0, keys))
    dets, obs = calibrate_expected(circ, dets, obs)
    nc = attach_noise(circ, model)
    return build_hypergraph(nc, dets, obs)


_GHZ_CACHE: dict[tuple, DecodingHypergraph] = {}


def ghz_hypergraph(setting: str, model: NoiseModel,
                   idle_weight: float = 1.0) -> DecodingHypergraph:
    key = (setting, model, idle_weight)
    if key not in _GHZ_CACHE:
        _GHZ_CACHE[key] = _ghz_setup(setting, model, idle_weight)
    return _GHZ_CACHE[key]


def _fidelity(errs: list[float]) -> float:
    # group average over the 16 stabilizer-group elements; the identity
    # contributes 1 and each measured element 1 - 2 * error rate
    return (1.0 + sum(1 - 2 * e for e in errs)) / 16.0


def run_ghz(model: NoiseModel, shots: int = 4000, seed: int = 0,
            idle_weight: float = 1.0,
            thresholds: tuple[float, ...] | None = None,
            policies: tuple[str, ...] = ("nft", "ft", "edft", "sliding"),
            weight_cap: float | str | None = None) -> dict:
    """Four-party logical GHZ fidelity under three acceptance policies.

    "nft" corrects every shot, "ft" keeps only shots whose flag blocks are
    clean before correcting, "edft" keeps only fully clean shots.  The
    sliding scale interpolates by accepting shots whose correction weight
    stays below a threshold.

    Decoding effort follows the requested policies: without "nft" only
    flag-clean shots need exact corrections, and the sliding scale can
    run under a weight cap ("auto" picks one from a small exact pilot)
    since a shot whose correction provably exceeds every reported
    threshold is rejected at all of them either way.
    """
    rng = np.random.default_rng(seed)
    errs: dict[str, list] = {p: [] for p in ("nft", "ft", "edft")}
    acc = {"ft": [], "edft": []}
    slide_err: dict[float, list] = {}
    slide_acc: dict[float, list] = {}
    for setting in GHZ_SETTINGS:
        h = ghz_hypergraph(setting, model, idle_weight)
        table = sample_shot_table(h, shots, rng)
        flag_cols = np.array([d.id for d in h.detectors
                              if d.block.startswith("f")])
        ft_ok = ~table.det[:, flag_cols].any(axis=1)
        ed_ok = ~table.det.any(axis=1)

        need_all = "nft" in policies or "sliding" in policies
        cap = None
        if weight_cap is not None and "nft" not in policies:
            if weight_cap == "auto":
                pilot = ShotTable(h, table.det[:400], table.obs[:400])
                _, pw = decode_shot_table(pilot, "correlated")
                cap = float(np.quantile(pw, 0.8)) + 1e-6
            else:
                cap = float(weight_cap)
        if need_all:
            resid, weights = decode_shot_table(table, "correlated", cap)
        else:
            resid, weights = decode_shot_table(table, "correlated",
                                               mask=ft_ok)
        resid_ft = resid
        if cap is not None and "ft" in policies:
            # the cap may refuse a few flag-clean rows; correct those
            # exactly so the ft column stays unbiased
            fix = ft_ok & ~np.isfinite(weights)
            if fix.any():
                resid_fix, _ = decode_shot_table(table, "correlated",
                                                 mask=fix)
                resid_ft = np.where(fix[:, None], resid_fix, resid)

        if thresholds is None:
            finite = np.unique(np.round(weights[np.isfinite(weights)], 6))
            thresholds = tuple(np.quantile(finite, np.linspace(0, 1, 21)))
        for j in range(resid.shape[1]):
            if "nft" in policies:
                errs["nft"].append(float(resid[:, j].mean()))
            if "ft" in policies:
                errs["ft"].append(float(resid_ft[ft_ok, j].mean()))
            # with zero fully-clean shots the setting carries no parity
            # information; count it as an even coin
            errs["edft"].append(float(table.obs[ed_ok, j].mean())
                                if ed_ok.any() else 0.5)
        acc["ft"].append(float(ft_ok.mean()))
        acc["edft"].append(float(ed_ok.mean()))
        if "sliding" in policies:
            for t in thresholds:
                keep = weights <= t
                slide_acc.setdefault(t, []).append(float(keep.mean()))
                for j in range(resid.shape[1]):
                    slide_err.setdefault(t, []).append(
                        float(resid[keep, j].mean()) if keep.any() else 0.5)
    sliding = sorted(
        (float(np.mean(slide_acc[t])), _fidelity(slide_err[t]), float(t))
        for t in slide_acc)
    out = {
        "shots": shots, "settings": len(GHZ_SETTINGS),
        "fidelity_ft": _fidelity(errs["ft"]) if errs["ft"] else None,
        "fidelity_edft": _fidelity(errs["edft"]),
        "acceptance_ft": float(np.mean(acc["ft"])),
        "acceptance_edft": float(np.mean(acc["edft"])),
        "sliding": sliding,  # (acceptance, fidelity, threshold) ascending
    }
    out["fidelity_nft"] = (_fidelity(errs["nft"])
                           if "nft" in policies else None)
    return out


def fidelity_at_acceptance(sliding, target: float) -> float:
    """Linear interpolation of the sliding-scale curve at an acceptance."""
    accs = [a for a, _, _ in sliding]
    fids = [f for _, f, _ in sliding]
    return float(np.interp(target, accs, fids))


# -- flagged |0_L> SPAM and idle-decay scaling ---------------------------

def _flagged_zero_setup(model: NoiseModel, n_idle: int = 0,
                        idle_weight: float = 0.25):
    """Flag-verified color-code |0_L> with optional idle windows.

    The code block and its |0_L> flag are encoded, coupled by a transversal
    CNOT (code as control, so a logical X slipping in during prep copies
    onto the flag's Z_L readout), idled n_idle windows, and read out in Z.
    """
    code = build_color_code_d3()
    n = code.n
    circ = Circuit(2 * n)
    for lbl, off in (("c", 0), ("f", n)):
        embed_circuit(circ, encoding_circuit(code, "0").circuit, off,
                      lbl + "_")
    for q in range(n):
        circ.gate("CNOT", q, n + q)
    for _ in range(n_idle):
        circ.idle(range(n), idle_weight)
    for lbl, off in (("c", 0), ("f", n)):
        for q in range(n):
            circ.measure(off + q, f"{lbl}_d{q}")

    dets: list[DetectorSpec] = []
    for lbl in ("c", "f"):
        for sup in _STEANE_PLAQUETTES:
            dets.append(DetectorSpec(len(dets),
                                     frozenset(f"{lbl}_d{q}" for q in sup),
                                     lbl))
    lsup = tuple(code.logical_z[0].support())
    dets.append(DetectorSpec(len(dets),
                             frozenset(f"f_d{q}" for q in lsup), "f"))
    obs = [ObservableSpec(0, frozenset(f"c_d{q}" for q in lsup))]
    dets, obs = calibrate_expected(circ, dets, obs)
    return build_hypergraph(attach_noise(circ, model), dets, obs)


def run_spam_scaling(ps=(0.002, 0.005, 0.01, 0.02), shots: int = 200_000,
                     seed: int = 0) -> dict:
    """Accepted logical SPAM error of the flagged |0_L> versus physical p.

    The model family scales every channel with one knob; acceptance keeps
    shots whose flag block is clean and the code block is then corrected,
    so any single fault is either rejected or repaired and the residual
    error scales as p^2 (log-log slope near 2).
    """
    rng = np.random.default_rng(seed)
    errors, acceptance = [], []
    for p in ps:
        model = NoiseModel(p_2q=p, p_1q=p / 5, p_idle=p / 2,
                           p_spam=p / 2, p_meas_anc=p)
        h = _flagged_zero_setup(model)
        table = sample_shot_table(h, shots, rng)
        resid, _ = decode_shot_table(table, "correlated")
        flag_cols = np.array([d.id for d in h.detectors if d.block == "f"])
        keep = ~table.det[:, flag_cols].any(axis=1)
        errors.append(float(resid[keep, 0].mean()))
        acceptance.append(float(keep.mean()))
    slope, intercept = np.polyfit(np.log(ps), np.log(errors), 1)
    return {"ps": list(ps), "errors": errors, "acceptance": acceptance,
            "shots": shots, "slope": float(slope),
            "intercept": float(intercept)}


def run_idle_scaling(batches: int = 6, model: NoiseModel | None = None,
                     shots: int = 100_000, seed: int = 0,
                     idle_weight: float = 0.25) -> dict:
    """Raw logical Z_L fidelity of a stored flagged |0_L> versus the number
    of encoding steps it sits idle for.

    Codes encoded early in a sequential batch wait one idle window per
    later encoding step; the uncorrected logical parity then declines
    linearly, to first order, in the per-window idle probability.
    """
    from .noise import PAPER_NOISE
    if model is None:
        model = PAPER_NOISE
    rng = np.random.default_rng(seed)
    fids, acc = [], []
    for k in range(batches):
        h = _flagged_zero_setup(model, n_idle=k, idle_weight=idle_weight)
        table = sample_shot_table(h, shots, rng)
        flag_cols = np.array([d.id for d in h.detectors if d.block == "f"])
        keep = ~table.det[:, flag_cols].any(axis=1)
        fids.append(1.0 - float(table.obs[keep, 0].mean()))
        acc.append(float(keep.mean()))
    slope = float(np.polyfit(np.arange(batches), fids, 1)[0])
    return {"steps": list(range(batches)), "fidelity": fids,
            "acceptance": acc, "shots": shots, "slope_per_step": slope}


# -- logical teleportation with decoded feedforward ----------------------

# the 7-qubit code is perfect: every nonzero 3-bit plaquette syndrome
# points at a unique data qubit
_STEANE_LOOKUP = {
    tuple(int(q in p) for p in _STEANE_PLAQUETTES): q for q in range(7)}


def _steane_correct(bits: list[int], expected_plaq: tuple[int, ...]) -> int:
    """Corrected logical parity (support 0,1,2) of one 7-bit readout."""
    syn = tuple((sum(bits[q] for q in p) & 1) ^ e
                for p, e in zip(_STEANE_PLAQUETTES, expected_plaq))
    par = (bits[0] + bits[1] + bits[2]) & 1
    if any(syn):
        q = _STEANE_LOOKUP[syn]
        if q < 3:
            par ^= 1
    return par


def _teleport_circuit(setting: str, model: NoiseModel, idle_weight: float):
    """GHZ_3 of color codes; middle code read in X mid-circuit, outcome fed
    forward (key "corr") into a conditional transversal S on the outer pair.

    The physical run forces "corr" to the decoded middle-logical bit, so
    the ancilla only exists to give the conditional gates a classical
    handle; its own readout noise is stripped.
    """
    code = build_color_code_d3()
    n = code.n
    circ = Circuit(3 * n + 1)
    for k, target in ((0, "+"), (1, "0"), (2, "0")):
        embed_circuit(circ, encoding_circuit(code, target).circuit,
                      k * n, f"c{k}_")
        circ.idle(range(k * n, k * n + n), idle_weight)
    for k in (1, 2):
        for q in range(n):
            circ.gate("CNOT", q, k * n + q)
    for q in range(n):
        circ.gate("H", n + q)
    for q in range(n):
        circ.measure(n + q, f"c1_d{q}")
    anc = 3 * n
    circ.gate("H", anc)
    circ.measure(anc, "corr")
    for k in (0, 2):
        for q in range(n):
            # physical SDG pattern implements the logical S
            circ.gate("SDG", k * n + q, cond="corr")
    for k in (0, 2):
        letter = setting[0] if k == 0 else setting[1]
        if letter == "Y":
            for q in range(n):
                circ.gate("S", k * n + q)
        if letter in ("X", "Y"):
            for q in range(n):
                circ.gate("H", k * n + q)
    for k in (0, 2):
        for q in range(n):
            circ.measure(k * n + q, f"c{k}_d{q}")
    nc = attach_noise(circ, model)
    nc.mechanisms[:] = [m for m in nc.mechanisms if m.flips_key != "corr"]
    return nc


def _teleport_calibrate(nc, seed_base: int = 10_000):
    """Noiseless expected plaquette/logical parities, per mid-outcome branch
    for the middle code, branch-independent after the correction."""
    from .noise import run_circuit as _run
    for s in range(64):
        rec, _ = _run(nc.circuit, rng=np.random.default_rng(seed_base + s),
                      force_outcomes={"corr": 0})
        mids = [rec[f"c1_d{q}"] for q in range(7)]
        m = _steane_correct(mids, _mid_expect(nc, seed_base))
        rec2, _ = _run(nc.circuit, rng=np.random.default_rng(seed_base + s),
                       force_outcomes={"corr": m})
        if m == 1:
            return rec2
    raise RuntimeError("never sampled the nontrivial branch")


def _mid_expect(nc, seed_base: int = 10_000) -> tuple[int, ...]:
    from .noise import run_circuit as _run
    rec, _ = _run(nc.circuit, rng=np.random.default_rng(seed_base),
                  force_outcomes={"corr": 0})
    return tuple(sum(rec[f"c1_d{q}"] for q in p) & 1
                 for p in _STEANE_PLAQUETTES)


def run_teleportation(model: NoiseModel, shots: int = 3000, seed: int = 0,
                      idle_weight: float = 1.0) -> dict:
    """One-bit teleportation diagnostics on a logical GHZ_3.

    Per shot the middle code's X_L outcome is decoded and fed forward into
    a conditional transversal S on codes 0 and 2, disentangling them into
    a logical Bell pair; populations and XX/YY parities are then measured
    and combined into the Bell fidelity
    (populations + (<XX> - <YY>) / 2) / 2.
    """
    from .noise import run_circuit as _run, sample_fired
    rng = np.random.default_rng(seed)
    out: dict[str, float] = {}
    for setting in ("ZZ", "XX", "YY"):
        nc = _teleport_circuit(setting, model, idle_weight)
        mid_exp = _mid_expect(nc)
        cal = _teleport_calibrate(nc)
        plaq_exp = {k: tuple(sum(cal[f"c{k}_d{q}"] for q in p) & 1
                             for p in _STEANE_PLAQUETTES) for k in (0, 2)}
        par_exp = (sum(cal[f"c{k}_d{q}"] for k in (0, 2)
                       for q in (0, 1, 2)) & 1)
        errors = 0
        for s in range(shots):
            shot_seed = rng.integers(1 << 62)
            srng = np.random.default_rng(shot_seed)
            fired = sample_fired(nc, srng)
            rec, _ = _run(nc.circuit, fired, nc.mechanisms,
                          np.random.default_rng(shot_seed + 1),
                          force_outcomes={"corr": 0})
            m = _steane_correct([rec[f"c1_d{q}"] for q in range(7)], mid_exp)
            if m:
                rec, _ = _run(nc.circuit, fired, nc.mechanisms,
                              np.random.default_rng(shot_seed + 1),
                              force_outcomes={"corr": 1})
            par = 0
            for k in (0, 2):
                par ^= _steane_correct([rec[f"c{k}_d{q}"] for q in range(7)],
                                       plaq_exp[k])
            errors += par ^ par_exp
        out[setting] = errors / shots
    pop = 1 - out["ZZ"]
    xx = 1 - 2 * out["XX"]
    yy = -(1 - 2 * out["YY"])
    fidelity = (pop + (xx - yy) / 2) / 2
    return {"shots": shots, "population": pop, "xx": xx, "yy": yy,
            "p_zz_error": out["ZZ"], "p_xx_error": out["XX"],
            "p_yy_error": out["YY"], "bell_fidelity": fidelity}
