"""Exact most-likely-error decoding over a decoding hypergraph.

The maximum-likelihood error under independent mechanisms is the
minimum-total-weight edge subset (w = log((1-p)/p) > 0) whose detector
flips reproduce the syndrome.  The search splits into connected components
of the detector-incidence structure, applies per-signature dominance, and
runs an exact branch-and-bound on each active component.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _core
from .hypergraph import DecodingHypergraph

__all__ = ["ErrorAssignment", "decode_mle", "MleDecoder"]


@dataclass(frozen=True)
class ErrorAssignment:
    edge_ids: tuple[int, ...]
    weight: float
    obs_mask: int


class MleDecoder:
    """Per-hypergraph preprocessing plus a decoded-syndrome cache."""

    def __init__(self, h: DecodingHypergraph, force_impl: str | None = None):
        self.h = h
        self.force_impl = force_impl
        self._cache: dict[int, ErrorAssignment] = {}
        # union-find over detectors to split the hypergraph
        parent = list(range(h.n_detectors))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in h.edges:
            bits = _mask_bits(e.det_mask)
            for b in bits[1:]:
                ra, rb = find(bits[0]), find(b)
                if ra != rb:
                    parent[rb] = ra
        self._component_of = [find(i) for i in range(h.n_detectors)]
        comps: dict[int, list[int]] = {}
        for i, r in enumerate(self._component_of):
            comps.setdefault(r, []).append(i)
        # per component: local detector numbering and dominant edges
        self._components = {}
        for root, dets in comps.items():
            local = {d: k for k, d in enumerate(dets)}
            dominant: dict[int, int] = {}  # local det mask -> edge id
            for e in h.edges:
                bits = _mask_bits(e.det_mask)
                if not bits or self._component_of[bits[0]] != root:
                    continue
                lm = 0
                for b in bits:
                    lm |= 1 << local[b]
                old = dominant.get(lm)
                if old is None or e.weight < h.edges[old].weight - 1e-12:
                    dominant[lm] = e.id
            edge_ids = sorted(dominant.values())
            self._components[root] = (
                local,
                edge_ids,
                [h.edges[i].weight for i in edge_ids],
                [self._local_mask(local, h.edges[i].det_mask) for i in edge_ids],
            )

    @staticmethod
    def _local_mask(local, det_mask):
        lm = 0
        for b in _mask_bits(det_mask):
            lm |= 1 << local[b]
        return lm

    def decode(self, syndrome: int,
               cap: float | None = None) -> ErrorAssignment:
        """Exact most-likely assignment, or a capped early exit.

        With a cap, components are solved against the remaining budget;
        once the total provably reaches the cap the result degenerates to
        weight inf with no correction (and is not cached, since a larger
        cap could still resolve it).
        """
        hit = self._cache.get(syndrome)
        if hit is not None:
            return hit
        chosen: list[int] = []
        total = 0.0
        per_comp: dict[int, int] = {}
        for b in _mask_bits(syndrome):
            root = self._component_of[b]
            per_comp[root] = per_comp.get(root, 0)
        for root in per_comp:
            local, edge_ids, weights, det_masks = self._components[root]
            s_local = 0
            for d, k in local.items():
                if (syndrome >> d) & 1:
                    s_local |= 1 << k
            budget = None if cap is None else cap - total
            ids, w = _core.solve_component(weights, det_masks, s_local,
                                           force=self.force_impl,
                                           cap=budget)
            if ids is None:
                return ErrorAssignment((), float("inf"), 0)
            chosen.extend(edge_ids[i] for i in ids)
            total += w
        obs = 0
        for i in chosen:
            obs ^= self.h.edges[i].obs_mask
        result = ErrorAssignment(tuple(sorted(chosen)), total, obs)
        self._cache[syndrome] = result
        return result


def decode_mle(h: DecodingHypergraph, syndrome: int,
               force_impl: str | None = None) -> ErrorAssignment:
    return MleDecoder(h, force_impl).decode(syndrome)


def _mask_bits(mask: int):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out
