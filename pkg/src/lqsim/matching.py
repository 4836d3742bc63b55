"""Conventional per-block decoding: independent minimum-weight matching.

The hypergraph is restricted to each code block (inter-logical edges
dropped, intra-block hyperedges of detector-degree > 2 decomposed into
chained pairs).  Matching is exact: all-pairs shortest paths over the
block graph including a boundary node, then an optimal pairing of the
fired detectors by bitmask dynamic programming.  Adequate for d <= 7;
no blossom machinery needed at these sizes.
"""

from __future__ import annotations

import numpy as np

from .hypergraph import DecodingHypergraph
from .mle import ErrorAssignment

__all__ = ["MatchingDecoder", "decode_conventional"]

_INF = float("inf")


def _decompose(det_bits, p, obs_mask):
    """Split a degree->2 hyperedge into chained pairs (last may be single)."""
    out = []
    bits = sorted(det_bits)
    for i in range(0, len(bits) - 1, 2):
        out.append(((bits[i], bits[i + 1]), p, obs_mask if i == 0 else 0))
    if len(bits) % 2:
        out.append(((bits[-1],), p, obs_mask if len(bits) == 1 else 0))
    return out


class MatchingDecoder:
    def __init__(self, h: DecodingHypergraph):
        self.h = h
        blocks: dict[str, list[int]] = {}
        for d in h.detectors:
            blocks.setdefault(d.block, []).append(d.id)
        self._blocks = {}
        for name, dets in blocks.items():
            self._blocks[name] = self._prepare_block(name, dets)

    def _prepare_block(self, name, dets):
        local = {d: i for i, d in enumerate(dets)}
        nb = len(dets)  # boundary node index nb
        dist = np.full((nb + 1, nb + 1), _INF)
        obs = np.zeros((nb + 1, nb + 1), dtype=np.int64)
        np.fill_diagonal(dist, 0.0)
        for e in self.h.edges:
            if e.inter_logical:
                continue
            bits = [i for i in range(self.h.n_detectors)
                    if (e.det_mask >> i) & 1]
            if not bits or any(b not in local for b in bits):
                continue
            for sub_bits, p, obs_mask in _decompose(bits, e.p, e.obs_mask):
                w = float(np.log((1 - p) / p))
                if len(sub_bits) == 2:
                    u, v = local[sub_bits[0]], local[sub_bits[1]]
                else:
                    u, v = local[sub_bits[0]], nb
                if w < dist[u, v]:
                    dist[u, v] = dist[v, u] = w
                    obs[u, v] = obs[v, u] = obs_mask
        # Floyd-Warshall, carrying observable flips along shortest paths
        for k in range(nb + 1):
            for i in range(nb + 1):
                dik = dist[i, k]
                if dik == _INF:
                    continue
                for j in range(nb + 1):
                    alt = dik + dist[k, j]
                    if alt < dist[i, j] - 1e-12:
                        dist[i, j] = alt
                        obs[i, j] = obs[i, k] ^ obs[k, j]
        return local, dist, obs

    def decode(self, syndrome: int) -> ErrorAssignment:
        total = 0.0
        obs_out = 0
        for name, (local, dist, obs) in self._blocks.items():
            fired = [local[d] for d in local if (syndrome >> d) & 1]
            if not fired:
                continue
            w, o = self._pair_up(fired, dist, obs, len(local))
            total += w
            obs_out ^= o
        return ErrorAssignment((), total, obs_out)

    @staticmethod
    def _pair_up(fired, dist, obs, boundary):
        f = len(fired)
        if f > 22:
            raise ValueError("too many fired detectors for exact pairing")
        full = (1 << f) - 1
        memo_w = {0: 0.0}
        memo_o = {0: 0}

        def rec(mask):
            if mask in memo_w:
                return memo_w[mask], memo_o[mask]
            i = (mask & -mask).bit_length() - 1
            rest = mask & ~(1 << i)
            # boundary option
            best_w, best_o = _INF, 0
            if dist[fired[i], boundary] < _INF:
                w, o = rec(rest)
                cand = w + dist[fired[i], boundary]
                if cand < best_w:
                    best_w = cand
                    best_o = o ^ obs[fired[i], boundary]
            j = 0
            m = rest
            while m:
                if m & 1:
                    if dist[fired[i], fired[j]] < _INF:
                        w, o = rec(rest & ~(1 << j))
                        cand = w + dist[fired[i], fired[j]]
                        if cand < best_w - 1e-12:
                            best_w = cand
                            best_o = o ^ obs[fired[i], fired[j]]
                m >>= 1
                j += 1
            if best_w == _INF:
                raise ValueError("block subgraph not matchable")
            memo_w[mask] = best_w
            memo_o[mask] = best_o
            return best_w, best_o

        return rec(full)


def decode_conventional(h: DecodingHypergraph, syndrome: int) -> ErrorAssignment:
    return MatchingDecoder(h).decode(syndrome)
