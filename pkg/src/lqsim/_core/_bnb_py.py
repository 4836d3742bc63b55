"""Pure-Python branch-and-bound core for most-likely-error decoding.

Same contract as the compiled twin in _bnb.pyx: given positive edge
weights, per-edge detector bitmasks, and a syndrome bitmask, return the
minimum-total-weight edge subset whose XOR of detector masks equals the
syndrome.  Ties break toward the lexicographically lowest sorted id tuple.
Raises ValueError when no subset covers the syndrome.  An optional
weight cap turns the search into an early-exit test: when the optimum
would not beat the cap the call returns (None, inf) as soon as the
best-first bound proves it.

The search runs best-first over residual syndromes.  From residual s, a
fixed pivot detector (an unsatisfied one with the fewest incident edges)
must be cleared by some incident edge, so expanding only pivot-incident
edges is complete; states reached along different edge orders merge.  The
admissible heuristic is a set-cover dual ascent: every unsatisfied
detector bids the smallest remaining slack among its incident edges, and
since claims per edge never exceed its weight the bid total never
overestimates the true completion cost.

Equal-weight prefixes reaching one residual are compared by the smallest
edge id in their symmetric difference, which decides the final sorted-set
comparison no matter what common suffix completes them.
"""

from __future__ import annotations

import heapq

__all__ = ["solve_component"]

_EPS = 1e-9


def _prefix_better(a: tuple, b: tuple) -> bool:
    """True when sorted-set a beats b after any shared completion."""
    sa, sb = set(a), set(b)
    diff = sa ^ sb
    if not diff:
        return False
    return min(diff) in sa


def solve_component(weights, det_masks, syndrome, cap=None):
    m = len(weights)
    incident: dict[int, list[int]] = {}
    for e in range(m):
        dm = det_masks[e]
        i = 0
        while dm:
            if dm & 1:
                incident.setdefault(i, []).append(e)
            dm >>= 1
            i += 1
    # expensive detectors (cheapest incident edge) bid first
    floor = {i: min(weights[e] for e in es) for i, es in incident.items()}
    det_order = sorted(floor, key=lambda i: -floor[i])

    def lower_bound(unsat):
        lb = 0.0
        slack = {}
        for i in det_order:
            if not (unsat >> i) & 1:
                continue
            bid = None
            for e in incident[i]:
                s = slack.get(e)
                if s is None:
                    s = slack[e] = weights[e]
                if bid is None or s < bid:
                    bid = s
            lb += bid
            for e in incident[i]:
                slack[e] -= bid
        return lb

    def pivot_of(unsat):
        best, best_deg = -1, m + 1
        i = 0
        u = unsat
        while u:
            if u & 1:
                es = incident.get(i)
                if es is None:
                    return -1  # uncoverable detector
                if len(es) < best_deg:
                    best, best_deg = i, len(es)
            u >>= 1
            i += 1
        return best

    # state -> (g, prefix ids); heap carries (f, g, state, prefix)
    if syndrome == 0:
        return (), 0.0
    hcache = {syndrome: lower_bound(syndrome)}
    best_at = {syndrome: (0.0, ())}
    heap = [(hcache[syndrome], 0.0, syndrome, ())]
    best_weight = float("inf") if cap is None else float(cap)
    best_ids = None
    while heap:
        f, g, s, ids = heapq.heappop(heap)
        if f > best_weight + _EPS:
            break
        cur = best_at.get(s)
        if cur is None or ids != cur[1]:
            continue  # superseded entry; the replacement was re-pushed
        if s == 0:
            if (g < best_weight - _EPS
                    or (abs(g - best_weight) <= _EPS
                        and (best_ids is None
                             or tuple(sorted(ids)) < best_ids))):
                best_weight = g
                best_ids = tuple(sorted(ids))
            continue
        p = pivot_of(s)
        if p < 0:
            continue
        for e in incident[p]:
            if e in ids:
                continue  # reusing an edge only cancels and adds weight
            s2 = s ^ det_masks[e]
            g2 = g + weights[e]
            ids2 = ids + (e,)
            h2 = hcache.get(s2)
            if h2 is None:
                h2 = hcache[s2] = lower_bound(s2) if s2 else 0.0
            if g2 + h2 > best_weight + _EPS:
                continue
            old = best_at.get(s2)
            if old is not None:
                if g2 > old[0] + _EPS:
                    continue
                if abs(g2 - old[0]) <= _EPS and not _prefix_better(ids2, old[1]):
                    continue
            best_at[s2] = (g2, ids2)
            heapq.heappush(heap, (g2 + h2, g2, s2, ids2))

    if best_ids is None:
        if cap is not None:
            return None, float("inf")
        raise ValueError("syndrome not coverable by any edge subset")
    return best_ids, best_weight
