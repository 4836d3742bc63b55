# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled exact minimum-weight solver for most-likely-error decoding.

Drop-in twin of _bnb_py.solve_component for components with at most 128
detectors (masks carried as two 64-bit words); the dispatcher falls back
to the pure-Python version above that size or when this extension is not
built.

The search is best-first over residual syndromes.  From residual s, a
fixed pivot detector (an unsatisfied one with the fewest incident edges)
must be cleared by some incident edge, so expanding only pivot-incident
edges is complete, and states reached along different edge orders merge.
The admissible heuristic is a set-cover dual ascent: every unsatisfied
detector bids the smallest remaining slack among its incident edges;
claims per edge never exceed its weight, so the bid total never
overestimates the completion cost.  Equal-weight prefixes reaching one
residual are compared by the smallest edge id in their symmetric
difference, which decides the final sorted-set order no matter what
common suffix completes them.
"""

from libcpp.pair cimport pair
from libcpp.queue cimport priority_queue
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

ctypedef unsigned long long u64
ctypedef pair[double, pair[long, long]] heap_item

cdef double EPS = 1e-9
cdef double INF_BOUND = 1e300


cdef inline u64 mix_hash(u64 lo, u64 hi) nogil:
    return lo * <u64>0x9E3779B97F4A7C15 ^ (hi + <u64>0xC2B2AE3D27D4EB4F) * <u64>0xFF51AFD7ED558CCD


cdef class _Solver:
    cdef int m, n_det
    cdef vector[double] w
    cdef vector[u64] det_lo
    cdef vector[u64] det_hi
    cdef vector[double] slack      # dual-ascent scratch, one slot per edge
    cdef vector[int] det_order     # covered detectors, descending floor
    cdef vector[int] inc_start     # CSR incidence: detector -> edge ids
    cdef vector[int] inc_edge
    # state table: residual syndrome -> g, h, and the current best prefix
    # (a slice of the append-only arena; starts strictly increase, so the
    # start offset doubles as a staleness stamp for heap entries)
    cdef vector[u64] st_lo
    cdef vector[u64] st_hi
    cdef vector[double] st_g
    cdef vector[double] st_h
    cdef vector[long] pfx_start
    cdef vector[int] pfx_len
    cdef vector[int] arena
    cdef unordered_map[u64, vector[int]] lookup

    def __cinit__(self, weights, det_los, det_his):
        cdef int m = len(weights)
        cdef int i, e, d, n_det = 0
        self.m = m
        self.w.resize(m)
        self.det_lo.resize(m)
        self.det_hi.resize(m)
        self.slack.resize(m)
        for e in range(m):
            self.w[e] = weights[e]
            self.det_lo[e] = det_los[e]
            self.det_hi[e] = det_his[e]
            for d in range(127, -1, -1):
                if self._bit(self.det_lo[e], self.det_hi[e], d):
                    if d + 1 > n_det:
                        n_det = d + 1
                    break
        self.n_det = n_det
        cdef vector[int] counts
        counts.resize(n_det + 1, 0)
        for e in range(m):
            for i in range(n_det):
                if self._bit(self.det_lo[e], self.det_hi[e], i):
                    counts[i] += 1
        self.inc_start.resize(n_det + 1)
        cdef int total = 0
        for i in range(n_det):
            self.inc_start[i] = total
            total += counts[i]
        self.inc_start[n_det] = total
        self.inc_edge.resize(total)
        for i in range(n_det):
            counts[i] = self.inc_start[i]  # reuse as fill cursor
        for e in range(m):
            for i in range(n_det):
                if self._bit(self.det_lo[e], self.det_hi[e], i):
                    self.inc_edge[counts[i]] = e
                    counts[i] += 1
        # order covered detectors by descending cheapest-edge weight so the
        # bound claims expensive neighborhoods first
        cdef vector[double] floor
        floor.resize(n_det)
        cdef double f
        for i in range(n_det):
            f = -1
            for d in range(self.inc_start[i], self.inc_start[i + 1]):
                e = self.inc_edge[d]
                if f < 0 or self.w[e] < f:
                    f = self.w[e]
            floor[i] = f
        cdef int j
        for i in range(n_det):
            if self.inc_start[i + 1] == self.inc_start[i]:
                continue
            self.det_order.push_back(i)
            j = self.det_order.size() - 1
            while j > 0 and floor[self.det_order[j - 1]] < floor[i]:
                self.det_order[j] = self.det_order[j - 1]
                j -= 1
            self.det_order[j] = i

    cdef inline int _bit(self, u64 lo, u64 hi, int i) nogil:
        if i < 64:
            return (lo >> i) & 1
        return (hi >> (i - 64)) & 1

    cdef double lower_bound(self, u64 ulo, u64 uhi) nogil:
        cdef double lb = 0, bid
        cdef int k, i, d, e
        for e in range(self.m):
            self.slack[e] = self.w[e]
        for k in range(<int>self.det_order.size()):
            i = self.det_order[k]
            if not self._bit(ulo, uhi, i):
                continue
            bid = -1
            for d in range(self.inc_start[i], self.inc_start[i + 1]):
                e = self.inc_edge[d]
                if bid < 0 or self.slack[e] < bid:
                    bid = self.slack[e]
            lb += bid
            if bid > 0:
                for d in range(self.inc_start[i], self.inc_start[i + 1]):
                    self.slack[self.inc_edge[d]] -= bid
        return lb

    cdef int pivot_of(self, u64 ulo, u64 uhi) nogil:
        # unsatisfied detector with the fewest incident edges; -1 when one
        # has none (the residual is uncoverable)
        cdef int best = -1, best_deg = self.m + 1, i, deg
        for i in range(self.n_det):
            if not self._bit(ulo, uhi, i):
                continue
            deg = self.inc_start[i + 1] - self.inc_start[i]
            if deg == 0:
                return -1
            if deg < best_deg:
                best = i
                best_deg = deg
        return best

    cdef int find_state(self, u64 lo, u64 hi):
        cdef u64 h = mix_hash(lo, hi)
        cdef int idx
        if self.lookup.count(h) == 0:
            return -1
        cdef vector[int]* bucket = &self.lookup[h]
        for idx in bucket[0]:
            if self.st_lo[idx] == lo and self.st_hi[idx] == hi:
                return idx
        return -1

    cdef int new_state(self, u64 lo, u64 hi, double g, double hval):
        cdef int idx = self.st_lo.size()
        self.st_lo.push_back(lo)
        self.st_hi.push_back(hi)
        self.st_g.push_back(g)
        self.st_h.push_back(hval)
        self.pfx_start.push_back(0)
        self.pfx_len.push_back(0)
        self.lookup[mix_hash(lo, hi)].push_back(idx)
        return idx

    cdef long write_prefix(self, int src_idx, int extra):
        # append src's prefix plus one edge; returns the new start offset
        cdef long start = self.arena.size()
        cdef long s0 = self.pfx_start[src_idx]
        cdef int k
        for k in range(self.pfx_len[src_idx]):
            self.arena.push_back(self.arena[s0 + k])
        if extra >= 0:
            self.arena.push_back(extra)
        return start

    cdef bint in_prefix(self, int idx, int e) nogil:
        cdef long s0 = self.pfx_start[idx]
        cdef int k
        for k in range(self.pfx_len[idx]):
            if self.arena[s0 + k] == e:
                return True
        return False

    cdef bint prefix_better(self, long a0, int la, long b0, int lb) nogil:
        # smallest edge id in the symmetric difference decides the final
        # sorted-set comparison regardless of any shared completion
        cdef int i, j, e, ma = -1, mb = -1
        cdef bint found
        for i in range(la):
            e = self.arena[a0 + i]
            found = False
            for j in range(lb):
                if self.arena[b0 + j] == e:
                    found = True
                    break
            if not found and (ma < 0 or e < ma):
                ma = e
        for i in range(lb):
            e = self.arena[b0 + i]
            found = False
            for j in range(la):
                if self.arena[a0 + j] == e:
                    found = True
                    break
            if not found and (mb < 0 or e < mb):
                mb = e
        if ma < 0 and mb < 0:
            return False
        if ma < 0:
            return False
        if mb < 0:
            return True
        return ma < mb

    cdef tuple ids_tuple(self, int idx):
        cdef long s0 = self.pfx_start[idx]
        cdef int k
        return tuple(sorted(self.arena[s0 + k]
                            for k in range(self.pfx_len[idx])))

    def solve(self, u64 slo, u64 shi, double cap=INF_BOUND):
        if slo == 0 and shi == 0:
            return (), 0.0
        self.st_lo.clear(); self.st_hi.clear()
        self.st_g.clear(); self.st_h.clear()
        self.pfx_start.clear(); self.pfx_len.clear()
        self.arena.clear()
        self.lookup.clear()

        cdef priority_queue[heap_item] heap  # max-heap, so f is negated
        cdef double best_weight = cap
        cdef object best_ids = None
        cdef double h0 = self.lower_bound(slo, shi)
        cdef int root = self.new_state(slo, shi, 0.0, h0)
        if h0 <= best_weight + EPS:
            heap.push(heap_item(-h0, pair[long, long](root, 0)))

        cdef heap_item top
        cdef double f, g, g2, h2
        cdef long idx, stamp, start
        cdef int p, d, e, idx2
        cdef u64 lo, hi, lo2, hi2
        cdef object cand
        while not heap.empty():
            top = heap.top()
            heap.pop()
            f = -top.first
            idx = top.second.first
            stamp = top.second.second
            if f > best_weight + EPS:
                break
            if self.pfx_start[idx] != stamp:
                continue  # superseded entry; replacement was re-pushed
            lo = self.st_lo[idx]
            hi = self.st_hi[idx]
            g = self.st_g[idx]
            if lo == 0 and hi == 0:
                cand = self.ids_tuple(idx)
                if (g < best_weight - EPS
                        or (g <= best_weight + EPS
                            and (best_ids is None or cand < best_ids))):
                    best_weight = g
                    best_ids = cand
                continue
            p = self.pivot_of(lo, hi)
            if p < 0:
                continue
            for d in range(self.inc_start[p], self.inc_start[p + 1]):
                e = self.inc_edge[d]
                if self.in_prefix(idx, e):
                    continue  # reusing an edge only cancels and adds weight
                lo2 = lo ^ self.det_lo[e]
                hi2 = hi ^ self.det_hi[e]
                g2 = g + self.w[e]
                idx2 = self.find_state(lo2, hi2)
                if idx2 < 0:
                    if lo2 == 0 and hi2 == 0:
                        h2 = 0
                    else:
                        h2 = self.lower_bound(lo2, hi2)
                    if g2 + h2 > best_weight + EPS:
                        continue
                    idx2 = self.new_state(lo2, hi2, g2, h2)
                    start = self.write_prefix(idx, e)
                    self.pfx_start[idx2] = start
                    self.pfx_len[idx2] = self.pfx_len[idx] + 1
                    # refetch: new_state may have grown vectors past idx
                else:
                    h2 = self.st_h[idx2]
                    if g2 + h2 > best_weight + EPS:
                        continue
                    if g2 > self.st_g[idx2] + EPS:
                        continue
                    start = self.write_prefix(idx, e)
                    if (g2 >= self.st_g[idx2] - EPS
                            and not self.prefix_better(
                                start, self.pfx_len[idx] + 1,
                                self.pfx_start[idx2], self.pfx_len[idx2])):
                        continue
                    self.st_g[idx2] = g2
                    self.pfx_start[idx2] = start
                    self.pfx_len[idx2] = self.pfx_len[idx] + 1
                heap.push(heap_item(-(g2 + h2),
                                    pair[long, long](idx2, self.pfx_start[idx2])))

        if best_ids is None:
            if cap < INF_BOUND:
                return None, float("inf")
            raise ValueError("syndrome not coverable by any edge subset")
        return best_ids, best_weight


def solve_component(weights, det_masks, syndrome, cap=None):
    if any(dm >> 128 for dm in det_masks) or syndrome >> 128:
        raise ValueError("compiled core limited to 128 detectors")
    los = [dm & 0xFFFFFFFFFFFFFFFF for dm in det_masks]
    his = [dm >> 64 for dm in det_masks]
    solver = _Solver(list(weights), los, his)
    return solver.solve(<u64> (syndrome & 0xFFFFFFFFFFFFFFFF),
                        <u64> (syndrome >> 64),
                        INF_BOUND if cap is None else <double> cap)
