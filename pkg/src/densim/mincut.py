"""Max-flow / min-cut engine with monotone parametric re-solves.

Directed capacitated networks with a designated source and sink.  Arcs
registered as parametric may have their capacities rewritten between solves
in the monotone direction only: source-leaving capacities non-increasing,
sink-entering capacities non-decreasing.  Solver state (flows) is retained
across updates so re-solves are incremental; a from-scratch path
(``min_cut(fresh=True)``) ships alongside as the oracle for the incremental
one.

The returned cut side is always the MAXIMAL source set: the complement of
the nodes that can still reach the sink in the final residual network.
Infinite capacities use the IEEE ``inf`` sentinel; they never saturate, are
never parametric, and a returned cut never crosses one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numba import njit

INFINITE = math.inf


@dataclass(frozen=True)
class CutResult:
    cut_value: float
    source_side: frozenset
    flow_value: float


# ---------------------------------------------------------------------------
# numba kernels.  Arc k occupies residual slots 2k (forward) and 2k+1
# (reverse); partner slot is slot ^ 1.  res[slot] is remaining capacity.

@njit(cache=True, nogil=True)
def _counting_sort_slots(slot_from, off, adj):
    """Stable counting sort of slot ids by their from-node into ``adj``."""
    n = off.shape[0] - 1
    pos = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = off[v]
    for i in range(slot_from.shape[0]):
        v = slot_from[i]
        adj[pos[v]] = i
        pos[v] += 1


@njit(cache=True, nogil=True)
def _bfs_dist_to_sink(n, sink, off, adj, slot_to, res, dist, queue):
    """Exact residual distance to the sink; unreachable nodes get n."""
    for v in range(n):
        dist[v] = n
    dist[sink] = 0
    head = 0
    tail = 0
    queue[tail] = sink
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        for ptr in range(off[v], off[v + 1]):
            tau = adj[ptr]
            u = slot_to[tau]
            # residual arc u -> v is the partner slot
            if dist[u] == n and res[tau ^ 1] > 0.0:
                dist[u] = dv + 1
                queue[tail] = u
                tail += 1


@njit(cache=True, nogil=True)
def _reach_sink(n, sink, off, adj, slot_to, res, mark, queue, eps):
    """Nodes with a residual path to the sink, ignoring dust below eps."""
    for v in range(n):
        mark[v] = False
    mark[sink] = True
    head = 0
    tail = 0
    queue[tail] = sink
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for ptr in range(off[v], off[v + 1]):
            tau = adj[ptr]
            u = slot_to[tau]
            if (not mark[u]) and res[tau ^ 1] > eps:
                mark[u] = True
                queue[tail] = u
                tail += 1


@njit(cache=True, nogil=True)
def _discharge(n, source, sink, off, adj, slot_to, res, excess, dist, cur,
               queue, in_q, bfs_queue):
    """FIFO push-relabel to a maximum preflow (first phase).

    Nodes whose label reaches n are deactivated; their excess stays trapped
    and is returned to the source afterwards.  Runs global relabels every n
    relabel operations and terminates on a relabel-verified fixpoint.
    """
    cap = queue.shape[0]
    relabel_budget = n if n > 16 else 16
    while True:
        _bfs_dist_to_sink(n, sink, off, adj, slot_to, res, dist, bfs_queue)
        dist[source] = n
        head = 0
        tail = 0
        for v in range(n):
            in_q[v] = False
            cur[v] = off[v]
        for v in range(n):
            if v != source and v != sink and excess[v] > 0.0 and dist[v] < n:
                queue[tail % cap] = v
                tail += 1
                in_q[v] = True
        if tail == 0:
            return
        relabels = 0
        interrupted = False
        while head < tail:
            v = queue[head % cap]
            head += 1
            in_q[v] = False
            while excess[v] > 0.0 and dist[v] < n:
                if cur[v] >= off[v + 1]:
                    nd = 2 * n
                    for ptr in range(off[v], off[v + 1]):
                        tau = adj[ptr]
                        if res[tau] > 0.0:
                            dw = dist[slot_to[tau]]
                            if dw + 1 < nd:
                                nd = dw + 1
                    if nd < n:
                        dist[v] = nd
                    else:
                        dist[v] = n
                    cur[v] = off[v]
                    relabels += 1
                    if relabels >= relabel_budget:
                        interrupted = True
                        break
                else:
                    tau = adj[cur[v]]
                    w = slot_to[tau]
                    if res[tau] > 0.0 and dist[v] == dist[w] + 1:
                        delta = excess[v]
                        if res[tau] < delta:
                            delta = res[tau]
                        res[tau] -= delta
                        res[tau ^ 1] += delta
                        excess[v] -= delta
                        excess[w] += delta
                        if w != source and w != sink and not in_q[w] and dist[w] < n:
                            queue[tail % cap] = w
                            tail += 1
                            in_q[w] = True
                    else:
                        cur[v] += 1
            if interrupted:
                break
        # loop back: recompute exact labels; exit only on an empty rebuild


@njit(cache=True, nogil=True)
def _return_excess(n, source, sink, off, adj, slot_to, res, excess,
                   pnode, pslot, pos, eps):
    """Second phase: cancel trapped excess back to the source.

    Walks backward along flow-carrying arcs (odd slots whose residual
    exceeds the dust threshold ``eps``), cancelling flow cycles met on the
    way.  Leaves a feasible flow of unchanged value.  Returns the largest
    amount that could not be returned; anything beyond float dust there
    means corrupt state and is the caller's job to reject.
    """
    for i in range(n):
        pos[i] = -1
    dropped = 0.0
    for v in range(n):
        if v == source or v == sink:
            continue
        while excess[v] > eps:
            plen = 0
            pnode[0] = v
            pos[v] = 0
            x = v
            reached = False
            while True:
                if x == source:
                    reached = True
                    break
                tau = -1
                w = -1
                for ptr in range(off[x], off[x + 1]):
                    t_ = adj[ptr]
                    if (t_ & 1) == 1 and res[t_] > eps:
                        tau = t_
                        w = slot_to[t_]
                        break
                if tau < 0:
                    break  # only reachable through dust-level imbalance
                if pos[w] != -1:
                    j = pos[w]
                    b = res[tau]
                    for i in range(j, plen):
                        if res[pslot[i]] < b:
                            b = res[pslot[i]]
                    res[tau] -= b
                    res[tau ^ 1] += b
                    for i in range(j, plen):
                        res[pslot[i]] -= b
                        res[pslot[i] ^ 1] += b
                    for i in range(plen + 1):
                        pos[pnode[i]] = -1
                    plen = 0
                    pnode[0] = v
                    pos[v] = 0
                    x = v
                    continue
                pslot[plen] = tau
                plen += 1
                pnode[plen] = w
                pos[w] = plen
                x = w
            if reached:
                b = excess[v]
                for i in range(plen):
                    if res[pslot[i]] < b:
                        b = res[pslot[i]]
                for i in range(plen):
                    res[pslot[i]] -= b
                    res[pslot[i] ^ 1] += b
                excess[v] -= b
            for i in range(plen + 1):
                pos[pnode[i]] = -1
            if not reached:
                if excess[v] > dropped:
                    dropped = excess[v]
                excess[v] = 0.0
                break
        if excess[v] <= eps:
            excess[v] = 0.0
    return dropped


@njit(cache=True, nogil=True)
def _drain_deficit(start, amount, sink, off, adj, slot_to, res,
                   pnode, pslot, pos, eps):
    """Reduce ``amount`` units of outflow at ``start`` along flow paths to
    the sink (forward analog of :func:`_return_excess`)."""
    for i in range(pos.shape[0]):
        pos[i] = -1
    remaining = amount
    while remaining > eps:
        plen = 0
        pnode[0] = start
        pos[start] = 0
        x = start
        reached = False
        while True:
            if x == sink:
                reached = True
                break
            sigma = -1
            w = -1
            for ptr in range(off[x], off[x + 1]):
                s_ = adj[ptr]
                if (s_ & 1) == 0 and res[s_ ^ 1] > eps:
                    sigma = s_
                    w = slot_to[s_]
                    break
            if sigma < 0:
                break
            if pos[w] != -1:
                j = pos[w]
                b = res[sigma ^ 1]
                for i in range(j, plen):
                    if res[pslot[i] ^ 1] < b:
                        b = res[pslot[i] ^ 1]
                res[sigma] += b
                res[sigma ^ 1] -= b
                for i in range(j, plen):
                    res[pslot[i]] += b
                    res[pslot[i] ^ 1] -= b
                for i in range(plen + 1):
                    pos[pnode[i]] = -1
                plen = 0
                pnode[0] = start
                pos[start] = 0
                x = start
                continue
            pslot[plen] = sigma
            plen += 1
            pnode[plen] = w
            pos[w] = plen
            x = w
        if reached:
            b = remaining
            for i in range(plen):
                if res[pslot[i] ^ 1] < b:
                    b = res[pslot[i] ^ 1]
            for i in range(plen):
                res[pslot[i]] += b
                res[pslot[i] ^ 1] -= b
            remaining -= b
        for i in range(plen + 1):
            pos[pnode[i]] = -1
        if not reached:
            break
    return remaining


class FlowNetwork:
    """Directed capacitated network with parametric source/sink arcs.

    Single-owner object: build with :meth:`add_arc`, then solve.  Adding
    arcs after the first solve is not allowed.  Distinct networks may be
    solved concurrently; one network must not be shared during a solve.
    """

    def __init__(self, node_count: int, source: int, sink: int):
        if node_count < 2:
            raise ValueError("need at least source and sink")
        if not (0 <= source < node_count and 0 <= sink < node_count):
            raise ValueError("source/sink out of range")
        if source == sink:
            raise ValueError("source and sink must differ")
        self.node_count = node_count
        self.source = source
        self.sink = sink
        self._chunks = []            # (tails, heads, caps) numpy triples
        self._param_chunks = []      # numpy arrays of parametric arc ids
        self._n_arcs = 0
        self._tails = None           # materialized arrays
        self._heads = None
        self._caps = None
        self._param_mask = None
        self._compiled = False
        self._has_flow = False
        self._dirty = True
        self._cached = None

    @property
    def arc_count(self) -> int:
        return self._n_arcs

    @property
    def parametric_arcs(self):
        self._materialize()
        return tuple(int(a) for chunk in self._param_chunks for a in chunk)

    def arc(self, arc_id: int):
        """(tail, head, capacity) of an arc; capacity may be INFINITE."""
        self._materialize()
        return int(self._tails[arc_id]), int(self._heads[arc_id]), float(self._caps[arc_id])

    def add_arc(self, tail: int, head: int, capacity: float, parametric: bool = False) -> int:
        ids = self.add_arcs(np.array([tail], dtype=np.int64),
                            np.array([head], dtype=np.int64),
                            np.array([float(capacity)], dtype=np.float64),
                            parametric=parametric)
        return int(ids[0])

    def add_arcs(self, tails, heads, capacities, parametric: bool = False) -> np.ndarray:
        """Bulk arc insertion; returns the new arc ids.

        Same validation rules as :meth:`add_arc`, applied vectorized.
        """
        if self._compiled:
            raise RuntimeError("network already solved; build a new one to add arcs")
        tails = np.ascontiguousarray(tails, dtype=np.int64)
        heads = np.ascontiguousarray(heads, dtype=np.int64)
        caps = np.ascontiguousarray(capacities, dtype=np.float64)
        if not (tails.shape == heads.shape == caps.shape):
            raise ValueError("mismatched arc array lengths")
        n = self.node_count
        if tails.size:
            if tails.min() < 0 or tails.max() >= n or heads.min() < 0 or heads.max() >= n:
                raise ValueError("arc endpoint out of range")
            if np.any(tails == heads):
                raise ValueError("self-arcs not allowed")
            if np.any(heads == self.source):
                raise ValueError("no arc may enter the source")
            if np.any(tails == self.sink):
                raise ValueError("no arc may leave the sink")
            if np.any(np.isnan(caps)) or np.any(caps < 0.0):
                raise ValueError("capacities must be nonnegative")
            inf_mask = np.isinf(caps)
            if np.any(inf_mask & (tails == self.source)):
                raise ValueError("source-adjacent arcs must be finite")
            if parametric:
                if np.any(inf_mask):
                    raise ValueError("INFINITE arcs are never parametric")
                if np.any((tails != self.source) & (heads != self.sink)):
                    raise ValueError("parametric arcs must leave the source or enter the sink")
        ids = np.arange(self._n_arcs, self._n_arcs + tails.size, dtype=np.int64)
        self._chunks.append((tails, heads, caps))
        if parametric:
            self._param_chunks.append(ids)
        self._n_arcs += tails.size
        self._tails = None  # invalidate materialized view
        return ids

    def _materialize(self):
        if self._tails is not None:
            return
        if self._chunks:
            self._tails = np.concatenate([c[0] for c in self._chunks])
            self._heads = np.concatenate([c[1] for c in self._chunks])
            self._caps = np.concatenate([c[2] for c in self._chunks])
        else:
            self._tails = np.zeros(0, dtype=np.int64)
            self._heads = np.zeros(0, dtype=np.int64)
            self._caps = np.zeros(0, dtype=np.float64)
        mask = np.zeros(self._n_arcs, dtype=bool)
        for chunk in self._param_chunks:
            mask[chunk] = True
        self._param_mask = mask

    # -- compilation ------------------------------------------------------

    def _compile(self):
        self._materialize()
        n = self.node_count
        k = self._n_arcs
        tails = self._tails
        heads = self._heads
        caps = self._caps

        slot_from = np.empty(2 * k, dtype=np.int64)
        slot_to = np.empty(2 * k, dtype=np.int64)
        cap0 = np.zeros(2 * k, dtype=np.float64)
        slot_from[0::2] = tails
        slot_to[0::2] = heads
        slot_from[1::2] = heads
        slot_to[1::2] = tails
        cap0[0::2] = caps

        counts = np.bincount(slot_from, minlength=n)
        off = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=off[1:])
        order = np.empty(2 * k, dtype=np.int64)
        _counting_sort_slots(slot_from, off, order)

        self._slot_from = slot_from
        self._slot_to = slot_to
        self._cap0 = cap0
        self._adj = order
        self._off = off
        self._res = np.zeros(2 * k, dtype=np.float64)
        self._excess = np.zeros(n, dtype=np.float64)
        self._dist = np.zeros(n, dtype=np.int64)
        self._cur = np.zeros(n, dtype=np.int64)
        self._queue = np.zeros(n + 2, dtype=np.int64)
        self._in_q = np.zeros(n, dtype=np.bool_)
        self._bfsq = np.zeros(n + 1, dtype=np.int64)
        self._mark = np.zeros(n, dtype=np.bool_)
        self._pos = np.zeros(n, dtype=np.int64)
        self._pnode = np.zeros(n + 1, dtype=np.int64)
        self._pslot = np.zeros(n + 1, dtype=np.int64)
        src_even = np.nonzero(tails == self.source)[0] * 2
        self._source_slots = src_even.astype(np.int64)
        self._even_from = tails
        self._even_to = heads
        self._compiled = True

    def _reset_state(self):
        self._res[0::2] = self._cap0[0::2]
        self._res[1::2] = 0.0
        self._excess[:] = 0.0
        self._has_flow = False

    def _finite_cap_scale(self) -> float:
        caps = self._cap0[0::2]
        finite = caps[np.isfinite(caps)]
        return float(finite.max()) if finite.size else 0.0

    def _dust_eps(self) -> float:
        # float-cancellation noise threshold for flow surgery and cut
        # extraction, scaled to the largest finite capacity
        return 1e-12 * max(1.0, self._finite_cap_scale())

    # -- parametric updates ------------------------------------------------

    def update_parametric(self, new_caps) -> None:
        """Rewrite parametric arc capacities, keeping solver state usable.

        Source-leaving capacities must not increase; sink-entering ones must
        not decrease.  Retained flow is clamped and repaired so the next
        :meth:`min_cut` re-solves incrementally.  ``new_caps`` is a mapping
        arc id -> capacity, or an (ids, capacities) array pair.
        """
        if not self._compiled:
            self._compile()
            self._reset_state()
        if isinstance(new_caps, Mapping):
            ids = np.fromiter(new_caps.keys(), dtype=np.int64, count=len(new_caps))
            vals = np.fromiter(new_caps.values(), dtype=np.float64, count=len(new_caps))
        else:
            ids, vals = new_caps
            ids = np.ascontiguousarray(ids, dtype=np.int64)
            vals = np.ascontiguousarray(vals, dtype=np.float64)
        if ids.size == 0:
            return
        bad = ~self._param_mask[ids]
        if np.any(bad):
            raise ValueError(f"arc {int(ids[bad][0])} is not parametric")
        if np.any(np.isnan(vals)) or np.any(vals < 0.0) or np.any(np.isinf(vals)):
            raise ValueError("parametric capacities must be finite and nonnegative")
        old = self._caps[ids]
        slack = 1e-12 * np.maximum(1.0, old)
        from_source = self._tails[ids] == self.source
        raised = from_source & (vals > old + slack)
        if np.any(raised):
            i = int(np.nonzero(raised)[0][0])
            raise ValueError(
                f"monotonicity violated: source arc {int(ids[i])} capacity "
                f"raised from {old[i]} to {vals[i]}")
        lowered = ~from_source & (vals < old - slack)
        if np.any(lowered):
            i = int(np.nonzero(lowered)[0][0])
            raise ValueError(
                f"monotonicity violated: sink arc {int(ids[i])} capacity "
                f"lowered from {old[i]} to {vals[i]}")
        changed = vals != old
        if not np.any(changed):
            return
        ids = ids[changed]
        vals = vals[changed]
        f_slots = 2 * ids
        if self._has_flow:
            flows = self._res[f_slots ^ 1]
            fits = vals >= flows
            self._res[f_slots[fits]] = vals[fits] - flows[fits]
            clamped = np.nonzero(~fits)[0]
            if clamped.size:
                eps = self._dust_eps()
                for i in clamped:
                    f_slot = int(f_slots[i])
                    deficit = float(flows[i] - vals[i])
                    left = _drain_deficit(int(self._heads[ids[i]]), deficit,
                                          self.sink, self._off, self._adj,
                                          self._slot_to, self._res, self._pnode,
                                          self._pslot, self._pos, eps)
                    if left > 1e-7 * max(1.0, deficit):
                        raise RuntimeError("flow repair failed; network state corrupt")
                    self._res[f_slot] = 0.0
                    self._res[f_slot ^ 1] = vals[i]
        else:
            self._res[f_slots] = vals
        self._cap0[f_slots] = vals
        self._caps[ids] = vals
        self._dirty = True
        self._cached = None

    # -- solving -----------------------------------------------------------

    def min_cut(self, fresh: bool = False) -> CutResult:
        """Minimum s-t cut with the maximal source side.

        ``fresh=True`` discards retained state and solves from scratch; it
        is the oracle path for incremental re-solves.
        """
        if not self._compiled:
            self._compile()
            self._reset_state()
        if not fresh and not self._dirty and self._cached is not None:
            return self._cached
        if fresh or not self._has_flow:
            self._reset_state()
        n = self.node_count
        self._excess[:] = 0.0
        # saturate source arcs (re-entry of residual capacity on warm starts)
        sl = self._source_slots
        if sl.size:
            amounts = self._res[sl].copy()
            heads = self._slot_to[sl]
            np.add.at(self._excess, heads, amounts)
            self._res[sl ^ 1] += amounts
            self._res[sl] = 0.0
            self._excess[self.source] = 0.0
            self._excess[self.sink] = 0.0
        _discharge(n, self.source, self.sink, self._off, self._adj, self._slot_to,
                   self._res, self._excess, self._dist, self._cur, self._queue,
                   self._in_q, self._bfsq)
        eps = self._dust_eps()
        dropped = _return_excess(n, self.source, self.sink, self._off, self._adj,
                                 self._slot_to, self._res, self._excess,
                                 self._pnode, self._pslot, self._pos, eps)
        if dropped > 1e-7 * max(1.0, self._finite_cap_scale()):
            raise RuntimeError("flow conversion failed; trapped excess not returnable")
        result = self._extract()
        self._has_flow = True
        self._dirty = False
        self._cached = result
        return result

    def _extract(self) -> CutResult:
        n = self.node_count
        eps = self._dust_eps()
        _reach_sink(n, self.sink, self._off, self._adj, self._slot_to,
                    self._res, self._mark, self._bfsq, eps)
        if self._mark[self.source]:
            raise RuntimeError("solver failed: source still reaches sink")
        side = ~self._mark
        cross = side[self._even_from] & ~side[self._even_to]
        caps = self._cap0[0::2][cross]
        if caps.size and not np.all(np.isfinite(caps)):
            raise RuntimeError("structurally infinite min cut")
        cut_value = math.fsum(caps) if caps.size else 0.0
        flow_value = math.fsum(self._res[self._source_slots ^ 1]) if self._source_slots.size else 0.0
        scale = max(1.0, abs(cut_value), abs(flow_value))
        if abs(cut_value - flow_value) > 1e-7 * scale:
            raise RuntimeError(
                f"max-flow/min-cut mismatch: cut={cut_value!r} flow={flow_value!r}")
        source_side = frozenset(int(v) for v in np.nonzero(side)[0])
        return CutResult(cut_value=cut_value, source_side=source_side,
                         flow_value=flow_value)

    # -- debug output ------------------------------------------------------

    def to_dimacs(self) -> str:
        """DIMACS max-flow text dump for cross-checking external solvers.

        INFINITE capacities are emitted as one plus the sum of all finite
        capacities (equivalent for any feasible flow), flagged in a comment.
        """
        self._materialize()
        finite_sum = math.fsum(c for c in self._caps if math.isfinite(c))
        bound = finite_sum + 1.0
        lines = [
            "c densim flow network",
            f"c INFINITE arcs emitted with capacity {bound:.12g}",
            f"p max {self.node_count} {self.arc_count}",
            f"n {self.source + 1} s",
            f"n {self.sink + 1} t",
        ]
        for t_, h_, c_ in zip(self._tails, self._heads, self._caps):
            cap = bound if math.isinf(c_) else c_
            lines.append(f"a {t_ + 1} {h_ + 1} {cap:.12g}")
        return "\n".join(lines) + "\n"
