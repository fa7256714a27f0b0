"""Linearized subproblem solver: selection value via minimum cut.

Given selectable elements with sparse symmetric pair rewards, an optional
node-cover penalty, and a linear cost per selected element, the problem

    Q(X) = sum of pair rewards inside X - penalty * |covered nodes of X|
           - cost * |X|

is maximized by a single min-cut on an auxiliary flow network: one node per
element, one per coverable node, pair rewards as bidirectional arcs of half
weight, infinite arcs from elements to the nodes they cover, penalty arcs
into the sink, and per-element source arcs carrying half the element's total
pair reward minus the linear cost.  Negative source capacities are shifted
onto element-to-sink arcs; the constant offset cancels in the reported value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from densim.mincut import INFINITE, FlowNetwork


@dataclass(frozen=True)
class QInstance:
    """One linearized subproblem over generic selectable elements.

    ``pair_weights`` maps canonical element pairs (i < j) to nonnegative
    rewards; zero pairs need not be stored.  ``cover`` (when present) maps
    every element to the node ids it covers; each covered node costs
    ``node_penalty`` once, no matter how many selected elements cover it.
    """

    element_count: int
    pair_weights: Mapping[Tuple[int, int], float]
    cover: Optional[Sequence[Tuple[int, ...]]] = None
    node_penalty: float = 0.0
    linear_cost: float = 0.0

    def __post_init__(self):
        if self.element_count < 1:
            raise ValueError("need at least one element")
        for (i, j), w in self.pair_weights.items():
            if not (0 <= i < j < self.element_count):
                raise ValueError(f"pair ({i},{j}) not canonical or out of range")
            if w < 0:
                raise ValueError(f"negative pair weight for ({i},{j})")
        if self.node_penalty < 0:
            raise ValueError("node penalty must be nonnegative")
        if self.node_penalty > 0 and self.cover is None:
            raise ValueError("node penalty requires a cover map")
        if self.cover is not None and len(self.cover) != self.element_count:
            raise ValueError("cover map must be total over elements")

    def half_totals(self) -> np.ndarray:
        """Half of each element's total pair weight (source-side base)."""
        ei, ej, w = self.pair_arrays()
        tot = np.zeros(self.element_count, dtype=np.float64)
        np.add.at(tot, ei, w)
        np.add.at(tot, ej, w)
        return tot / 2.0

    def pair_arrays(self):
        """(ei, ej, w) numpy views over the stored pairs."""
        pw = self.pair_weights
        ei = np.fromiter((k[0] for k in pw), dtype=np.int64, count=len(pw))
        ej = np.fromiter((k[1] for k in pw), dtype=np.int64, count=len(pw))
        w = np.fromiter(pw.values(), dtype=np.float64, count=len(pw))
        return ei, ej, w

    def pair_sum(self) -> float:
        return math.fsum(self.pair_weights.values())


def _cover_arrays(cover) -> Tuple[np.ndarray, np.ndarray]:
    elems = np.fromiter((e for e, covered in enumerate(cover) for _ in covered),
                        dtype=np.int64)
    nodes = np.fromiter((v for covered in cover for v in covered), dtype=np.int64)
    return elems, nodes


def build_flow_graph(q: QInstance, pair_arrays=None, cover_arrays=None) -> FlowNetwork:
    """Flow network whose min cut solves the instance at its linear cost.

    Layout: node 0 = source, node 1 = sink, elements at 2..2+n-1, covered
    nodes after them.  Every element gets a parametric source arc of
    capacity max(half_total - cost, 0) and a parametric deficit arc to the
    sink of capacity max(cost - half_total, 0), so later cost increases only
    move capacities in the supported monotone direction.  The network
    exposes ``element_arcs``: per element, the (source_arc, deficit_arc) ids.

    ``pair_arrays`` / ``cover_arrays`` accept precomputed (ei, ej, w) and
    (elements, nodes) arrays to skip the dict walks on hot paths.
    """
    if pair_arrays is None:
        pair_arrays = q.pair_arrays()
    if q.cover is not None and cover_arrays is None:
        cover_arrays = _cover_arrays(q.cover)
    return _build_network(q.element_count, pair_arrays, cover_arrays,
                          q.node_penalty, q.linear_cost)


def _build_network(n, pair_arrays, cover_arrays, node_penalty, linear_cost) -> FlowNetwork:
    ei, ej, w = pair_arrays

    if cover_arrays is not None:
        cov_elem, cov_node = cover_arrays
        uniq, dense = np.unique(cov_node, return_inverse=True)
    else:
        uniq = np.zeros(0, dtype=np.int64)
        dense = None
    net = FlowNetwork(2 + n + uniq.size, source=0, sink=1)

    nz = w > 0.0
    u_i = ei[nz] + 2
    u_j = ej[nz] + 2
    half_w = w[nz] / 2.0
    net.add_arcs(u_i, u_j, half_w)
    net.add_arcs(u_j, u_i, half_w)
    if cover_arrays is not None:
        base = 2 + n
        net.add_arcs(cov_elem + 2, dense + base,
                     np.full(dense.shape, INFINITE))
        net.add_arcs(np.arange(uniq.size, dtype=np.int64) + base,
                     np.full(uniq.size, 1, dtype=np.int64),
                     np.full(uniq.size, float(node_penalty)))

    half = np.zeros(n, dtype=np.float64)
    np.add.at(half, ei, w / 2.0)
    np.add.at(half, ej, w / 2.0)
    b = half - linear_cost
    elem_ids = np.arange(n, dtype=np.int64) + 2
    src_ids = net.add_arcs(np.zeros(n, dtype=np.int64), elem_ids,
                           np.maximum(b, 0.0), parametric=True)
    dfc_ids = net.add_arcs(elem_ids, np.full(n, 1, dtype=np.int64),
                           np.maximum(-b, 0.0), parametric=True)
    net.element_arcs = list(zip(src_ids.tolist(), dfc_ids.tolist()))
    net.element_arc_arrays = (src_ids, dfc_ids)
    net.half_totals_cache = half
    return net


def element_caps(net: FlowNetwork, cost: float):
    """Parametric capacities realizing a new linear cost on a built network.

    Returns an (ids, capacities) array pair accepted by the network's
    ``update_parametric``.
    """
    half = net.half_totals_cache
    src_ids, dfc_ids = net.element_arc_arrays
    b = half - cost
    ids = np.concatenate([src_ids, dfc_ids])
    caps = np.concatenate([np.maximum(b, 0.0), np.maximum(-b, 0.0)])
    return ids, caps


def selected_from_cut(net: FlowNetwork, source_side: frozenset, element_count: int) -> frozenset:
    """Elements on the maximal source side of a cut of ``net``."""
    return frozenset(e for e in range(element_count) if (2 + e) in source_side)


def q_value_from_cut(q_pair_sum: float, half: np.ndarray, cost: float,
                     cut_value: float) -> float:
    """Recover the optimal selection value from a measured cut value.

    The measured cut includes the nonnegativity shift K = sum of deficits;
    subtracting it restores the identity
    value = -cut + total pair sum - cost * elements.
    """
    half = np.asarray(half, dtype=np.float64)
    shift = math.fsum(np.maximum(cost - half, 0.0))
    ideal_cut = cut_value - shift
    return -ideal_cut + q_pair_sum - cost * len(half)


def evaluate_q(q: QInstance, selected: Iterable[int]) -> float:
    """Direct evaluation of the selection value, bypassing the cut."""
    chosen = set(selected)
    terms = [w for (i, j), w in q.pair_weights.items() if i in chosen and j in chosen]
    value = math.fsum(terms)
    if q.cover is not None and q.node_penalty > 0 and chosen:
        covered = set()
        for e in chosen:
            covered.update(q.cover[e])
        value -= q.node_penalty * len(covered)
    value -= q.linear_cost * len(chosen)
    return value


def solve_q(q: QInstance) -> Tuple[frozenset, float]:
    """Maximize the selection value; returns (elements, value).

    The returned set is the maximal optimum (largest among ties); the value
    is never below zero since the empty selection scores zero.
    """
    net = build_flow_graph(q)
    result = net.min_cut()
    selected = selected_from_cut(net, result.source_side, q.element_count)
    value = q_value_from_cut(q.pair_sum(), net.half_totals_cache, q.linear_cost,
                             result.cut_value)
    return selected, value
