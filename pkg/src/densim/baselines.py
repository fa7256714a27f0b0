"""Reference heuristics that treat the two criteria asymmetrically.

Both reduce to one densest-weighted-subgraph computation on a complete
weighted graph: one works at the node level (density first, similarity as a
weight bonus), the other at the edge level (similarity first, adjacency as a
bonus).  A tuning factor gamma blends the secondary signal in.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from densim.core import EdgeSimilarity, Graph, _canonical_edge
from densim.fp import solve_fractional
from densim.ingest import MultilayerGraph, build_similarity, jaccard

# Above this many elements the edge-level baseline can need O(n^2) pairs.
SIZE_WARNING_THRESHOLD = 20_000


@dataclass(frozen=True)
class WeightedCompleteGraph:
    """Complete weighted graph over abstract elements; zero pairs implicit."""

    element_count: int
    weights: Dict[Tuple[int, int], float]
    gamma: float = 0.0

    def __post_init__(self):
        for (i, j), w in self.weights.items():
            if not (0 <= i < j < self.element_count):
                raise ValueError(f"pair ({i},{j}) not canonical or out of range")
            if w < 0:
                raise ValueError("pair weights must be nonnegative")


def densest_weighted_subgraph(wg: WeightedCompleteGraph) -> Tuple[frozenset, float]:
    """Element set maximizing (sum of inside pair weights) / set size."""
    if not any(w > 0 for w in wg.weights.values()):
        raise ValueError("all pair weights are zero")
    selected, ratio, _ = solve_fractional(wg.element_count, dict(wg.weights))
    return selected, ratio


def _node_layer_labels(ml: MultilayerGraph):
    """Per node, the set of layers in which it participates in an edge."""
    labels = [set() for _ in ml.node_names]
    for e_idx, (u, v) in enumerate(ml.edges):
        labels[u] |= ml.edge_labels[e_idx]
        labels[v] |= ml.edge_labels[e_idx]
    return labels


def bl_den(ml: MultilayerGraph, gamma: float,
           graph: Optional[Graph] = None) -> frozenset:
    """Density-first baseline; returns flattened edge ids.

    Node pairs are weighted 1 if connected in any layer plus gamma times the
    Jaccard overlap of their layer activity; the densest weighted node set is
    found and ALL flattened edges among the selected nodes are returned.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if graph is None:
        graph = ml.to_graph()
    weights: Dict[Tuple[int, int], float] = {}
    for u, v in graph.edges:
        weights[_canonical_edge(u, v)] = 1.0
    if gamma > 0:
        labels = _node_layer_labels(ml)
        per_layer: Dict[str, set] = {layer: set() for layer in ml.layers}
        for e_idx, (u, v) in enumerate(ml.edges):
            for layer in ml.edge_labels[e_idx]:
                per_layer[layer].add(u)
                per_layer[layer].add(v)
        # node pairs active in a common layer are exactly those with a
        # nonzero activity overlap; enumerate per layer, bonus applied once
        done = set()
        for nodes in per_layer.values():
            ordered = sorted(nodes)
            for a in range(len(ordered)):
                la = labels[ordered[a]]
                for b in range(a + 1, len(ordered)):
                    key = (ordered[a], ordered[b])
                    if key in done:
                        continue
                    done.add(key)
                    weights[key] = weights.get(key, 0.0) + gamma * jaccard(la, labels[ordered[b]])
    wg = WeightedCompleteGraph(element_count=graph.node_count, weights=weights,
                               gamma=gamma)
    nodes, _ = densest_weighted_subgraph(wg)
    return frozenset(e for e, (u, v) in enumerate(graph.edges)
                     if u in nodes and v in nodes)


def bl_sim(ml: MultilayerGraph, gamma: float,
           graph: Optional[Graph] = None,
           sim: Optional[EdgeSimilarity] = None) -> frozenset:
    """Similarity-first baseline; returns flattened edge ids.

    Edge pairs are weighted by their pairwise similarity plus gamma when the
    two edges share an endpoint; the densest weighted edge set is returned
    directly.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if graph is None or sim is None:
        graph, sim = build_similarity(ml)
    if graph.num_edges > SIZE_WARNING_THRESHOLD:
        warnings.warn(
            f"edge-level baseline over {graph.num_edges} edges may enumerate "
            f"O(n^2) pairs; this can be slow", RuntimeWarning, stacklevel=2)
    weights: Dict[Tuple[int, int], float] = dict(sim.pairs)
    if gamma > 0:
        # two distinct edges of a simple graph share at most one node, so
        # each adjacent pair shows up in exactly one adjacency list
        for node_edges in graph.adjacency:
            for a in range(len(node_edges)):
                ea = node_edges[a]
                for b in range(a + 1, len(node_edges)):
                    key = _canonical_edge(ea, node_edges[b])
                    weights[key] = weights.get(key, 0.0) + gamma
    wg = WeightedCompleteGraph(element_count=graph.num_edges, weights=weights,
                               gamma=gamma)
    selected, _ = densest_weighted_subgraph(wg)
    return selected
