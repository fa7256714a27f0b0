"""Multiplex edge-list parsing, Jaccard similarities, stats, generators.

Input format (one relation per line, '#' comments and blank lines ignored):

    layer u v [weight]

Directionality is dropped, duplicate (layer, u, v) lines collapse, and the
optional weight column is validated but ignored.  Node ids may be arbitrary
strings; dense ids are assigned in first-appearance order and the original
names are kept so results can be mapped back.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from densim.core import EdgeSimilarity, Graph, _canonical_edge, subgraph_similarity


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: Optional[int], message: str):
        self.line_no = line_no
        if line_no is None:
            super().__init__(message)
        else:
            super().__init__(f"line {line_no}: {message}")


@dataclass
class MultilayerGraph:
    """A flattened multiplex network with per-edge layer label sets."""

    layers: List[str]
    node_labels: Dict[str, int]
    node_names: List[str]
    edges: List[Tuple[int, int]]           # flattened, first-appearance order
    layer_edges: Dict[str, Set[Tuple[int, int]]]
    edge_labels: List[Set[str]]            # by flattened edge id

    @property
    def num_mult_edges(self) -> int:
        return sum(len(es) for es in self.layer_edges.values())

    def to_graph(self) -> Graph:
        return Graph(len(self.node_names), self.edges)


@dataclass
class DatasetStats:
    """The ten summary columns reported for a multiplex dataset."""

    num_nodes: int
    num_edges: int
    num_layers: int
    avg_edges_per_layer: float
    num_mult_edges: int
    num_meta_pairs: int
    density: float
    avg_layer_density: float
    similarity: float
    avg_edge_participation: float


def parse_multiplex(source) -> MultilayerGraph:
    """Parse a multiplex edge list from a string, file object, or lines."""
    if isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source

    layers: List[str] = []
    layer_set: Set[str] = set()
    node_labels: Dict[str, int] = {}
    node_names: List[str] = []
    edges: List[Tuple[int, int]] = []
    edge_index: Dict[Tuple[int, int], int] = {}
    layer_edges: Dict[str, Set[Tuple[int, int]]] = {}
    edge_labels: List[Set[str]] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(line_no, f"expected 'layer u v [weight]', got {len(parts)} fields")
        layer, a, b = parts[0], parts[1], parts[2]
        if len(parts) == 4:
            try:
                float(parts[3])  # weight column accepted and ignored
            except ValueError:
                raise ParseError(line_no, f"weight column is not numeric: {parts[3]!r}")
        if a == b:
            raise ParseError(line_no, f"self-loop on node {a!r}")
        if layer not in layer_set:
            layer_set.add(layer)
            layers.append(layer)
            layer_edges[layer] = set()
        for name in (a, b):
            if name not in node_labels:
                node_labels[name] = len(node_names)
                node_names.append(name)
        e = _canonical_edge(node_labels[a], node_labels[b])
        if e not in edge_index:
            edge_index[e] = len(edges)
            edges.append(e)
            edge_labels.append(set())
        if e not in layer_edges[layer]:
            layer_edges[layer].add(e)
            edge_labels[edge_index[e]].add(layer)

    if len(edges) < 2:
        raise ParseError(None, f"need at least 2 flattened edges, got {len(edges)}")

    return MultilayerGraph(layers=layers, node_labels=node_labels, node_names=node_names,
                           edges=edges, layer_edges=layer_edges, edge_labels=edge_labels)


def jaccard(labels_a: Set, labels_b: Set) -> float:
    """Jaccard coefficient |A n B| / |A u B| of two nonempty sets."""
    if not labels_a or not labels_b:
        raise ValueError("jaccard undefined for empty label sets")
    inter = len(labels_a & labels_b)
    if inter == 0:
        return 0.0
    return inter / len(labels_a | labels_b)


def build_similarity(ml: MultilayerGraph) -> Tuple[Graph, EdgeSimilarity]:
    """Flattened graph plus Jaccard similarities over co-appearing edge pairs.

    Only pairs of edges sharing at least one layer are enumerated (per-layer
    buckets), so the cost is sum of squared layer sizes, not all-pairs.
    """
    graph = ml.to_graph()
    edge_index = {e: i for i, e in enumerate(ml.edges)}
    labels = ml.edge_labels
    pairs: Dict[Tuple[int, int], float] = {}
    for layer in ml.layers:
        ids = sorted(edge_index[e] for e in ml.layer_edges[layer])
        for a in range(len(ids)):
            ia = ids[a]
            la = labels[ia]
            for b in range(a + 1, len(ids)):
                ib = ids[b]
                key = (ia, ib)
                if key in pairs:
                    continue  # co-appears in an earlier layer; value identical
                pairs[key] = jaccard(la, labels[ib])
    sim = EdgeSimilarity(len(ml.edges), ((i, j, w) for (i, j), w in pairs.items()))
    return graph, sim


def stats(ml: MultilayerGraph, g: Graph, sim: EdgeSimilarity) -> DatasetStats:
    """All ten summary columns for a parsed multiplex dataset."""
    num_layers = len(ml.layers)
    num_mult = ml.num_mult_edges
    covered = {u for u, v in g.edges} | {v for u, v in g.edges}
    layer_densities = []
    for layer in ml.layers:
        es = ml.layer_edges[layer]
        nodes = {u for u, v in es} | {v for u, v in es}
        layer_densities.append(len(es) / len(nodes) if nodes else 0.0)
    full = g.edge_set(range(g.num_edges))
    return DatasetStats(
        num_nodes=g.node_count,
        num_edges=g.num_edges,
        num_layers=num_layers,
        avg_edges_per_layer=num_mult / num_layers,
        num_mult_edges=num_mult,
        num_meta_pairs=sim.pair_count,
        density=g.num_edges / len(covered),
        avg_layer_density=sum(layer_densities) / num_layers,
        similarity=subgraph_similarity(sim, full),
        avg_edge_participation=sum(len(s) for s in ml.edge_labels) / g.num_edges,
    )


def _decode_pair(codes: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    # code k in [0, n(n-1)/2) -> unordered pair (u, v), u < v, row-major order
    codes = codes.astype(np.int64)
    u = (np.floor((2 * n - 1 - np.sqrt(float(2 * n - 1) ** 2 - 8.0 * codes)) / 2)).astype(np.int64)
    # fix possible off-by-one from float sqrt at row boundaries
    for _ in range(2):
        base = u * (2 * n - u - 1) // 2
        u = np.where(codes < base, u - 1, u)
        nxt = (u + 1) * (2 * n - u - 2) // 2
        u = np.where(codes >= nxt, u + 1, u)
    base = u * (2 * n - u - 1) // 2
    v = (codes - base) + u + 1
    return u, v.astype(np.int64)


def _sample_distinct(rng: np.random.Generator, total: int, count: int) -> np.ndarray:
    """Deterministically sample ``count`` distinct codes from range(total)."""
    if count > total:
        raise ValueError("cannot sample more codes than exist")
    if total <= 4 * count or total <= 10_000_000:
        return rng.choice(total, size=count, replace=False).astype(np.int64)
    # sparse case: draw with replacement and top up until distinct
    chosen = np.unique(rng.integers(0, total, size=int(count * 1.1) + 16))
    while chosen.size < count:
        extra = rng.integers(0, total, size=count)
        chosen = np.unique(np.concatenate([chosen, extra]))
    idx = rng.permutation(chosen.size)[:count]
    return chosen[np.sort(idx)]


def generate_random(n: int, m: int, p_sim: float, seed: int) -> Tuple[Graph, EdgeSimilarity]:
    """Random instance: m distinct edges on n nodes, sparse random similarities.

    Each unordered edge pair independently receives, with probability
    ``p_sim``, a similarity drawn uniformly from (0, 1].  Deterministic for a
    fixed seed.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    max_edges = n * (n - 1) // 2
    if m < 2 or m > max_edges:
        raise ValueError(f"edge count {m} infeasible for {n} nodes (2..{max_edges})")
    if not (0.0 <= p_sim <= 1.0):
        raise ValueError("p_sim must be a probability")

    rng = np.random.default_rng(seed)
    codes = np.sort(_sample_distinct(rng, max_edges, m))
    eu, ev = _decode_pair(codes, n)
    graph = Graph(n, list(zip(eu.tolist(), ev.tolist())))

    total_pairs = m * (m - 1) // 2
    pairs: List[Tuple[int, int, float]] = []
    if p_sim > 0.0 and total_pairs > 0:
        k = int(rng.binomial(total_pairs, p_sim))
        if k > 0:
            pair_codes = np.sort(_sample_distinct(rng, total_pairs, k))
            pi, pj = _decode_pair(pair_codes, m)
            values = 1.0 - rng.random(k)  # uniform on (0, 1]
            pairs = list(zip(pi.tolist(), pj.tolist(), values.tolist()))
    sim = EdgeSimilarity(m, pairs)
    return graph, sim


# ---------------------------------------------------------------------------
# Instance files: edge list plus "e_i e_j s" similarity sidecar.

def write_edge_list(path, graph: Graph, layer: str = "0") -> None:
    """Write the graph as a single-layer edge list, edge ids = line order."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in graph.edges:
            fh.write(f"{layer} {u} {v}\n")


def write_similarity(path, sim: EdgeSimilarity) -> None:
    """Write stored pairs as 'e_i e_j s' lines, 12 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for (i, j), w in sorted(sim.pairs.items()):
            fh.write(f"{i} {j} {w:.12g}\n")


def read_similarity(source, edge_count: int) -> EdgeSimilarity:
    """Parse an 'e_i e_j s' sidecar against a graph with ``edge_count`` edges."""
    if isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source
    pairs = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(line_no, f"expected 'e_i e_j s', got {len(parts)} fields")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError(line_no, f"cannot parse similarity entry {line!r}")
        if not (0 <= i < edge_count and 0 <= j < edge_count):
            raise ParseError(line_no, f"edge id out of range in {line!r}")
        pairs.append((i, j, w))
    return EdgeSimilarity(edge_count, pairs)
