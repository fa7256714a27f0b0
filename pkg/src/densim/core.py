"""Domain types and objectives for dense similar-edge subgraph mining.

The central objects are an immutable undirected :class:`Graph`, a sparse
symmetric :class:`EdgeSimilarity` over its edge pairs, and the two scalar
objectives that trade subgraph density against pairwise edge similarity.
Densities are kept as exact integer pairs; similarity values are floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np


class NoNonzeroSimilarityError(ValueError):
    """Raised when an instance has no nonzero pairwise similarities."""


def _canonical_edge(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Density:
    """Edge-set density |X| / |V(X)| as an exact integer pair.

    Equality and ordering use integer cross-multiplication, never floats,
    so densities of different solutions can be compared exactly.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.numerator < 1:
            raise ValueError("density undefined for empty edge set")
        if self.denominator < 2:
            raise ValueError("a nonempty edge set touches at least 2 nodes")

    def value(self) -> float:
        return self.numerator / self.denominator

    def inverse_negated(self) -> float:
        """The negated inverse density -|V(X)| / |X|."""
        return -self.denominator / self.numerator

    def __eq__(self, other) -> bool:
        if not isinstance(other, Density):
            return NotImplemented
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __lt__(self, other: "Density") -> bool:
        return self.numerator * other.denominator < other.numerator * self.denominator

    def __le__(self, other: "Density") -> bool:
        return self.numerator * other.denominator <= other.numerator * self.denominator

    def __gt__(self, other: "Density") -> bool:
        return other < self

    def __ge__(self, other: "Density") -> bool:
        return other <= self

    def __hash__(self):
        g = math.gcd(self.numerator, self.denominator)
        return hash((self.numerator // g, self.denominator // g))

    def __repr__(self):
        return f"Density({self.numerator}/{self.denominator})"


class Graph:
    """Immutable undirected simple graph with dense node and edge indices.

    Edges are canonicalized as (min(u, v), max(u, v)); self-loops and
    duplicate edges are rejected.  At least 2 edges are required.
    """

    __slots__ = ("node_count", "edges", "adjacency", "_ends_u", "_ends_v")

    def __init__(self, node_count: int, edges: Iterable[Tuple[int, int]]):
        canon = []
        seen = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) not allowed")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u},{v}) outside node range 0..{node_count - 1}")
            e = _canonical_edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            canon.append(e)
        if len(canon) < 2:
            raise ValueError("graph must have at least 2 edges")
        adjacency = [[] for _ in range(node_count)]
        for idx, (u, v) in enumerate(canon):
            adjacency[u].append(idx)
            adjacency[v].append(idx)
        self.node_count = node_count
        self.edges = tuple(canon)
        self.adjacency = tuple(tuple(a) for a in adjacency)
        ends = np.asarray(canon, dtype=np.int64)
        self._ends_u = ends[:, 0].copy()
        self._ends_v = ends[:, 1].copy()

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def endpoint_arrays(self):
        """(u, v) endpoint arrays indexed by edge id, for vectorized work."""
        return self._ends_u, self._ends_v

    def node_cover(self, members: Iterable[int]) -> frozenset:
        ids = np.fromiter((int(e) for e in members), dtype=np.int64)
        if ids.size == 0:
            return frozenset()
        nodes = np.unique(np.concatenate([self._ends_u[ids], self._ends_v[ids]]))
        return frozenset(nodes.tolist())

    def edge_set(self, members: Iterable[int]) -> "EdgeSet":
        ids = np.fromiter((int(e) for e in members), dtype=np.int64)
        if ids.size:
            if ids.min() < 0 or ids.max() >= self.num_edges:
                bad = ids[(ids < 0) | (ids >= self.num_edges)][0]
                raise ValueError(f"edge id {bad} out of range")
            ids = np.unique(ids)
            nodes = np.unique(np.concatenate([self._ends_u[ids], self._ends_v[ids]]))
            return EdgeSet(frozenset(ids.tolist()), frozenset(nodes.tolist()))
        return EdgeSet(frozenset(), frozenset())

    def __repr__(self):
        return f"Graph(nodes={self.node_count}, edges={self.num_edges})"


@dataclass(frozen=True)
class EdgeSet:
    """An edge subset together with its induced node cover."""

    members: frozenset
    node_cover: frozenset

    def __len__(self):
        return len(self.members)


class EdgeSimilarity:
    """Sparse symmetric nonnegative similarity over unordered edge pairs.

    Zero-valued pairs are never stored.  Per-edge totals over the full edge
    set are cached; ``s_min_nonzero`` / ``s_max`` are None when no pair is
    stored.
    """

    __slots__ = ("edge_count", "pairs", "totals", "s_min_nonzero", "s_max",
                 "_ei", "_ej", "_w", "total_pair_sum")

    def __init__(self, edge_count: int, pairs: Iterable[Tuple[int, int, float]]):
        store = {}
        for i, j, value in pairs:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"similarity of an edge with itself ({i}) is not stored")
            if not (0 <= i < edge_count and 0 <= j < edge_count):
                raise ValueError(f"edge pair ({i},{j}) out of range")
            value = float(value)
            if value < 0.0:
                raise ValueError(f"negative similarity {value} for pair ({i},{j})")
            if value == 0.0:
                continue  # zero pairs are implicit, never materialized
            key = _canonical_edge(i, j)
            if key in store:
                raise ValueError(f"duplicate similarity pair {key}")
            store[key] = value

        self.edge_count = edge_count
        self.pairs = store
        totals = np.zeros(edge_count, dtype=np.float64)
        if store:
            ei = np.fromiter((k[0] for k in store), dtype=np.int64, count=len(store))
            ej = np.fromiter((k[1] for k in store), dtype=np.int64, count=len(store))
            w = np.fromiter(store.values(), dtype=np.float64, count=len(store))
            np.add.at(totals, ei, w)
            np.add.at(totals, ej, w)
            self._ei, self._ej, self._w = ei, ej, w
            self.s_min_nonzero = float(w.min())
            self.s_max = float(w.max())
            self.total_pair_sum = math.fsum(store.values())
        else:
            self._ei = np.zeros(0, dtype=np.int64)
            self._ej = np.zeros(0, dtype=np.int64)
            self._w = np.zeros(0, dtype=np.float64)
            self.s_min_nonzero = None
            self.s_max = None
            self.total_pair_sum = 0.0
        self.totals = totals

    @property
    def pair_count(self) -> int:
        return len(self.pairs)

    def value(self, e: int, d: int) -> float:
        return self.pairs.get(_canonical_edge(e, d), 0.0)

    def total(self, e: int) -> float:
        """Cached total similarity of edge ``e`` against the full edge set."""
        return float(self.totals[e])

    def pair_arrays(self):
        """(ei, ej, w) numpy views over the stored pairs."""
        return self._ei, self._ej, self._w

    def iter_pairs(self) -> Iterator[Tuple[int, int, float]]:
        for (i, j), w in self.pairs.items():
            yield i, j, w

    def __repr__(self):
        return f"EdgeSimilarity(edges={self.edge_count}, pairs={self.pair_count})"


@dataclass(frozen=True)
class Solution:
    """An optimal edge set for one trade-off weight, with its metrics."""

    lambda_: float
    edge_set: EdgeSet
    similarity: float
    density: Density
    objective_inv: float

    @property
    def num_edges(self) -> int:
        return len(self.edge_set.members)

    @property
    def num_nodes(self) -> int:
        return len(self.edge_set.node_cover)


def density(graph: Graph, x: EdgeSet) -> Density:
    """Density |X| / |V(X)| of the subgraph induced by the edge set ``x``."""
    if len(x.members) == 0:
        raise ValueError("density undefined for empty edge set")
    return Density(len(x.members), len(x.node_cover))


def subgraph_similarity(sim: EdgeSimilarity, x: EdgeSet) -> float:
    """Average pairwise similarity inside ``x``: pair-sum divided by |X|.

    Equivalently half the average per-edge total restricted to ``x``.
    Returns exactly 0.0 when |X| <= 1.
    """
    members = x.members
    k = len(members)
    if k <= 1:
        return 0.0
    for e in members:
        if not (0 <= e < sim.edge_count):
            raise ValueError(f"edge id {e} out of range")
    # Restricted totals: sum over e in X of s_total(e, X), then halve.
    # Iterate whichever is smaller: member pairs or the stored pair list.
    if k * (k - 1) // 2 <= sim.pair_count:
        ordered = sorted(members)
        terms = []
        get = sim.pairs.get
        for a in range(k):
            for b in range(a + 1, k):
                w = get((ordered[a], ordered[b]))
                if w is not None:
                    terms.append(w)
                    terms.append(w)  # counted once from each endpoint's total
        return math.fsum(terms) / (2 * k)
    mask = np.zeros(sim.edge_count, dtype=bool)
    mask[list(members)] = True
    ei, ej, w = sim.pair_arrays()
    chosen = w[mask[ei] & mask[ej]]
    # exactly-rounded summation where cheap; pairwise summation above that
    total = math.fsum(chosen) if chosen.size <= 20000 else float(chosen.sum())
    return total / k


def objective_dss(s_val: float, d: Density, mu: float) -> float:
    """Weighted-sum objective: similarity plus mu times density."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    return s_val + mu * d.value()


def objective_dss_inv(s_val: float, d: Density, lambda_: float) -> float:
    """Inverse-density objective: similarity minus lambda / density."""
    if lambda_ < 0:
        raise ValueError("lambda must be nonnegative")
    return s_val - lambda_ * (d.denominator / d.numerator)


def map_mu_to_lambda(x_star: Solution, mu: float) -> float:
    """Weight mapping: lambda = D(X*)^2 * mu for the solution's density."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    d = x_star.density.value()
    return d * d * mu


def map_lambda_to_mu(x_star: Solution, lambda_: float) -> float:
    """Inverse weight mapping: mu = lambda / D(X*)^2."""
    if lambda_ < 0:
        raise ValueError("lambda must be nonnegative")
    d = x_star.density.value()
    return lambda_ / (d * d)


def make_solution(graph: Graph, sim: EdgeSimilarity, lambda_: float,
                  members: Iterable[int]) -> Solution:
    """Assemble a :class:`Solution` with consistent derived metrics."""
    x = graph.edge_set(members)
    if len(x.members) == 0:
        raise ValueError("a solution edge set must be nonempty")
    d = density(graph, x)
    s = subgraph_similarity(sim, x)
    return Solution(lambda_=float(lambda_), edge_set=x, similarity=s,
                    density=d, objective_inv=objective_dss_inv(s, d, lambda_))
