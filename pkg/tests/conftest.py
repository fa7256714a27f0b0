import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from densim.core import EdgeSimilarity, Graph
from densim.ingest import build_similarity, parse_multiplex

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# The CS-Aarhus multiplex social network (employees of a CS department,
# layers: lunch, facebook, coauthor, leisure, work).  Not redistributable
# with this repository; download it from the CoMuNe Lab multiplex dataset
# collection and place the edge list here (or point DENSIM_CS_AARHUS at it).
# Expected shape: 61 nodes, 353 flattened edges, 5 layers, 620 layer-edges,
# format "layer u v [weight]" per line.
CS_AARHUS_PATHS = [
    os.environ.get("DENSIM_CS_AARHUS", ""),
    os.path.join(DATA_DIR, "cs-aarhus.edges"),
    os.path.join(DATA_DIR, "CS-Aarhus.edges"),
    os.path.join(DATA_DIR, "aarhus.edges"),
]


def cs_aarhus_path():
    for path in CS_AARHUS_PATHS:
        if path and os.path.exists(path):
            return path
    return None


@pytest.fixture(scope="session")
def cs_aarhus():
    """Parsed CS-Aarhus dataset, or a skip if the fixture file is absent."""
    path = cs_aarhus_path()
    if path is None:
        pytest.skip(
            "CS-Aarhus fixture not present: place the multiplex edge list at "
            "tests/data/cs-aarhus.edges (format 'layer u v') or set "
            "DENSIM_CS_AARHUS; see tests/data/README.md")
    with open(path, "r", encoding="utf-8") as fh:
        ml = parse_multiplex(fh)
    graph, sim = build_similarity(ml)
    return ml, graph, sim


@pytest.fixture
def path_toy():
    """Two edges sharing a node, similarity 0.8."""
    graph = Graph(3, [(0, 1), (1, 2)])
    sim = EdgeSimilarity(2, [(0, 1, 0.8)])
    return graph, sim


@pytest.fixture
def k4_star_toy():
    """A K4 with uniform weak similarity plus a disjoint star with strong
    similarity: exactly two distinct optima across the whole weight range."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
             (4, 5), (4, 6), (4, 7)]
    graph = Graph(8, edges)
    pairs = [(i, j, 0.1) for i in range(6) for j in range(i + 1, 6)]
    pairs += [(6, 7, 1.0), (6, 8, 1.0), (7, 8, 1.0)]
    sim = EdgeSimilarity(9, pairs)
    return graph, sim


@pytest.fixture
def triangle_pendant_toy():
    """Triangle with all pairwise similarity 1 plus a similarity-free pendant."""
    graph = Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    sim = EdgeSimilarity(4, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    return graph, sim


def random_instance(rng, max_edges=10, p_pair=0.6):
    """Small random connected-ish instance for exhaustive comparisons."""
    m = rng.randint(2, max_edges)
    n = rng.randint(3, m + 2)
    all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    rng.shuffle(all_pairs)
    edges = sorted(all_pairs[:m])
    m = len(edges)
    if m < 2:
        edges = all_pairs[:2]
        m = 2
    pairs = []
    for i in range(m):
        for j in range(i + 1, m):
            if rng.random() < p_pair:
                pairs.append((i, j, rng.uniform(0.05, 1.0)))
    graph = Graph(n, edges)
    sim = EdgeSimilarity(m, pairs)
    return graph, sim


def random_jaccard_instance(rng, max_edges=10, max_layers=4, max_nodes=7):
    """Small random multiplex with genuine Jaccard similarities.

    The weight-range bounds assume similarity gaps bounded away from zero,
    which label-set Jaccard values provide; use this generator for tests
    that rely on the bounds covering the extreme solutions.
    """
    while True:
        n_layers = rng.randint(1, max_layers)
        n_nodes = rng.randint(4, max_nodes)
        lines = []
        for layer in range(n_layers):
            for u in range(n_nodes):
                for v in range(u + 1, n_nodes):
                    if rng.random() < 0.35:
                        lines.append(f"L{layer} n{u} n{v}")
        if not lines:
            continue
        try:
            ml = parse_multiplex("\n".join(lines))
        except Exception:
            continue
        if not (2 <= len(ml.edges) <= max_edges):
            continue
        graph, sim = build_similarity(ml)
        if sim.pair_count == 0:
            continue
        return ml, graph, sim
