import itertools
import math
import random

import pytest

from densim.core import NoNonzeroSimilarityError
from densim.explorer import lambda_bounds
from densim.ingest import (
    ParseError,
    build_similarity,
    generate_random,
    jaccard,
    parse_multiplex,
    read_similarity,
    stats,
    write_edge_list,
    write_similarity,
)


class TestParse:
    def test_basic(self):
        ml = parse_multiplex("1 a b\n1 b c\n2 a b\n")
        assert len(ml.node_names) == 3
        assert len(ml.edges) == 2
        assert ml.layers == ["1", "2"]
        ab = ml.edges.index((ml.node_labels["a"], ml.node_labels["b"]))
        bc = ml.edges.index(tuple(sorted((ml.node_labels["b"], ml.node_labels["c"]))))
        assert ml.edge_labels[ab] == {"1", "2"}
        assert ml.edge_labels[bc] == {"1"}

    def test_first_appearance_ids(self):
        ml = parse_multiplex("1 x y\n1 y z\n")
        assert ml.node_labels == {"x": 0, "y": 1, "z": 2}

    def test_self_loop_rejected_with_line_number(self):
        with pytest.raises(ParseError, match="line 2.*self-loop"):
            parse_multiplex("1 a b\n1 a a\n")

    def test_malformed_line(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_multiplex("1 a\n")

    def test_bad_weight_column(self):
        with pytest.raises(ParseError, match="weight"):
            parse_multiplex("1 a b xyz\n")

    def test_weight_column_ignored(self):
        ml = parse_multiplex("1 a b 3.5\n1 b c 1\n")
        assert len(ml.edges) == 2

    def test_comments_and_blanks(self):
        ml = parse_multiplex("# header\n\n1 a b\n  \n1 b c\n")
        assert len(ml.edges) == 2

    def test_direction_and_duplicates_collapse(self):
        ml = parse_multiplex("1 a b\n1 b a\n1 a b\n2 b a\n1 b c\n")
        assert len(ml.edges) == 2
        assert ml.num_mult_edges == 3  # (1,ab), (2,ab), (1,bc)

    def test_too_few_edges(self):
        with pytest.raises(ParseError, match="at least 2"):
            parse_multiplex("1 a b\n2 a b\n")

    def test_flattened_graph_valid(self):
        ml = parse_multiplex("1 a b\n2 b c\n3 c a\n")
        g = ml.to_graph()
        assert g.num_edges == 3
        assert g.node_count == 3


class TestJaccard:
    def test_example(self):
        assert jaccard({"a", "b", "c", "d"}, {"a", "b", "c", "e"}) == pytest.approx(0.6)

    def test_identical(self):
        assert jaccard({"x", "y"}, {"x", "y"}) == 1.0

    def test_disjoint(self):
        assert jaccard({"x"}, {"y"}) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            jaccard(set(), {"x"})


class TestBuildSimilarity:
    def test_shared_layer_pair(self):
        ml = parse_multiplex("1 a b\n1 c d\n2 a b\n")
        _, sim = build_similarity(ml)
        # edge (a,b) has labels {1,2}; edge (c,d) has {1}: one pair, 0.5
        assert sim.pair_count == 1
        assert list(sim.pairs.values())[0] == pytest.approx(0.5)

    def test_disjoint_layers_no_pairs(self):
        ml = parse_multiplex("1 a b\n2 c d\n")
        _, sim = build_similarity(ml)
        assert sim.pair_count == 0

    def test_pair_count_matches_brute_force(self):
        rng = random.Random(23)
        for _ in range(20):
            n_layers = rng.randint(1, 4)
            n_nodes = rng.randint(4, 8)
            lines = []
            for layer in range(n_layers):
                for u in range(n_nodes):
                    for v in range(u + 1, n_nodes):
                        if rng.random() < 0.3:
                            lines.append(f"L{layer} n{u} n{v}")
            text = "\n".join(lines)
            try:
                ml = parse_multiplex(text)
            except ParseError:
                continue
            _, sim = build_similarity(ml)
            expected = sum(
                1 for a, b in itertools.combinations(range(len(ml.edges)), 2)
                if ml.edge_labels[a] & ml.edge_labels[b])
            assert sim.pair_count == expected
            # totals equal direct summation
            for e in range(sim.edge_count):
                direct = math.fsum(w for (i, j), w in sim.pairs.items() if e in (i, j))
                assert sim.total(e) == pytest.approx(direct, abs=1e-9)

    def test_values_are_jaccard(self):
        ml = parse_multiplex("1 a b\n1 b c\n2 a b\n2 c d\n3 c d\n")
        _, sim = build_similarity(ml)
        idx = {e: i for i, e in enumerate(ml.edges)}
        ab = idx[tuple(sorted((ml.node_labels["a"], ml.node_labels["b"])))]
        bc = idx[tuple(sorted((ml.node_labels["b"], ml.node_labels["c"])))]
        assert sim.value(ab, bc) == pytest.approx(0.5)  # {1,2} vs {1}


class TestStats:
    def test_single_layer_toy(self):
        ml = parse_multiplex("1 a b\n1 b c\n")
        g, sim = build_similarity(ml)
        st = stats(ml, g, sim)
        assert st.num_layers == 1
        assert st.num_mult_edges == st.num_edges == 2
        assert st.avg_edge_participation == 1.0
        assert st.avg_edges_per_layer == 2.0
        assert st.density == pytest.approx(2 / 3)
        assert st.similarity == pytest.approx(0.5)  # one pair, jaccard 1, /2

    def test_two_layers(self):
        ml = parse_multiplex("1 a b\n1 b c\n2 a b\n")
        g, sim = build_similarity(ml)
        st = stats(ml, g, sim)
        assert st.num_layers == 2
        assert st.num_mult_edges == 3
        assert st.avg_edge_participation == pytest.approx(1.5)
        assert st.num_meta_pairs == 1
        assert st.avg_layer_density == pytest.approx((2 / 3 + 1 / 2) / 2)


class TestGenerateRandom:
    def test_deterministic(self):
        g1, s1 = generate_random(20, 40, 0.3, seed=99)
        g2, s2 = generate_random(20, 40, 0.3, seed=99)
        assert g1.edges == g2.edges
        assert s1.pairs == s2.pairs

    def test_seed_changes_instance(self):
        g1, s1 = generate_random(20, 40, 0.3, seed=1)
        g2, s2 = generate_random(20, 40, 0.3, seed=2)
        assert g1.edges != g2.edges or s1.pairs != s2.pairs

    def test_complete_similarity(self):
        g, sim = generate_random(4, 6, 1.0, seed=5)
        assert g.num_edges == 6
        assert sim.pair_count == 15
        assert all(0.0 < w <= 1.0 for w in sim.pairs.values())

    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            generate_random(4, 7, 0.5, seed=0)
        with pytest.raises(ValueError):
            generate_random(4, 1, 0.5, seed=0)

    def test_zero_probability_reported_degenerate(self):
        g, sim = generate_random(10, 15, 0.0, seed=3)
        assert sim.pair_count == 0
        assert sim.s_min_nonzero is None
        with pytest.raises(NoNonzeroSimilarityError, match="no nonzero similarities"):
            lambda_bounds(g, sim)

    def test_edges_distinct_and_in_range(self):
        g, _ = generate_random(30, 200, 0.01, seed=7)
        assert len(set(g.edges)) == 200
        assert all(0 <= u < v < 30 for u, v in g.edges)


class TestInstanceFiles:
    def test_round_trip(self, tmp_path):
        graph, sim = generate_random(12, 20, 0.4, seed=42)
        epath = tmp_path / "inst.edges"
        spath = tmp_path / "inst.edges.sim"
        write_edge_list(epath, graph)
        write_similarity(spath, sim)
        with open(epath) as fh:
            ml = parse_multiplex(fh)
        g2 = ml.to_graph()
        with open(spath) as fh:
            sim2 = read_similarity(fh, g2.num_edges)
        # same edges under original labels, same similarity values by edge id
        label_edges = {frozenset((ml.node_names[u], ml.node_names[v])) for u, v in g2.edges}
        assert label_edges == {frozenset((str(u), str(v))) for u, v in graph.edges}
        assert set(sim2.pairs) == set(sim.pairs)
        for key, w in sim.pairs.items():
            assert sim2.pairs[key] == pytest.approx(w, rel=1e-11)

    def test_same_seed_byte_identical(self, tmp_path):
        for run in (1, 2):
            graph, sim = generate_random(10, 15, 0.5, seed=11)
            write_edge_list(tmp_path / f"e{run}", graph)
            write_similarity(tmp_path / f"s{run}", sim)
        assert (tmp_path / "e1").read_bytes() == (tmp_path / "e2").read_bytes()
        assert (tmp_path / "s1").read_bytes() == (tmp_path / "s2").read_bytes()

    def test_sidecar_bad_ids(self):
        with pytest.raises(ParseError, match="out of range"):
            read_similarity("0 99 0.5\n", 3)
