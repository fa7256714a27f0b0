import math
import random

import pytest

from densim.qsolver import (
    QInstance,
    build_flow_graph,
    element_caps,
    evaluate_q,
    q_value_from_cut,
    selected_from_cut,
    solve_q,
)
from oracles import brute_best_q, brute_min_cut


TWO_ELEMENT = dict(element_count=2, pair_weights={(0, 1): 0.8},
                   cover=((0, 1), (1, 2)), node_penalty=0.05)


def random_qinstance(rng, max_elements=8, with_cover=True):
    n = rng.randint(1, max_elements)
    pairs = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.5:
                pairs[(i, j)] = rng.uniform(0.05, 1.0)
    cover = None
    penalty = 0.0
    if with_cover:
        node_pool = rng.randint(2, 6)
        cover = tuple(tuple(sorted(rng.sample(range(node_pool),
                                              rng.randint(1, min(2, node_pool)))))
                      for _ in range(n))
        penalty = rng.uniform(0.0, 0.5)
    cost = rng.uniform(-0.2, 1.0)
    return QInstance(element_count=n, pair_weights=pairs, cover=cover,
                     node_penalty=penalty, linear_cost=cost)


class TestBuild:
    def test_hand_construction(self):
        q = QInstance(linear_cost=0.325, **TWO_ELEMENT)
        net = build_flow_graph(q)
        # s, t, 2 element nodes, 3 covered nodes
        assert net.node_count == 7
        arcs = [net.arc(a) for a in range(net.arc_count)]
        pair_caps = [c for t_, h, c in arcs if t_ >= 2 and h >= 2 and math.isfinite(c)]
        assert pair_caps == [0.4, 0.4]
        source_caps = sorted(c for t_, h, c in arcs if t_ == 0)
        assert source_caps == pytest.approx([0.075, 0.075])
        sink_caps = sorted(c for t_, h, c in arcs if h == 1)
        # three penalty arcs plus two zero deficit arcs
        assert sink_caps == pytest.approx([0.0, 0.0, 0.05, 0.05, 0.05])
        inf_arcs = [(t_, h) for t_, h, c in arcs if math.isinf(c)]
        assert len(inf_arcs) == 4  # each element covers 2 nodes
        # the parametric registration covers exactly the per-element arcs
        assert len(net.parametric_arcs) == 4

    def test_cover_free_two_layer(self):
        q = QInstance(element_count=3, pair_weights={(0, 1): 1.0, (1, 2): 0.5},
                      linear_cost=0.0)
        net = build_flow_graph(q)
        assert net.node_count == 5  # s, t, three element nodes; no node layer
        assert not any(math.isinf(net.arc(a)[2]) for a in range(net.arc_count))

    def test_dominated_by_cost(self):
        q = QInstance(element_count=2, pair_weights={(0, 1): 0.8},
                      linear_cost=10.0)
        net = build_flow_graph(q)
        src = [net.arc(a)[2] for a in range(net.arc_count) if net.arc(a)[0] == 0]
        assert src == [0.0, 0.0]
        selected, value = solve_q(q)
        assert selected == frozenset()
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_min_cut_value_of_example_network(self):
        # enumerate the 7-node network cuts independently
        q = QInstance(linear_cost=0.325, **TWO_ELEMENT)
        net = build_flow_graph(q)
        arcs = [net.arc(a) for a in range(net.arc_count)]
        want, _ = brute_min_cut(net.node_count, 0, 1, arcs)
        got = net.min_cut()
        assert got.cut_value == pytest.approx(want, abs=1e-12)
        assert got.cut_value == pytest.approx(0.15, abs=1e-12)


class TestSolve:
    def test_example_zero_value(self):
        q = QInstance(linear_cost=0.325, **TWO_ELEMENT)
        selected, value = solve_q(q)
        assert selected == frozenset({0, 1})
        assert value == pytest.approx(0.0, abs=1e-12)
        # oracle: enumerate the 4 subsets
        assert brute_best_q(2, q.pair_weights, q.cover, 0.05, 0.325) == pytest.approx(0.0)

    def test_example_positive_value(self):
        q = QInstance(linear_cost=0.1, **TWO_ELEMENT)
        selected, value = solve_q(q)
        assert selected == frozenset({0, 1})
        assert value == pytest.approx(0.45, abs=1e-12)

    def test_oracle_equivalence_random(self):
        rng = random.Random(77)
        for trial in range(150):
            q = random_qinstance(rng, with_cover=(trial % 2 == 0))
            selected, value = solve_q(q)
            best = brute_best_q(q.element_count, q.pair_weights, q.cover,
                                q.node_penalty, q.linear_cost)
            assert value == pytest.approx(best, abs=1e-9), f"trial {trial}"
            direct = evaluate_q(q, selected)
            assert direct == pytest.approx(value, abs=1e-9), f"trial {trial}"
            assert value >= -1e-12

    def test_cut_identity(self):
        rng = random.Random(88)
        for _ in range(60):
            q = random_qinstance(rng)
            net = build_flow_graph(q)
            res = net.min_cut()
            value = q_value_from_cut(q.pair_sum(), net.half_totals_cache,
                                     q.linear_cost, res.cut_value)
            shift = math.fsum(max(q.linear_cost - h, 0.0)
                              for h in net.half_totals_cache)
            ideal_cut = res.cut_value - shift
            lhs = value + ideal_cut
            rhs = q.pair_sum() - q.linear_cost * q.element_count
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_selected_cover_is_exact_node_cover(self):
        # the cut never pays for a node outside the selected cover, and pays
        # each covered node exactly once: re-evaluating Q directly must agree
        rng = random.Random(99)
        for _ in range(80):
            q = random_qinstance(rng, with_cover=True)
            selected, value = solve_q(q)
            assert evaluate_q(q, selected) == pytest.approx(value, abs=1e-9)

    def test_maximal_tie_selection(self):
        # with all-zero costs and weights every subset ties at zero;
        # the maximal optimum is everything
        q = QInstance(element_count=3, pair_weights={}, linear_cost=0.0)
        selected, value = solve_q(q)
        assert selected == frozenset({0, 1, 2})
        assert value == 0.0


class TestParametricReuse:
    def test_caps_move_monotonically_with_cost(self):
        rng = random.Random(111)
        for _ in range(30):
            q = random_qinstance(rng)
            net = build_flow_graph(q)
            net.min_cut()
            cost = q.linear_cost
            for _ in range(4):
                cost += rng.uniform(0.01, 0.5)
                net.update_parametric(element_caps(net, cost))
                warm = net.min_cut()
                q2 = QInstance(element_count=q.element_count,
                               pair_weights=q.pair_weights, cover=q.cover,
                               node_penalty=q.node_penalty, linear_cost=cost)
                fresh_sel, fresh_val = solve_q(q2)
                warm_sel = selected_from_cut(net, warm.source_side, q.element_count)
                warm_val = q_value_from_cut(q.pair_sum(), net.half_totals_cache,
                                            cost, warm.cut_value)
                assert warm_val == pytest.approx(fresh_val, abs=1e-9)
                assert warm_sel == fresh_sel


class TestValidation:
    def test_penalty_without_cover(self):
        with pytest.raises(ValueError, match="cover"):
            QInstance(element_count=2, pair_weights={}, node_penalty=0.5)

    def test_non_canonical_pair(self):
        with pytest.raises(ValueError):
            QInstance(element_count=2, pair_weights={(1, 0): 0.5})

    def test_negative_weight(self):
        with pytest.raises(ValueError):
            QInstance(element_count=2, pair_weights={(0, 1): -0.5})
