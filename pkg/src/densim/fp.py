"""Iterative ratio maximization by repeated linearized solves.

Maximizes F1(X) / |X| over nonempty element subsets, where F1 is a sparse
pair-reward sum minus an optional node-cover penalty.  Each round solves one
linearized subproblem (a min cut) at the current ratio estimate; the
estimate sequence increases strictly and the round count is bounded by the
number of elements.  The flow network is built once and mutated between
rounds through its parametric arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from densim.core import EdgeSimilarity, Graph, Solution, make_solution
from densim.qsolver import (
    _build_network,
    _cover_arrays,
    element_caps,
    q_value_from_cut,
    selected_from_cut,
)


@dataclass(frozen=True)
class FpIteration:
    cost: float
    selected_size: int
    q_value: float


@dataclass
class FpTrace:
    """Per-round record of one ratio maximization run."""

    iterations: List[FpIteration]
    converged: bool

    @property
    def num_cut_solves(self) -> int:
        return len(self.iterations)


def default_tolerance(total_pair_weight: float) -> float:
    """Scale-aware zero test for the linearized optimum."""
    return 1e-9 * max(1.0, total_pair_weight)


def _fractional_maximize(element_count: int,
                         pair_weights: Optional[Dict[Tuple[int, int], float]],
                         cover: Optional[Sequence[Tuple[int, ...]]],
                         node_penalty: float,
                         tol: Optional[float],
                         pair_arrays=None,
                         cover_arrays=None,
                         total_pair_weight: Optional[float] = None) -> Tuple[frozenset, float, FpTrace]:
    """Core loop; returns (selected, ratio, trace).

    ``pair_arrays`` / ``cover_arrays`` take precedence over the dict forms
    so callers with array-backed instances avoid per-call dict walks.
    """
    n = element_count
    if pair_arrays is None:
        pw_dict = pair_weights or {}
        pi = np.fromiter((k[0] for k in pw_dict), dtype=np.int64, count=len(pw_dict))
        pj = np.fromiter((k[1] for k in pw_dict), dtype=np.int64, count=len(pw_dict))
        pw = np.fromiter(pw_dict.values(), dtype=np.float64, count=len(pw_dict))
    else:
        pi, pj, pw = pair_arrays
    if cover_arrays is None and cover is not None:
        cover_arrays = _cover_arrays(cover)
    if cover_arrays is not None:
        cov_elem, cov_node = cover_arrays
    else:
        cov_elem = cov_node = np.zeros(0, dtype=np.int64)

    def f1(mask: np.ndarray) -> float:
        value = float(pw[mask[pi] & mask[pj]].sum()) if pw.size else 0.0
        if node_penalty > 0.0 and cov_node.size:
            covered = np.unique(cov_node[mask[cov_elem]]).size
            value -= node_penalty * covered
        return value

    if total_pair_weight is None:
        total_pair_weight = math.fsum(pw)
    if tol is None:
        tol = default_tolerance(total_pair_weight)

    mask = np.ones(n, dtype=bool)
    cost = f1(mask) / n
    net = _build_network(n, (pi, pj, pw), cover_arrays, node_penalty, cost)
    total_pairs = total_pair_weight
    half = net.half_totals_cache

    iterations: List[FpIteration] = []
    converged = False
    final = frozenset()
    previous = frozenset(range(n))  # the start iterate: all elements
    for _ in range(n + 1):
        result = net.min_cut()
        selected = selected_from_cut(net, result.source_side, n)
        q_val = q_value_from_cut(total_pairs, half, cost, result.cut_value)
        iterations.append(FpIteration(cost=cost, selected_size=len(selected), q_value=q_val))
        if q_val <= tol:
            # at the fixed point every optimum ties at zero; prefer the
            # maximal one from the cut, else keep the current iterate
            final = selected if selected else previous
            converged = True
            break
        mask[:] = False
        mask[list(selected)] = True
        next_cost = f1(mask) / len(selected)
        if next_cost <= cost:
            # numerical fixpoint: the ratio stopped improving
            final = selected
            converged = True
            break
        cost = next_cost
        net.update_parametric(element_caps(net, cost))
        previous = selected
        final = selected

    if not final:
        # a nonempty answer is required; fall back to the best single element
        best, best_val = 0, -math.inf
        for e in range(n):
            single = np.zeros(n, dtype=bool)
            single[e] = True
            val = f1(single)
            if val > best_val:
                best, best_val = e, val
        final = frozenset({best})

    mask[:] = False
    mask[list(final)] = True
    ratio = f1(mask) / len(final)
    return final, ratio, FpTrace(iterations=iterations, converged=converged)


def solve_fractional(element_count: int,
                     pair_weights: Dict[Tuple[int, int], float],
                     cover: Optional[Sequence[Tuple[int, ...]]] = None,
                     node_penalty: float = 0.0,
                     tol: Optional[float] = None) -> Tuple[frozenset, float, FpTrace]:
    """Maximize (pair rewards inside X - penalty * covered nodes) / |X|.

    Generic entry point: selectable elements are abstract; the graph-aware
    wrapper is :func:`solve_dss_inv`.
    """
    if node_penalty < 0:
        raise ValueError("node penalty must be nonnegative")
    return _fractional_maximize(element_count, pair_weights, cover, node_penalty, tol)


def solve_dss_inv(graph: Graph, sim: EdgeSimilarity, lambda_: float,
                  tol: Optional[float] = None) -> Tuple[Solution, FpTrace]:
    """Best edge set for the inverse-density objective S(X) - lambda / D(X).

    Runs the ratio iteration with rewards = pairwise similarities and a
    per-covered-node penalty of lambda.  The returned solution is the
    maximal optimal edge set; its objective equals the final ratio estimate
    within the tolerance.
    """
    if lambda_ < 0:
        raise ValueError("lambda must be nonnegative")
    if sim.edge_count != graph.num_edges:
        raise ValueError("similarity indexed over a different edge set")
    if tol is None:
        tol = default_tolerance(sim.total_pair_sum)
    ends_u, ends_v = graph.endpoint_arrays()
    m = graph.num_edges
    cov_elem = np.repeat(np.arange(m, dtype=np.int64), 2)
    cov_node = np.column_stack([ends_u, ends_v]).ravel()
    members, _, trace = _fractional_maximize(
        m, None, None, float(lambda_), tol,
        pair_arrays=sim.pair_arrays(), cover_arrays=(cov_elem, cov_node),
        total_pair_weight=sim.total_pair_sum)
    solution = make_solution(graph, sim, lambda_, members)
    return solution, trace
