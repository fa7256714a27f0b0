"""Trade-off frontier enumeration across the similarity/density weight.

Optimal solutions change monotonically with the weight lambda: similarity
never increases, density never decreases.  Two weights whose solutions share
the same (similarity, density) signature bracket an interval that cannot
contain anything new, so a breadth-first bisection over weight intervals
enumerates every distinct signature while pruning redundant ranges.  Bounds
on the useful weight range and on the resolution of distinct weights come
from the extreme nonzero pairwise similarities.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

from densim.core import (
    EdgeSimilarity,
    Graph,
    NoNonzeroSimilarityError,
    Solution,
)
from densim.fp import solve_dss_inv

S_EQUAL_RTOL = 1e-9


@dataclass(frozen=True)
class LambdaBounds:
    """Weight range and granularity that cover all distinct solutions."""

    lambda_min: float
    lambda_max: float
    delta_lambda: float


@dataclass
class SolutionCatalog:
    """Distinct optimal solutions ordered by the weight that found them."""

    solutions: List[Solution]
    bounds: LambdaBounds
    tested_lambdas: int
    intervals: List[Tuple[float, float]]
    truncated: bool
    mincut_solves: int

    @property
    def mean_cut_solves_per_lambda(self) -> float:
        if self.tested_lambdas == 0:
            return 0.0
        return self.mincut_solves / self.tested_lambdas


def lambda_bounds(graph: Graph, sim: EdgeSimilarity) -> LambdaBounds:
    """Weight bounds from the extreme nonzero pairwise similarities.

    lower = s_min / (2|E|), upper = s_max * |E|^2 / 2, and the resolution of
    weights yielding distinct signatures equals the lower bound.
    """
    if sim.s_min_nonzero is None:
        raise NoNonzeroSimilarityError("no nonzero similarities")
    m = graph.num_edges
    lo = sim.s_min_nonzero / (2 * m)
    hi = sim.s_max * m * m / 2.0
    return LambdaBounds(lambda_min=lo, lambda_max=hi, delta_lambda=lo)


def signature_equal(a: Solution, b: Solution) -> bool:
    """Same (similarity, density) signature: densities compared exactly as
    integer pairs, similarities within a relative tolerance."""
    if a.density != b.density:
        return False
    return abs(a.similarity - b.similarity) <= S_EQUAL_RTOL * max(1.0, abs(a.similarity))


class _BudgetExhausted(Exception):
    pass


def explore(graph: Graph, sim: EdgeSimilarity,
            budget: Optional[int] = None,
            tol: Optional[float] = None,
            jobs: int = 1) -> SolutionCatalog:
    """Enumerate all distinct (similarity, density) optima across weights.

    Breadth-first interval bisection: solve at both range bounds, then
    repeatedly split intervals whose endpoint signatures differ, keeping a
    FIFO order so early termination still covers a spread of weights.
    Intervals narrower than the weight resolution are never split further
    (their midpoint is still evaluated once).  ``budget`` caps the number of
    weight evaluations; a truncated catalog is flagged as such.  ``jobs``
    parallelizes midpoint solves within one queue generation; catalog
    contents do not depend on it.
    """
    bounds = lambda_bounds(graph, sim)
    if budget is not None and budget < 1:
        raise ValueError("budget must be at least 1 when given")
    if jobs < 1:
        raise ValueError("jobs must be at least 1")

    tested = 0
    solves = 0
    intervals: List[Tuple[float, float]] = []
    found: List[Solution] = []
    truncated = False

    def solve_at(lam: float) -> Tuple[Solution, int]:
        sol, trace = solve_dss_inv(graph, sim, lam, tol=tol)
        return sol, trace.num_cut_solves

    def run(lam: float) -> Solution:
        # sequential path; counters updated here, never from worker threads
        nonlocal tested, solves
        sol, ncuts = solve_at(lam)
        tested += 1
        solves += ncuts
        return sol

    def add(sol: Solution) -> None:
        for idx, existing in enumerate(found):
            if signature_equal(existing, sol):
                if sol.lambda_ < existing.lambda_:
                    found[idx] = sol  # keep the smallest discovering weight
                return
        found.append(sol)

    def budget_left() -> int:
        if budget is None:
            return 1 << 62
        return budget - tested

    try:
        if budget_left() <= 0:
            raise _BudgetExhausted
        sol_lo = run(bounds.lambda_min)
        add(sol_lo)
        if budget_left() <= 0:
            raise _BudgetExhausted
        sol_hi = run(bounds.lambda_max)

        queue = deque()
        if not signature_equal(sol_lo, sol_hi):
            add(sol_hi)
            queue.append((bounds.lambda_min, bounds.lambda_max, sol_lo, sol_hi))

        pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
        try:
            while queue:
                batch = list(queue)
                queue.clear()
                if len(batch) > budget_left():
                    batch = batch[: budget_left()]
                    truncated = True
                if not batch:
                    break
                mids = [(lo + hi) / 2.0 for lo, hi, _, _ in batch]
                if pool is not None:
                    outcomes = list(pool.map(solve_at, mids))
                    mid_solutions = []
                    for sol, ncuts in outcomes:
                        tested += 1
                        solves += ncuts
                        mid_solutions.append(sol)
                else:
                    mid_solutions = [run(m) for m in mids]
                for (lo, hi, s_lo, s_hi), s_mid in zip(batch, mid_solutions):
                    intervals.append((lo, hi))
                    differs_lo = not signature_equal(s_mid, s_lo)
                    differs_hi = not signature_equal(s_mid, s_hi)
                    mid = (lo + hi) / 2.0
                    if hi - lo >= bounds.delta_lambda:
                        if differs_lo:
                            queue.append((lo, mid, s_lo, s_mid))
                        if differs_hi:
                            queue.append((mid, hi, s_mid, s_hi))
                    if differs_lo and differs_hi:
                        add(s_mid)
        finally:
            if pool is not None:
                pool.shutdown(wait=True)
    except _BudgetExhausted:
        truncated = True

    found.sort(key=lambda s: s.lambda_)
    _check_monotone(found)
    return SolutionCatalog(solutions=found, bounds=bounds, tested_lambdas=tested,
                           intervals=intervals, truncated=truncated,
                           mincut_solves=solves)


def _check_monotone(ordered: List[Solution]) -> None:
    """Similarity must not increase nor density decrease along the weight."""
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.density < prev.density:
            raise RuntimeError(
                f"density decreased along lambda: {prev.density} -> {cur.density}")
        slack = S_EQUAL_RTOL * max(1.0, abs(prev.similarity))
        if cur.similarity > prev.similarity + slack:
            raise RuntimeError(
                f"similarity increased along lambda: "
                f"{prev.similarity} -> {cur.similarity}")


def solve_dss(catalog: SolutionCatalog, mu: float) -> Solution:
    """Best catalog solution for the weighted-sum objective S + mu * D.

    Requires a complete catalog; ties on the objective break toward the
    denser solution.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if catalog.truncated:
        raise ValueError("catalog is budget-truncated; rerun exploration without a budget")
    if not catalog.solutions:
        raise ValueError("catalog is empty")
    values = [sol.similarity + mu * sol.density.value() for sol in catalog.solutions]
    best = max(values)
    tol = 1e-9 * max(1.0, abs(best))
    candidates = [sol for sol, v in zip(catalog.solutions, values) if v >= best - tol]
    choice = candidates[0]
    for sol in candidates[1:]:
        if sol.density > choice.density:
            choice = sol
    return choice
