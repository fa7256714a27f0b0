"""Command-line interface: stats, explore, solve, baseline sweeps, gen.

Exit codes: 0 success, 2 I/O or unparseable input, 3 degenerate input
(e.g. no nonzero similarities), 4 usage errors.  All numeric output uses a
'.' decimal separator and 12 significant digits.  The DENSIM_LOG environment
variable sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from typing import Dict, List, Optional

from densim import baselines, explorer, fp, ingest
from densim.core import (
    Graph,
    EdgeSimilarity,
    NoNonzeroSimilarityError,
    Solution,
    density,
    subgraph_similarity,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_DEGENERATE = 3
EXIT_USAGE = 4

log = logging.getLogger("densim")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 4 instead of argparse's default 2
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round12(obj):
    """Round floats to 12 significant digits recursively for JSON output."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _setup_logging():
    level = os.environ.get("DENSIM_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_instance(path: str, sim_path: Optional[str]):
    """Parse an edge-list file, with similarities from Jaccard or a sidecar."""
    with open(path, "r", encoding="utf-8") as fh:
        ml = ingest.parse_multiplex(fh)
    if sim_path is not None:
        graph = ml.to_graph()
        with open(sim_path, "r", encoding="utf-8") as fh:
            sim = ingest.read_similarity(fh, graph.num_edges)
    else:
        graph, sim = ingest.build_similarity(ml)
    return ml, graph, sim


def _solution_doc_full(sol: Solution, graph: Graph, node_names: List[str]) -> Dict:
    # edges listed in ascending edge-id order, endpoints as original names
    return {
        "lambda": sol.lambda_,
        "similarity": sol.similarity,
        "density_num": sol.density.numerator,
        "density_den": sol.density.denominator,
        "objective": sol.objective_inv,
        "num_edges": sol.num_edges,
        "num_nodes": sol.num_nodes,
        "edges": [[node_names[graph.edges[e][0]], node_names[graph.edges[e][1]]]
                  for e in sorted(sol.edge_set.members)],
    }


def _catalog_document(input_path: str, graph: Graph, sim: EdgeSimilarity,
                      catalog: explorer.SolutionCatalog, node_names: List[str],
                      elapsed: float) -> Dict:
    return {
        "dataset": {
            "file": input_path,
            "nodes": graph.node_count,
            "edges": graph.num_edges,
            "similarity_pairs": sim.pair_count,
            "s_min": sim.s_min_nonzero,
            "s_max": sim.s_max,
        },
        "bounds": {
            "lambda_min": catalog.bounds.lambda_min,
            "lambda_max": catalog.bounds.lambda_max,
            "delta_lambda": catalog.bounds.delta_lambda,
        },
        "solutions": [_solution_doc_full(sol, graph, node_names)
                      for sol in catalog.solutions],
        "counters": {
            "lambda_evaluations": catalog.tested_lambdas,
            "mincut_solves": catalog.mincut_solves,
            "mean_mincut_per_lambda": catalog.mean_cut_solves_per_lambda,
            "intervals_examined": len(catalog.intervals),
            "elapsed_seconds": elapsed,
            "truncated": catalog.truncated,
        },
    }


def _write_catalog_csv(catalog: explorer.SolutionCatalog, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["lambda", "S", "D_num", "D_den", "edges", "nodes"])
    for sol in catalog.solutions:
        writer.writerow([_fmt(sol.lambda_), _fmt(sol.similarity),
                         sol.density.numerator, sol.density.denominator,
                         sol.num_edges, sol.num_nodes])


def _parse_gamma_grid(text: str) -> List[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise _UsageError(f"--gamma-grid expects start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise _UsageError(f"--gamma-grid values must be numeric: {text!r}")
    if start < 0 or stop < start:
        raise _UsageError("--gamma-grid requires 0 <= start <= stop")
    if start == stop:
        return [start]
    if step <= 0:
        raise _UsageError("--gamma-grid step must be positive when start < stop")
    values = []
    k = 0
    while True:
        g = start + k * step
        if g > stop + 1e-12 * max(1.0, abs(stop)):
            break
        values.append(g)
        k += 1
    return values


# -- subcommands -----------------------------------------------------------

def cmd_stats(args) -> int:
    ml, graph, sim = _load_instance(args.input, args.sim)
    st = ingest.stats(ml, graph, sim)
    rows = [
        ("nodes", str(st.num_nodes)),
        ("edges", str(st.num_edges)),
        ("layers", str(st.num_layers)),
        ("avg_edges_per_layer", _fmt(st.avg_edges_per_layer)),
        ("multiplex_edges", str(st.num_mult_edges)),
        ("similarity_pairs", str(st.num_meta_pairs)),
        ("density", _fmt(st.density)),
        ("avg_layer_density", _fmt(st.avg_layer_density)),
        ("similarity", _fmt(st.similarity)),
        ("avg_edge_participation", _fmt(st.avg_edge_participation)),
    ]
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")
    doc = {name: getattr(st, field) for name, field in [
        ("num_nodes", "num_nodes"), ("num_edges", "num_edges"),
        ("num_layers", "num_layers"), ("avg_edges_per_layer", "avg_edges_per_layer"),
        ("num_mult_edges", "num_mult_edges"), ("num_meta_pairs", "num_meta_pairs"),
        ("density", "density"), ("avg_layer_density", "avg_layer_density"),
        ("similarity", "similarity"), ("avg_edge_participation", "avg_edge_participation")]}
    print(json.dumps(_round12(doc)))
    return EXIT_OK


def cmd_explore(args) -> int:
    ml, graph, sim = _load_instance(args.input, args.sim)
    t0 = time.perf_counter()
    catalog = explorer.explore(graph, sim, budget=args.budget, tol=args.tol,
                               jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    if args.out == "csv":
        _write_catalog_csv(catalog, sys.stdout)
        if catalog.truncated:
            print("# truncated: budget exhausted before full exploration")
    else:
        doc = _catalog_document(args.input, graph, sim, catalog, ml.node_names, elapsed)
        print(json.dumps(_round12(doc), indent=2))
    log.info("explore: %d solutions, %d lambda evaluations, %.3fs",
             len(catalog.solutions), catalog.tested_lambdas, elapsed)
    return EXIT_OK


def cmd_solve(args) -> int:
    ml, graph, sim = _load_instance(args.input, args.sim)
    if args.lambda_ is not None:
        if args.lambda_ < 0:
            raise _UsageError("--lambda must be nonnegative")
        explorer.lambda_bounds(graph, sim)  # reject degenerate instances
        sol, trace = fp.solve_dss_inv(graph, sim, args.lambda_, tol=args.tol)
        doc = _solution_doc_full(sol, graph, ml.node_names)
        doc["mincut_solves"] = trace.num_cut_solves
    else:
        if args.mu < 0:
            raise _UsageError("--mu must be nonnegative")
        catalog = explorer.explore(graph, sim, tol=args.tol, jobs=args.jobs)
        sol = explorer.solve_dss(catalog, args.mu)
        doc = _solution_doc_full(sol, graph, ml.node_names)
        doc["mu"] = args.mu
        doc["objective_dss"] = sol.similarity + args.mu * sol.density.value()
    print(json.dumps(_round12(doc), indent=2))
    return EXIT_OK


def cmd_baseline(args) -> int:
    ml, graph, sim = _load_instance(args.input, args.sim)
    grid = _parse_gamma_grid(args.gamma_grid)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["gamma", "S", "D_num", "D_den", "edges", "nodes"])
    for gamma in grid:
        if args.mode == "den":
            members = baselines.bl_den(ml, gamma, graph=graph)
        else:
            members = baselines.bl_sim(ml, gamma, graph=graph, sim=sim)
        if not members:
            log.warning("gamma=%s selected no edges; emitting zero row", gamma)
            writer.writerow([_fmt(gamma), "0", "0", "0", "0", "0"])
            continue
        x = graph.edge_set(members)
        d = density(graph, x)
        s = subgraph_similarity(sim, x)
        writer.writerow([_fmt(gamma), _fmt(s), d.numerator, d.denominator,
                         len(x.members), len(x.node_cover)])
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        graph, sim = ingest.generate_random(args.nodes, args.edges, args.psim, args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc))
    edge_path = args.out
    sim_path = args.out + ".sim"
    ingest.write_edge_list(edge_path, graph)
    ingest.write_similarity(sim_path, sim)
    doc = {
        "edge_file": edge_path,
        "similarity_file": sim_path,
        "nodes": args.nodes,
        "edges": graph.num_edges,
        "similarity_pairs": sim.pair_count,
        "seed": args.seed,
    }
    print(json.dumps(_round12(doc)))
    return EXIT_OK


# -- argument parsing -------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="densim",
                     description="Mine subgraphs that are dense and made of similar edges.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p, with_sim=True):
        p.add_argument("input", help="multiplex edge-list file (layer u v [weight])")
        if with_sim:
            p.add_argument("--sim", default=None,
                           help="similarity sidecar 'e_i e_j s'; skips Jaccard")

    p = sub.add_parser("stats", help="dataset summary columns")
    add_input(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("explore", help="enumerate the full trade-off catalog")
    add_input(p)
    p.add_argument("--tol", type=float, default=None, help="zero tolerance override")
    p.add_argument("--budget", type=int, default=None, help="max lambda evaluations")
    p.add_argument("--jobs", type=int, default=1, help="parallel midpoint solves")
    p.add_argument("--out", choices=("json", "csv"), default="json",
                   help="output format (stdout)")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("solve", help="solve for one weight")
    add_input(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lambda", dest="lambda_", type=float, default=None,
                       help="inverse-density weight")
    group.add_argument("--mu", type=float, default=None,
                       help="weighted-sum weight (runs a full exploration)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("baseline", help="asymmetric baseline sweeps")
    add_input(p)
    p.add_argument("--mode", choices=("den", "sim"), required=True)
    p.add_argument("--gamma-grid", default="0:10:0.1",
                   help="start:stop:step sweep (default 0:10:0.1)")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--psim", type=float, required=True,
                   help="probability an edge pair gets a nonzero similarity")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True,
                   help="edge-list path; sidecar written next to it as <out>.sim")
    p.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoNonzeroSimilarityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ingest.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
