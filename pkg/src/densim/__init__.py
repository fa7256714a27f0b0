"""densim: mine subgraphs that are both dense and made of similar edges."""

from densim.core import (
    Density,
    EdgeSet,
    EdgeSimilarity,
    Graph,
    NoNonzeroSimilarityError,
    Solution,
    density,
    make_solution,
    map_lambda_to_mu,
    map_mu_to_lambda,
    objective_dss,
    objective_dss_inv,
    subgraph_similarity,
)
from densim.explorer import (
    LambdaBounds,
    SolutionCatalog,
    explore,
    lambda_bounds,
    signature_equal,
    solve_dss,
)
from densim.fp import FpTrace, solve_dss_inv
from densim.ingest import (
    DatasetStats,
    MultilayerGraph,
    ParseError,
    build_similarity,
    generate_random,
    jaccard,
    parse_multiplex,
    stats,
)

__version__ = "0.1.0"

__all__ = [
    "Density",
    "EdgeSet",
    "EdgeSimilarity",
    "Graph",
    "NoNonzeroSimilarityError",
    "Solution",
    "density",
    "make_solution",
    "map_lambda_to_mu",
    "map_mu_to_lambda",
    "objective_dss",
    "objective_dss_inv",
    "subgraph_similarity",
    "LambdaBounds",
    "SolutionCatalog",
    "explore",
    "lambda_bounds",
    "signature_equal",
    "solve_dss",
    "FpTrace",
    "solve_dss_inv",
    "DatasetStats",
    "MultilayerGraph",
    "ParseError",
    "build_similarity",
    "generate_random",
    "jaccard",
    "parse_multiplex",
    "stats",
]
