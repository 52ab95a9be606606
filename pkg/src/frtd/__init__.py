"""First-return-time distributions of random walks as node embeddings.

The package computes exact truncated FRTDs, checks them against a
spectral closed form, compares nodes and graphs by total variation,
extracts structural roles, aligns graphs and samples graph ensembles
that stay close to a target in FRTD space.
"""

__version__ = "0.1.0"

from .alignment import AlignmentResult, align, benchmark, corrupt_graph, solve_fugal_frt, solve_lap
from .distance import graph_distance, node_distances, pairwise_distances, similarity_kernel, tv_distance
from .embedding import (
    FrtdMatrix,
    TeleportationConfig,
    compute_frtd,
    compute_frtd_directed,
    embed,
    first_return_times,
)
from .graph import Graph, GraphFormatError, from_edges, from_networkx, load_edge_list, parse_edge_list
from .randomization import EnsembleResult, GibbsConfig, run_ensemble
from .roles import RoleAssignment, cluster_report, spectral_cluster
from .spectral import (
    SpectralDecomposition,
    decompose,
    frtd_from_spectrum,
    graphs_cospectral,
    nodes_frtd_equivalent,
)

__all__ = [
    "AlignmentResult", "EnsembleResult", "FrtdMatrix", "GibbsConfig", "Graph", "GraphFormatError",
    "RoleAssignment", "SpectralDecomposition", "TeleportationConfig", "align", "benchmark",
    "cluster_report", "compute_frtd", "compute_frtd_directed", "corrupt_graph", "decompose", "embed",
    "first_return_times", "frtd_from_spectrum", "from_edges", "from_networkx", "graph_distance",
    "graphs_cospectral", "load_edge_list", "node_distances", "nodes_frtd_equivalent",
    "pairwise_distances", "parse_edge_list", "run_ensemble", "similarity_kernel", "solve_fugal_frt",
    "solve_lap", "spectral_cluster", "tv_distance",
]
