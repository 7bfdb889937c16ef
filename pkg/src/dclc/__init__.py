"""Delay-constrained least-cost multicast trees (DCADH) and a Waxman simulation harness."""

from .adh import AdhTree, adh_tree, merge_score, root_tree
from .dcadh import DcadhResult, dcadh, eliminate_loops, merge_delay_path
from .graph import (
    EdgeAttr,
    MulticastRequest,
    Network,
    RoutedTree,
    path_cost,
    path_delay,
    read_graph,
    tree_cost,
    validate_tree,
    write_graph,
)
from .oracle import exact_dclc, exact_steiner
from .shortest_paths import Metric, dijkstra, extract_path, least_delay_tree
from .topology import WaxmanConfig, edge_probability, generate

__version__ = "0.1.0"

__all__ = [
    "AdhTree", "DcadhResult", "EdgeAttr", "Metric", "MulticastRequest", "Network",
    "RoutedTree", "WaxmanConfig", "adh_tree", "dcadh", "dijkstra", "edge_probability",
    "eliminate_loops", "exact_dclc", "exact_steiner", "extract_path", "generate",
    "least_delay_tree", "merge_delay_path", "merge_score", "path_cost", "path_delay",
    "read_graph", "root_tree", "tree_cost", "validate_tree", "write_graph",
]
