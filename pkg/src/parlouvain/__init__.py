"""Parallel Louvain community detection on CSR graphs."""
from . import _runtime  # noqa: F401  (configures numba before first import)
from .graph import CsrGraph, EdgeList, HoleyCsr, build_csr, compact_holey, load_edge_list, vertex_weights
from .quality import DegenerateGraphError, community_aggregates, count_communities, delta_modularity, modularity
from .louvain_mc import LouvainParams, LouvainResult, louvain

__version__ = "0.1.0"
