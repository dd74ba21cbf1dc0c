"""Regional occupational mobility network construction and statistics."""

from .hierarchy import OccupationHierarchy
from .ingest import ingest_transitions, aggregate_occupations
from .merging import merge_occupations, apply_merge_map
from .builder import build_network, complete_network, is_connected, network_stats
from .assortativity import assortativity, weighted_assortativity

__all__ = [
    "OccupationHierarchy",
    "ingest_transitions",
    "aggregate_occupations",
    "merge_occupations",
    "apply_merge_map",
    "build_network",
    "complete_network",
    "is_connected",
    "network_stats",
    "assortativity",
    "weighted_assortativity",
]
