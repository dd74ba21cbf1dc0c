"""Mobility network construction (transition probabilities) and structure checks."""

import logging
from typing import Any, Dict, List, Set

import networkx as nx
import numpy as np

from ..errors import InputError
from ..models.network import NORMALIZATIONS, SOURCE, MobilityNetwork, OccRegion, TransitionCounts


logger = logging.getLogger(__name__)


def support_graph(matrix: np.ndarray) -> nx.Graph:
    """Undirected graph on node positions with an edge wherever either direction is positive."""
    graph = nx.Graph()
    graph.add_nodes_from(range(matrix.shape[0]))
    rows, cols = np.nonzero(matrix > 0)
    graph.add_edges_from((int(i), int(j)) for i, j in zip(rows, cols) if i != j)
    return graph


def components(matrix: np.ndarray) -> List[Set[int]]:
    """Connected components of the undirected support, largest first, ties by smallest member."""
    found = [set(component) for component in nx.connected_components(support_graph(matrix))]
    return sorted(found, key=lambda component: (-len(component), min(component)))


def is_connected(network_or_matrix) -> bool:
    matrix = getattr(network_or_matrix, "matrix", network_or_matrix)
    if matrix.shape[0] == 0:
        return False
    return nx.is_connected(support_graph(matrix))


def build_network(counts: TransitionCounts, normalization: str = SOURCE) -> MobilityNetwork:
    """Normalize transition counts into probabilities.

    ``source`` divides each count by its source's outgoing total so rows sum to 1;
    ``destination`` divides by the destination's incoming total so columns sum to 1.
    """
    if normalization not in NORMALIZATIONS:
        raise InputError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    if not counts.node_index:
        raise InputError("Cannot build a network from empty counts")

    nodes = list(counts.node_index)
    matrix = counts.to_matrix(nodes).astype(np.float64)
    axis = 1 if normalization == SOURCE else 0
    marginal = matrix.sum(axis=axis)
    positive = marginal > 0

    weights = np.zeros_like(matrix)
    if normalization == SOURCE:
        weights[positive, :] = matrix[positive, :] / marginal[positive, None]
    else:
        weights[:, positive] = matrix[:, positive] / marginal[None, positive]

    zero_marginal = [node for node, ok in zip(nodes, positive) if not ok]
    if zero_marginal:
        logger.warning(
            f"{len(zero_marginal)} nodes have no {'outgoing' if axis == 1 else 'incoming'} "
            f"transitions, e.g. {', '.join(node.key for node in zero_marginal[:5])}"
        )

    network = MobilityNetwork(nodes=nodes, matrix=weights, normalization=normalization,
                              zero_marginal=zero_marginal)
    logger.info(f"Built {normalization}-normalized network: {len(nodes)} nodes, {network.edge_count()} edges")
    return network


def complete_network(nodes: List[OccRegion]) -> MobilityNetwork:
    """Frictionless network: every ordered pair, self-loops included, weighs 1/N."""
    if not nodes:
        raise InputError("A complete network needs at least one node")
    n = len(nodes)
    matrix = np.full((n, n), 1.0 / n)
    return MobilityNetwork(nodes=list(nodes), matrix=matrix, normalization=SOURCE, complete=True)


def network_stats(network: MobilityNetwork) -> Dict[str, Any]:
    """Structural statistics of a network."""
    matrix = network.matrix
    n = len(network)
    total = matrix.sum()
    return {
        "nodes": n,
        "edges": network.edge_count(),
        "regions": len(set(network.attribute("region"))),
        "occupations": len(set(network.attribute("occupation"))),
        "density": network.edge_count() / (n * n) if n else 0.0,
        "self_loop_share": float(np.trace(matrix) / total) if total > 0 else 0.0,
        "connected": is_connected(network),
        "zero_marginal_nodes": [node.key for node in network.zero_marginal],
        "normalization": network.normalization,
        "complete": network.complete,
    }
