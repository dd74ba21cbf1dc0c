"""Weighted categorical assortativity."""

from typing import Callable, Optional, Sequence, Union

import numpy as np

from ..errors import InputError
from ..models.network import MobilityNetwork, OccRegion


def mixing_matrix(weights: np.ndarray, categories: Sequence[str]) -> np.ndarray:
    """Fraction ``e[a, b]`` of total edge weight running from category a to category b."""
    weights = np.asarray(weights, dtype=np.float64)
    labels, codes = np.unique(np.asarray(categories, dtype=object), return_inverse=True)
    indicator = np.zeros((len(codes), len(labels)))
    indicator[np.arange(len(codes)), codes] = 1.0
    total = weights.sum()
    if total <= 0:
        raise InputError("Assortativity needs at least one positive edge")
    return indicator.T @ weights @ indicator / total


def weighted_assortativity(weights: np.ndarray, categories: Sequence[str]) -> Optional[float]:
    """r = sum_i (e_ii - a_i b_i) / (1 - sum_i a_i b_i).

    Returns None when the denominator vanishes (a single category carries all weight).
    """
    if len(categories) != np.asarray(weights).shape[0]:
        raise InputError("Every node needs a category")
    e = mixing_matrix(weights, categories)
    a = e.sum(axis=1)
    b = e.sum(axis=0)
    expected = float(a @ b)
    denominator = 1.0 - expected
    if abs(denominator) < 1e-15:
        return None
    return float((np.trace(e) - expected) / denominator)


def assortativity(network: MobilityNetwork,
                  attribute: Union[str, Callable[[OccRegion], str]]) -> Optional[float]:
    """Assortativity of ``network`` by a named node attribute or a node -> category callable."""
    if isinstance(attribute, str):
        categories = network.attribute(attribute)
    else:
        categories = [attribute(node) for node in network.nodes]
    return weighted_assortativity(network.matrix, categories)
