"""Mobility network data models."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np


SOURCE = "source"
DESTINATION = "destination"
NORMALIZATIONS = (SOURCE, DESTINATION)


@dataclass(frozen=True, order=True)
class OccRegion:
    """An occupation-region pair, the node of the mobility network."""
    occupation_id: str
    region_id: str

    @property
    def broad_group(self) -> str:
        """1-digit occupational group."""
        return self.occupation_id[0]

    @property
    def key(self) -> str:
        return f"{self.occupation_id}:{self.region_id}"

    @classmethod
    def from_key(cls, key: str) -> 'OccRegion':
        occupation_id, _, region_id = key.partition(":")
        return cls(occupation_id, region_id)


Edge = Tuple[OccRegion, OccRegion]


@dataclass
class TransitionCounts:
    """Aggregated worker transitions between occupation-region pairs."""
    counts: Dict[Edge, int]
    node_index: List[OccRegion]

    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def occupations(self) -> List[str]:
        return sorted({node.occupation_id for node in self.node_index})

    @property
    def regions(self) -> List[str]:
        return sorted({node.region_id for node in self.node_index})

    def to_matrix(self, nodes: Optional[List[OccRegion]] = None) -> np.ndarray:
        """Dense count matrix T with rows as sources."""
        nodes = nodes if nodes is not None else self.node_index
        position = {node: i for i, node in enumerate(nodes)}
        matrix = np.zeros((len(nodes), len(nodes)), dtype=np.int64)
        for (source, dest), count in self.counts.items():
            matrix[position[source], position[dest]] += count
        return matrix

    def node_volume(self) -> Dict[OccRegion, int]:
        """In plus out transition volume per node; self-loops count twice."""
        volume = {node: 0 for node in self.node_index}
        for (source, dest), count in self.counts.items():
            volume[source] += count
            volume[dest] += count
        return volume


@dataclass
class MobilityNetwork:
    """Transition probabilities A over occupation-region nodes.

    ``matrix[i, j]`` is the weight of the edge from ``nodes[i]`` to ``nodes[j]``.
    The matrix is read-only once built.
    """
    nodes: List[OccRegion]
    matrix: np.ndarray
    normalization: str = SOURCE
    zero_marginal: List[OccRegion] = field(default_factory=list)
    complete: bool = False

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        self.matrix.setflags(write=False)
        self._position = {node: i for i, node in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def index(self, node: OccRegion) -> int:
        return self._position[node]

    @property
    def weights(self) -> Dict[Edge, float]:
        """Positive edge weights keyed by (source, destination)."""
        rows, cols = np.nonzero(self.matrix)
        return {
            (self.nodes[i], self.nodes[j]): float(self.matrix[i, j])
            for i, j in zip(rows, cols)
        }

    def edge_count(self) -> int:
        return int(np.count_nonzero(self.matrix))

    def attribute(self, name: str) -> List[str]:
        """Per-node categorical attribute: ``region`` or ``broad_group``/``occupation``."""
        if name == "region":
            return [node.region_id for node in self.nodes]
        if name in ("broad_group", "group"):
            return [node.broad_group for node in self.nodes]
        if name == "occupation":
            return [node.occupation_id for node in self.nodes]
        raise ValueError(f"Unknown node attribute: {name}")
