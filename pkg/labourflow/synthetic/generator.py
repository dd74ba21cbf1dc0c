"""Reproducible synthetic inputs in the external CSV formats."""

import logging
import math
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from ..errors import InputError
from ..models.network import OccRegion, TransitionCounts
from ..models.scenario import BASELINE, SectorDemandPath
from ..network.hierarchy import OccupationHierarchy
from ..storage.artifact_store import ArtifactStore
from ..storage.csv_io import NATIONAL


logger = logging.getLogger(__name__)

# independent generator streams per artifact, so each is a pure function of the seed
TRANSITION_STREAM = 1
DEMAND_STREAM = 2
MIX_STREAM = 3
WAGE_STREAM = 4


@dataclass
class SyntheticSpec:
    """Size, mixing and shock parameters of a synthetic instance.

    Transition weights between (i, a) and (j, b) are ``base_weight`` plus
    ``within_region`` when a == b, ``within_occupation`` when i and j share a
    1-digit group and ``self_weight`` when the pair is the same node.
    """
    n_occupations: int = 20
    n_regions: int = 5
    depth: int = 2
    base_weight: float = 1.0
    within_region: float = 4.0
    within_occupation: float = 2.0
    self_weight: float = 20.0
    transitions_per_node: float = 200.0
    n_sectors: int = 4
    sector_size: float = 2000.0
    mix_spill: float = 0.05
    mix_years: Tuple[int, ...] = (2018, 2019)
    start_year: int = 2018
    end_year: int = 2030
    baseline_growth: float = 0.01
    shocks: Dict[str, Dict[str, float]] = field(
        default_factory=lambda: {"shock": {"S1": 0.04, "S2": -0.04}}
    )
    seed: int = 0

    def __post_init__(self):
        self.mix_years = tuple(int(year) for year in self.mix_years)
        self.validate()

    def validate(self):
        for name in ("n_occupations", "n_regions", "depth", "n_sectors"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("base_weight", "within_region", "within_occupation", "self_weight", "mix_spill"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        if self.base_weight + self.within_region + self.within_occupation + self.self_weight <= 0:
            raise InputError("Synthetic spec has zero total attachment weight")
        if self.transitions_per_node <= 0 or self.sector_size <= 0:
            raise InputError("transitions_per_node and sector_size must be positive")
        if self.branching > 9:
            raise InputError(
                f"{self.n_occupations} occupations at depth {self.depth} need {self.branching} "
                f"digits per level; increase depth"
            )
        if self.end_year <= self.start_year:
            raise InputError("end_year must be after start_year")
        if BASELINE in self.shocks:
            raise InputError(f"{BASELINE!r} cannot be a shock scenario")
        for scenario, rates in self.shocks.items():
            for sector in rates:
                if sector not in self.sectors:
                    raise InputError(f"Shock {scenario!r} names unknown sector {sector!r}")

    @property
    def branching(self) -> int:
        return max(1, math.ceil(self.n_occupations ** (1.0 / self.depth) - 1e-9))

    @property
    def regions(self) -> List[str]:
        return [f"R{r + 1}" for r in range(self.n_regions)]

    @property
    def sectors(self) -> List[str]:
        return [f"S{s + 1}" for s in range(self.n_sectors)]

    @property
    def years(self) -> List[int]:
        return list(range(self.start_year, self.end_year + 1))

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["mix_years"] = list(self.mix_years)
        return values

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SyntheticSpec':
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"Unknown synthetic parameters: {', '.join(sorted(unknown))}")
        return cls(**data)


def _rng(spec: SyntheticSpec, stream: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, stream])


def hierarchy_rows(spec: SyntheticSpec) -> List[Tuple[str, str, str]]:
    """Uniform k-ary tree; leaves are spread over the 1-digit groups."""
    k = spec.branching
    digits = [str(d + 1) for d in range(k)]
    leaves = sorted(("".join(code) for code in product(digits, repeat=spec.depth)),
                    key=lambda code: (code[1:], code[0]))[:spec.n_occupations]
    codes = set()
    for leaf in leaves:
        codes.update(leaf[:length] for length in range(1, len(leaf) + 1))
    return [(code, code[:-1], f"Occupation {code}") for code in sorted(codes, key=lambda c: (len(c), c))]


def leaf_occupations(spec: SyntheticSpec) -> List[str]:
    hierarchy = OccupationHierarchy.from_rows(hierarchy_rows(spec))
    return sorted(code for code in hierarchy.leaves() if len(code) == spec.depth)


def synthetic_nodes(spec: SyntheticSpec) -> List[OccRegion]:
    return sorted(OccRegion(occ, region) for occ in leaf_occupations(spec) for region in spec.regions)


def attachment_weights(spec: SyntheticSpec, nodes: List[OccRegion]) -> np.ndarray:
    regions = np.array([node.region_id for node in nodes], dtype=object)
    groups = np.array([node.broad_group for node in nodes], dtype=object)
    weights = np.full((len(nodes), len(nodes)), spec.base_weight)
    weights += spec.within_region * (regions[:, None] == regions[None, :])
    weights += spec.within_occupation * (groups[:, None] == groups[None, :])
    weights += spec.self_weight * np.eye(len(nodes))
    return weights


def gen_transitions(spec: SyntheticSpec) -> TransitionCounts:
    """Poisson transition counts with a guaranteed cycle through every node."""
    nodes = synthetic_nodes(spec)
    weights = attachment_weights(spec, nodes)
    rows = weights.sum(axis=1, keepdims=True)
    if (rows <= 0).any():
        raise InputError("Synthetic spec leaves a node without transition weight")
    means = spec.transitions_per_node * weights / rows
    counts = _rng(spec, TRANSITION_STREAM).poisson(means)

    # one transition along the node cycle keeps the support connected
    n_nodes = len(nodes)
    if n_nodes > 1:
        cycle = np.arange(n_nodes)
        counts[cycle, (cycle + 1) % n_nodes] = np.maximum(counts[cycle, (cycle + 1) % n_nodes], 1)

    sources, dests = np.nonzero(counts)
    edges = {(nodes[i], nodes[j]): int(counts[i, j]) for i, j in zip(sources, dests)}
    logger.info(f"Generated {int(counts.sum())} transitions over {n_nodes} nodes")
    return TransitionCounts(counts=edges, node_index=nodes)


def transition_frame(counts: TransitionCounts) -> pd.DataFrame:
    rows = [(s.occupation_id, s.region_id, d.occupation_id, d.region_id, count)
            for (s, d), count in sorted(counts.counts.items())]
    return pd.DataFrame(rows, columns=["source_occ", "source_region", "dest_occ", "dest_region", "count"])


def home_sector(spec: SyntheticSpec, occupation: str) -> str:
    """Sector employing most of an occupation, by its 1-digit group."""
    return spec.sectors[(int(occupation[0]) - 1) % spec.n_sectors]


def gen_sector_demand(spec: SyntheticSpec) -> Dict[str, SectorDemandPath]:
    """Baseline grows every sector alike; shocks add per-sector annual growth."""
    rng = _rng(spec, DEMAND_STREAM)
    levels = spec.sector_size * rng.uniform(0.5, 1.5, size=(spec.n_sectors, spec.n_regions))
    scenarios = {BASELINE: {}}
    scenarios.update(spec.shocks)
    paths = {}
    for scenario_id, rates in scenarios.items():
        path = SectorDemandPath(scenario_id=scenario_id)
        for s, sector in enumerate(spec.sectors):
            growth = (1.0 + spec.baseline_growth) * (1.0 + rates.get(sector, 0.0))
            for r, region in enumerate(spec.regions):
                for year in spec.years:
                    path.values[(sector, region, year)] = float(levels[s, r] * growth ** (year - spec.start_year))
        paths[scenario_id] = path
    return paths


def sector_demand_frame(paths: Dict[str, SectorDemandPath]) -> pd.DataFrame:
    rows = [(scenario_id, sector, region, year, value)
            for scenario_id in sorted(paths)
            for (sector, region, year), value in sorted(paths[scenario_id].values.items())]
    return pd.DataFrame(rows, columns=["scenario", "sector", "region", "year", "demand"])


def gen_mix(spec: SyntheticSpec) -> pd.DataFrame:
    """National occupation shares per sector, one breakdown per mix year."""
    rng = _rng(spec, MIX_STREAM)
    occupations = leaf_occupations(spec)
    rows = []
    for year in spec.mix_years:
        for sector in spec.sectors:
            affinity = np.array([1.0 if home_sector(spec, occ) == sector else spec.mix_spill
                                 for occ in occupations])
            weights = affinity * rng.gamma(2.0, 0.5, size=len(occupations))
            shares = weights / weights.sum()
            rows.extend((sector, NATIONAL, occ, float(share), year)
                        for occ, share in zip(occupations, shares))
    return pd.DataFrame(rows, columns=["sector", "region", "occupation", "share", "year"])


def gen_wages(spec: SyntheticSpec) -> pd.DataFrame:
    rng = _rng(spec, WAGE_STREAM)
    occupations = leaf_occupations(spec)
    wages = np.round(np.exp(rng.normal(7.5, 0.5, size=len(occupations))), 2)
    return pd.DataFrame({"occupation": occupations, "region": NATIONAL, "mean_wage": wages})


def write_synthetic(spec: SyntheticSpec, store: ArtifactStore) -> Dict[str, str]:
    """Write every input CSV of the pipeline; returns input name -> path."""
    hierarchy = pd.DataFrame(hierarchy_rows(spec), columns=["code", "parent_code", "label"])
    regions = pd.DataFrame({"region_id": spec.regions,
                            "label": [f"Region {r + 1}" for r in range(spec.n_regions)]})
    paths = {
        "transitions": store.write_frame("transitions.csv", transition_frame(gen_transitions(spec))),
        "hierarchy": store.write_frame("hierarchy.csv", hierarchy),
        "regions": store.write_frame("regions.csv", regions),
        "wages": store.write_frame("wages.csv", gen_wages(spec)),
        "sector_demand": store.write_frame("sector_demand.csv", sector_demand_frame(gen_sector_demand(spec))),
        "mix": store.write_frame("mix.csv", gen_mix(spec)),
    }
    logger.info(f"Wrote synthetic inputs to {store.root}")
    return paths
