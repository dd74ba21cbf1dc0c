"""Scenario data models."""

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ..errors import InputError
from .network import OccRegion


BASELINE = "baseline"

# scenario -> (node, year) -> demand
DemandTable = Dict[str, Dict[Tuple[OccRegion, int], float]]


@dataclass
class SectorDemandPath:
    """Sector-level labour demand for one scenario."""
    scenario_id: str
    values: Dict[Tuple[str, str, int], float] = field(default_factory=dict)

    @property
    def years(self) -> List[int]:
        return sorted({year for _, _, year in self.values})

    @property
    def sector_regions(self) -> List[Tuple[str, str]]:
        return sorted({(sector, region) for sector, region, _ in self.values})


@dataclass
class OccupationIndustryMix:
    """Distribution of each (sector, region)'s employment over occupations."""
    shares: Dict[Tuple[str, str], Dict[str, float]] = field(default_factory=dict)

    def validate(self, tolerance: float = 1e-9) -> None:
        for (sector, region), distribution in self.shares.items():
            if any(share < 0 for share in distribution.values()):
                raise InputError(f"Negative occupation share for sector {sector!r} in region {region!r}")
            total = sum(distribution.values())
            if abs(total - 1.0) > tolerance:
                raise InputError(
                    f"Occupation shares for sector {sector!r} in region {region!r} sum to {total}, not 1"
                )

    @property
    def occupations(self) -> List[str]:
        return sorted({occ for distribution in self.shares.values() for occ in distribution})


@dataclass
class DemandScenario:
    """Per-node yearly adjusted demand and its per-timestep interpolation.

    ``D_star`` has shape (years, nodes); ``d_target`` has shape (timesteps, nodes)
    with year ``k`` anchored at timestep ``k * steps_per_year``.
    """
    scenario_id: str
    nodes: List[OccRegion]
    years: List[int]
    D_star: np.ndarray
    steps_per_year: int
    d_target: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.d_target.shape[0]

    def anchor_step(self, year: int) -> int:
        return self.years.index(year) * self.steps_per_year

    def year_demand(self, year: int) -> np.ndarray:
        return self.D_star[self.years.index(year)]
