"""Scenario pipeline: sector demand to per-node, per-timestep target demand."""

from .demand import (
    map_sector_to_occupation,
    normalize_demand,
    occupation_demand,
    reallocation_volume,
    remap_mix,
    yearly_reallocation,
    yearly_totals,
)
from .interpolation import build_scenarios, interpolate_demand

__all__ = [
    "map_sector_to_occupation",
    "normalize_demand",
    "occupation_demand",
    "reallocation_volume",
    "remap_mix",
    "yearly_reallocation",
    "yearly_totals",
    "build_scenarios",
    "interpolate_demand",
]
