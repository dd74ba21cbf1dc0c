"""Sector to occupation demand conversion, baseline normalization and reallocation."""

import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, Mapping, Tuple

import numpy as np

from ..errors import InputError
from ..models.network import OccRegion
from ..models.scenario import BASELINE, DemandScenario, DemandTable, OccupationIndustryMix, SectorDemandPath


logger = logging.getLogger(__name__)


def validate_paths(paths: Mapping[str, SectorDemandPath]) -> None:
    """Baseline must exist and cover every (sector, region, year) of every shock."""
    if BASELINE not in paths:
        raise InputError(f"Scenario set has no {BASELINE!r} scenario")
    baseline = paths[BASELINE].values
    for scenario_id, path in paths.items():
        uncovered = sorted(key for key in path.values if key not in baseline)
        if uncovered:
            raise InputError(
                f"Scenario {scenario_id!r} covers entries missing from the baseline, e.g. {uncovered[0]}"
            )


def map_sector_to_occupation(path: SectorDemandPath,
                             mix: OccupationIndustryMix) -> Dict[Tuple[OccRegion, int, str], float]:
    """Occupation-region demand = sum over sectors of sector demand x occupation share.

    The mix is held fixed for every year.
    """
    demand: Dict[Tuple[OccRegion, int, str], float] = defaultdict(float)
    for (sector, region, year) in sorted(path.values):
        if (sector, region) not in mix.shares:
            raise InputError(f"No occupation mix for sector {sector!r} in region {region!r}")
        sector_demand = path.values[(sector, region, year)]
        for occupation, share in sorted(mix.shares[(sector, region)].items()):
            demand[(OccRegion(occupation, region), year, path.scenario_id)] += sector_demand * share
    return dict(demand)


def occupation_demand(paths: Mapping[str, SectorDemandPath], mix: OccupationIndustryMix) -> DemandTable:
    """Apply :func:`map_sector_to_occupation` to every scenario."""
    validate_paths(paths)
    table: DemandTable = {}
    for scenario_id in sorted(paths):
        mapped = map_sector_to_occupation(paths[scenario_id], mix)
        table[scenario_id] = {(node, year): value for (node, year, _), value in mapped.items()}
    return table


def remap_mix(mix: OccupationIndustryMix, merge_map: Mapping[str, str]) -> OccupationIndustryMix:
    """Rewrite mix occupations onto merged codes; shares of merged occupations add up."""
    shares = {}
    for key, distribution in mix.shares.items():
        merged: Dict[str, float] = defaultdict(float)
        for occupation, share in sorted(distribution.items()):
            if occupation not in merge_map:
                raise InputError(f"Mix occupation {occupation!r} is not in the merge map")
            merged[merge_map[occupation]] += share
        shares[key] = dict(sorted(merged.items()))
    return OccupationIndustryMix(shares=shares)


def yearly_totals(table: DemandTable) -> Dict[str, Dict[int, float]]:
    """Total demand per scenario per year."""
    totals: Dict[str, Dict[int, float]] = {}
    for scenario_id, values in table.items():
        by_year: Dict[int, float] = defaultdict(float)
        for (node, year) in sorted(values):
            by_year[year] += values[(node, year)]
        totals[scenario_id] = dict(sorted(by_year.items()))
    return totals


def normalize_demand(raw: DemandTable, base_year: int = None) -> DemandTable:
    """Rescale every scenario so the baseline total stays at its base-year level.

    D*[n, y, s] = D[n, y, s] * sum_n D[n, base_year, baseline] / sum_n D[n, y, baseline]
    """
    if BASELINE not in raw:
        raise InputError(f"Scenario set has no {BASELINE!r} scenario")
    baseline_totals = yearly_totals({BASELINE: raw[BASELINE]})[BASELINE]
    if base_year is None:
        base_year = min(baseline_totals)
    if base_year not in baseline_totals:
        raise InputError(f"Baseline has no demand for base year {base_year}")
    for year, total in baseline_totals.items():
        if total <= 0:
            raise InputError(f"Baseline total demand is zero in {year}")
    reference = baseline_totals[base_year]

    normalized: DemandTable = {}
    for scenario_id, values in raw.items():
        scaled = {}
        for (node, year), value in values.items():
            if year not in baseline_totals:
                raise InputError(f"Scenario {scenario_id!r} has year {year} missing from the baseline")
            if year == base_year:
                scaled[(node, year)] = value
            else:
                scaled[(node, year)] = value * reference / baseline_totals[year]
        normalized[scenario_id] = scaled
    logger.info(f"Normalized {len(raw)} scenarios to the {base_year} baseline total {reference:.6g}")
    return normalized


def demand_matrix(values: Mapping[Tuple[OccRegion, int], float], nodes: List[OccRegion],
                  years: List[int]) -> np.ndarray:
    """(years, nodes) array; nodes without demand get zero."""
    position = {node: i for i, node in enumerate(nodes)}
    year_position = {year: k for k, year in enumerate(years)}
    matrix = np.zeros((len(years), len(nodes)))
    unknown = set()
    for (node, year), value in values.items():
        if year not in year_position:
            continue
        if node not in position:
            unknown.add(node)
            continue
        matrix[year_position[year], position[node]] = value
    if unknown:
        logger.warning(
            f"{len(unknown)} demand nodes are not in the network and are dropped, "
            f"e.g. {sorted(unknown)[0].key}"
        )
    return matrix


def reallocation_volume(scenario: DemandScenario, start_year: int, end_year: int,
                        grouping: Callable[[OccRegion], str] = None) -> Dict[str, Tuple[float, float]]:
    """Jobs created (demand increases) and destroyed (decreases) per group between two years."""
    grouping = grouping or (lambda node: node.broad_group)
    for year in (start_year, end_year):
        if year not in scenario.years:
            raise InputError(f"Scenario {scenario.scenario_id!r} has no demand for {year}")
    change = scenario.year_demand(end_year) - scenario.year_demand(start_year)
    volumes: Dict[str, List[float]] = defaultdict(lambda: [0.0, 0.0])
    for node, delta in zip(scenario.nodes, change):
        entry = volumes[grouping(node)]
        if delta > 0:
            entry[0] += float(delta)
        elif delta < 0:
            entry[1] += float(-delta)
    return {group: (created, destroyed) for group, (created, destroyed) in sorted(volumes.items())}


def yearly_reallocation(scenario: DemandScenario) -> List[Dict[str, float]]:
    """Demand-side jobs created and destroyed in each year-on-year step."""
    rows = []
    for k in range(1, len(scenario.years)):
        change = scenario.D_star[k] - scenario.D_star[k - 1]
        rows.append({
            "year": scenario.years[k],
            "created": float(change[change > 0].sum()),
            "destroyed": float(-change[change < 0].sum()),
        })
    return rows


def scenario_ids(table: Iterable[str]) -> List[str]:
    """Baseline first, then shocks in lexicographic order."""
    ids = sorted(set(table))
    if BASELINE in ids:
        ids.remove(BASELINE)
        ids.insert(0, BASELINE)
    return ids
