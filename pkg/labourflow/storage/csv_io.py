"""Readers and writers for the external CSV formats."""

import json
import logging
import os
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import InputError
from ..models.network import MobilityNetwork, OccRegion, TransitionCounts
from ..models.scenario import DemandScenario, OccupationIndustryMix, SectorDemandPath
from ..models.state import Trajectory
from ..network.hierarchy import OccupationHierarchy
from ..network.ingest import ingest_transitions
from .artifact_store import ArtifactStore


logger = logging.getLogger(__name__)

TRANSITION_COLUMNS = ["source_occ", "source_region", "dest_occ", "dest_region", "count"]
HIERARCHY_COLUMNS = ["code", "parent_code", "label"]
REGION_COLUMNS = ["region_id", "label"]
WAGE_COLUMNS = ["occupation", "region", "mean_wage"]
SECTOR_DEMAND_COLUMNS = ["scenario", "sector", "region", "year", "demand"]
MIX_COLUMNS = ["sector", "region", "occupation", "share"]
TARGET_COLUMNS = ["scenario", "occupation", "region", "timestep", "target"]
DEMAND_COLUMNS = ["scenario", "occupation", "region", "year", "demand"]
EDGE_COLUMNS = ["source", "dest", "weight"]

NATIONAL = "*"
MIX_AVERAGE = "average"


def read_table(path: str, columns: Sequence[str], optional: Sequence[str] = ()) -> pd.DataFrame:
    """Read a CSV as strings and check its header."""
    if not path or not os.path.exists(path):
        raise InputError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputError(f"{path}: malformed CSV ({e})")
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise InputError(f"{path}: missing columns {', '.join(missing)}")
    keep = list(columns) + [column for column in optional if column in frame.columns]
    return frame[keep]


def _float(value: str, path: str, row_number: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise InputError(f"{path} row {row_number}: {column} must be numeric, got {value!r}")


def _int(value: str, path: str, row_number: int, column: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise InputError(f"{path} row {row_number}: {column} must be an integer, got {value!r}")


def load_hierarchy(path: str) -> OccupationHierarchy:
    frame = read_table(path, HIERARCHY_COLUMNS)
    return OccupationHierarchy.from_rows(frame.itertuples(index=False, name=None))


def load_regions(path: str) -> Dict[str, str]:
    """Region id -> label, in file order."""
    frame = read_table(path, REGION_COLUMNS)
    regions = {}
    for row_number, (region_id, label) in enumerate(frame.itertuples(index=False, name=None), start=1):
        region_id = region_id.strip()
        if not region_id:
            raise InputError(f"{path} row {row_number}: empty region_id")
        if region_id in regions:
            raise InputError(f"{path} row {row_number}: duplicate region {region_id!r}")
        regions[region_id] = label
    if not regions:
        raise InputError(f"{path}: no regions declared")
    return regions


def load_transitions(path: str, regions: Iterable[str],
                     hierarchy: Optional[OccupationHierarchy] = None) -> TransitionCounts:
    if not path or not os.path.exists(path):
        raise InputError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputError(f"{path}: malformed transition records ({e})")
    if list(frame.columns) != TRANSITION_COLUMNS:
        raise InputError(f"{path}: header must be {','.join(TRANSITION_COLUMNS)}")
    return ingest_transitions(frame.itertuples(index=False, name=None), regions, hierarchy)


def load_wages(path: Optional[str]) -> Dict[Tuple[str, str], float]:
    """(occupation, region) -> mean wage; region ``*`` applies to every region."""
    if not path:
        return {}
    frame = read_table(path, WAGE_COLUMNS)
    wages = {}
    for row_number, (occupation, region, wage) in enumerate(frame.itertuples(index=False, name=None), start=1):
        wages[(occupation, region)] = _float(wage, path, row_number, "mean_wage")
    return wages


def wage_for(wages: Dict[Tuple[str, str], float], node: OccRegion) -> Optional[float]:
    if (node.occupation_id, node.region_id) in wages:
        return wages[(node.occupation_id, node.region_id)]
    return wages.get((node.occupation_id, NATIONAL))


def load_sector_demand(path: str) -> Dict[str, SectorDemandPath]:
    frame = read_table(path, SECTOR_DEMAND_COLUMNS)
    paths: Dict[str, SectorDemandPath] = {}
    for row_number, (scenario, sector, region, year, demand) in enumerate(
            frame.itertuples(index=False, name=None), start=1):
        value = _float(demand, path, row_number, "demand")
        if value < 0:
            raise InputError(f"{path} row {row_number}: negative demand {value}")
        key = (sector, region, _int(year, path, row_number, "year"))
        demand_path = paths.setdefault(scenario, SectorDemandPath(scenario_id=scenario))
        if key in demand_path.values:
            raise InputError(f"{path} row {row_number}: duplicate entry {scenario}/{key}")
        demand_path.values[key] = value
    if not paths:
        raise InputError(f"{path}: no demand rows")
    return paths


def load_mix(path: str, regions: Iterable[str], mix_year: str = MIX_AVERAGE,
             broadcast: bool = False) -> OccupationIndustryMix:
    """Load occupation shares per (sector, region).

    An optional ``year`` column holds several yearly breakdowns; ``mix_year``
    picks one or averages them. Rows with region ``*`` are national shares and
    need ``broadcast`` to be copied onto every region.
    """
    frame = read_table(path, MIX_COLUMNS, optional=["year"])
    has_year = "year" in frame.columns
    if has_year and mix_year != MIX_AVERAGE:
        frame = frame[frame["year"] == str(mix_year)]
        if frame.empty:
            raise InputError(f"{path}: no mix rows for year {mix_year}")

    collected: Dict[Tuple[str, str], Dict[str, Dict[str, float]]] = defaultdict(lambda: defaultdict(dict))
    for row_number, row in enumerate(frame.itertuples(index=False, name=None), start=1):
        sector, region, occupation, share = row[:4]
        year = row[4] if has_year else ""
        value = _float(share, path, row_number, "share")
        collected[(sector, region)][year][occupation] = value

    shares: Dict[Tuple[str, str], Dict[str, float]] = {}
    for key, by_year in collected.items():
        occupations = sorted({occ for distribution in by_year.values() for occ in distribution})
        shares[key] = {
            occ: sum(distribution.get(occ, 0.0) for distribution in by_year.values()) / len(by_year)
            for occ in occupations
        }

    region_list = list(regions)
    national = {key: value for key, value in shares.items() if key[1] == NATIONAL}
    if national:
        if not broadcast:
            raise InputError(f"{path}: national mix rows (region '*') need the broadcast flag")
        for (sector, _), distribution in national.items():
            for region in region_list:
                shares.setdefault((sector, region), dict(distribution))
        shares = {key: value for key, value in shares.items() if key[1] != NATIONAL}

    mix = OccupationIndustryMix(shares=dict(sorted(shares.items())))
    mix.validate()
    return mix


def target_frame(scenarios: Iterable[DemandScenario]) -> pd.DataFrame:
    """Long-format per-timestep targets for every scenario."""
    frames = []
    for scenario in scenarios:
        n_steps, n_nodes = scenario.d_target.shape
        frames.append(pd.DataFrame({
            "scenario": scenario.scenario_id,
            "occupation": np.tile([node.occupation_id for node in scenario.nodes], n_steps),
            "region": np.tile([node.region_id for node in scenario.nodes], n_steps),
            "timestep": np.repeat(np.arange(n_steps), n_nodes),
            "target": scenario.d_target.reshape(-1),
        }))
    return pd.concat(frames, ignore_index=True)[TARGET_COLUMNS]


def load_targets(path: str) -> Dict[str, Tuple[List[OccRegion], np.ndarray]]:
    """scenario -> (nodes, d_target array of shape (timesteps, nodes))."""
    if not os.path.exists(path):
        raise InputError(f"Target demand file not found: {path}")
    frame = pd.read_csv(path, dtype={"scenario": str, "occupation": str, "region": str},
                        keep_default_na=False)
    missing = [column for column in TARGET_COLUMNS if column not in frame.columns]
    if missing:
        raise InputError(f"{path}: missing columns {', '.join(missing)}")
    targets = {}
    for scenario, group in frame.groupby("scenario", sort=False):
        first = group[group["timestep"] == group["timestep"].min()]
        nodes = [OccRegion(occ, region) for occ, region in zip(first["occupation"], first["region"])]
        n_steps = group["timestep"].nunique()
        values = group.sort_values(["timestep"], kind="stable")["target"].to_numpy(dtype=np.float64)
        if values.size != n_steps * len(nodes):
            raise InputError(f"{path}: scenario {scenario!r} is not a complete timestep x node grid")
        targets[scenario] = (nodes, values.reshape(n_steps, len(nodes)))
    return targets


def demand_frame(scenarios: Iterable[DemandScenario]) -> pd.DataFrame:
    """Long-format adjusted yearly demand for every scenario."""
    frames = []
    for scenario in scenarios:
        n_years, n_nodes = scenario.D_star.shape
        frames.append(pd.DataFrame({
            "scenario": scenario.scenario_id,
            "occupation": np.tile([node.occupation_id for node in scenario.nodes], n_years),
            "region": np.tile([node.region_id for node in scenario.nodes], n_years),
            "year": np.repeat(scenario.years, n_nodes),
            "demand": scenario.D_star.reshape(-1),
        }))
    return pd.concat(frames, ignore_index=True)[DEMAND_COLUMNS]


def load_scenarios(demand_path: str, target_path: str, steps_per_year: int) -> Dict[str, DemandScenario]:
    """Rebuild prepared scenarios from the yearly demand and per-step target CSVs."""
    if not os.path.exists(demand_path):
        raise InputError(f"Scenario demand file not found: {demand_path}")
    frame = pd.read_csv(demand_path, dtype={"scenario": str, "occupation": str, "region": str},
                        keep_default_na=False)
    targets = load_targets(target_path)
    scenarios = {}
    for scenario_id, group in frame.groupby("scenario", sort=True):
        years = sorted(int(year) for year in group["year"].unique())
        first = group[group["year"] == years[0]]
        nodes = [OccRegion(occ, region) for occ, region in zip(first["occupation"], first["region"])]
        values = group.sort_values(["year"], kind="stable")["demand"].to_numpy(dtype=np.float64)
        if values.size != len(years) * len(nodes):
            raise InputError(f"{demand_path}: scenario {scenario_id!r} is not a complete year x node grid")
        if scenario_id not in targets:
            raise InputError(f"{target_path}: no targets for scenario {scenario_id!r}")
        target_nodes, d_target = targets[scenario_id]
        if target_nodes != nodes:
            raise InputError(f"Scenario {scenario_id!r}: demand and target node orders differ")
        expected_steps = (len(years) - 1) * steps_per_year + 1
        if d_target.shape[0] != expected_steps:
            raise InputError(
                f"Scenario {scenario_id!r} has {d_target.shape[0]} target steps; {len(years)} years at "
                f"{steps_per_year} steps/year need {expected_steps}"
            )
        scenarios[scenario_id] = DemandScenario(
            scenario_id=scenario_id,
            nodes=nodes,
            years=years,
            D_star=values.reshape(len(years), len(nodes)),
            steps_per_year=steps_per_year,
            d_target=d_target,
        )
    return scenarios


def export_network(store: ArtifactStore, network: MobilityNetwork,
                   wages: Optional[Dict[Tuple[str, str], float]] = None,
                   prefix: str = "network") -> Dict[str, str]:
    """Edge list CSV plus JSON node sidecar; returns written relative paths."""
    rows, cols = np.nonzero(network.matrix)
    keys = np.array([node.key for node in network.nodes], dtype=object)
    edges = pd.DataFrame({
        "source": keys[rows],
        "dest": keys[cols],
        "weight": network.matrix[rows, cols],
    })
    edge_path = store.write_frame(os.path.join(prefix, "edges.csv"), edges)

    nodes = []
    for node in network.nodes:
        entry = {
            "key": node.key,
            "occupation": node.occupation_id,
            "region": node.region_id,
            "broad_group": node.broad_group,
        }
        wage = wage_for(wages or {}, node)
        if wage is not None:
            entry["mean_wage"] = wage
        nodes.append(entry)
    sidecar = {
        "Normalization": network.normalization,
        "Complete": network.complete,
        "ZeroMarginal": [node.key for node in network.zero_marginal],
        "Nodes": nodes,
    }
    node_path = store.write_json(os.path.join(prefix, "nodes.json"), sidecar)
    return {"edges": store.relative(edge_path), "nodes": store.relative(node_path)}


def load_network(edge_path: str, node_path: str) -> Tuple[MobilityNetwork, Dict[str, dict]]:
    """Rebuild a network from its edge list and sidecar; also returns node metadata by key."""
    for path in (edge_path, node_path):
        if not os.path.exists(path):
            raise InputError(f"Network artifact not found: {path}")
    with open(node_path, 'r', encoding='utf-8') as f:
        sidecar = json.load(f)
    nodes = [OccRegion(entry["occupation"], entry["region"]) for entry in sidecar["Nodes"]]
    position = {node.key: i for i, node in enumerate(nodes)}
    matrix = np.zeros((len(nodes), len(nodes)))
    edges = pd.read_csv(edge_path, dtype={"source": str, "dest": str}, keep_default_na=False)
    try:
        rows = edges["source"].map(position).to_numpy(dtype=np.int64)
        cols = edges["dest"].map(position).to_numpy(dtype=np.int64)
    except (TypeError, ValueError):
        raise InputError(f"{edge_path}: edge endpoints missing from {node_path}")
    matrix[rows, cols] = edges["weight"].to_numpy(dtype=np.float64)
    zero_marginal = [OccRegion.from_key(key) for key in sidecar.get("ZeroMarginal", [])]
    network = MobilityNetwork(nodes=nodes, matrix=matrix,
                              normalization=sidecar.get("Normalization", "source"),
                              zero_marginal=zero_marginal,
                              complete=bool(sidecar.get("Complete", False)))
    metadata = {entry["key"]: entry for entry in sidecar["Nodes"]}
    return network, metadata


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    n_steps, n_nodes = trajectory.employed.shape
    columns = {
        "timestep": np.repeat(np.arange(n_steps), n_nodes),
        "occupation": np.tile([node.occupation_id for node in trajectory.nodes], n_steps),
        "region": np.tile([node.region_id for node in trajectory.nodes], n_steps),
        "employed": trajectory.employed.reshape(-1),
        "unemployed": trajectory.unemployed.reshape(-1),
        "vacancies": trajectory.vacancies.reshape(-1),
    }
    for months in sorted(trajectory.aged_vacancies):
        columns[f"vacancies_age_ge_{months}m"] = trajectory.aged_vacancies[months].reshape(-1)
    return pd.DataFrame(columns)


def load_trajectory(path: str, scenario_id: str, seed: int, steps_per_year: int,
                    start_year: int) -> Trajectory:
    if not os.path.exists(path):
        raise InputError(f"Trajectory not found: {path}")
    frame = pd.read_csv(path, dtype={"occupation": str, "region": str}, keep_default_na=False)
    first = frame[frame["timestep"] == 0]
    nodes = [OccRegion(occ, region) for occ, region in zip(first["occupation"], first["region"])]
    n_steps = int(frame["timestep"].max()) + 1
    shape = (n_steps, len(nodes))
    if len(frame) != n_steps * len(nodes):
        raise InputError(f"{path}: trajectory is not a complete timestep x node grid")

    def column(name):
        return frame[name].to_numpy().reshape(shape)

    aged = {}
    for name in frame.columns:
        if name.startswith("vacancies_age_ge_") and name.endswith("m"):
            aged[int(name[len("vacancies_age_ge_"):-1])] = column(name)
    return Trajectory(
        scenario_id=scenario_id,
        seed=seed,
        nodes=nodes,
        steps_per_year=steps_per_year,
        start_year=start_year,
        employed=column("employed"),
        unemployed=column("unemployed"),
        vacancies=column("vacancies"),
        aged_vacancies=aged,
    )
