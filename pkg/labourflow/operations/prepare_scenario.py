"""Scenario preparation: sector demand to per-node target demand."""

import logging
import os
from typing import Any, Dict, Optional

import pandas as pd

from ..config.settings import Config
from ..errors import InputError
from ..models.manifest import ArtifactManifest
from ..models.scenario import BASELINE
from ..scenario.demand import (normalize_demand, occupation_demand, reallocation_volume, remap_mix,
                               yearly_reallocation, yearly_totals)
from ..scenario.interpolation import build_scenarios
from ..storage.artifact_store import ArtifactStore, digest_inputs
from ..storage.csv_io import (MIX_AVERAGE, demand_frame, load_mix, load_network, load_sector_demand,
                              read_table, target_frame)
from .build_network import EDGES_FILE, MERGE_MAP_FILE, NODES_FILE


logger = logging.getLogger(__name__)

SCENARIO_PREFIX = "scenario"
DEMAND_FILE = os.path.join(SCENARIO_PREFIX, "demand.csv")
TARGETS_FILE = os.path.join(SCENARIO_PREFIX, "targets.csv")
SUMMARY_FILE = os.path.join(SCENARIO_PREFIX, "summary.json")
REALLOCATION_FILE = os.path.join(SCENARIO_PREFIX, "reallocation.csv")
YEARLY_REALLOCATION_FILE = os.path.join(SCENARIO_PREFIX, "reallocation_yearly.csv")
MANIFEST_FILE = os.path.join(SCENARIO_PREFIX, "manifest.json")


def load_merge_map(path: str) -> Dict[str, str]:
    frame = read_table(path, ["original", "merged"])
    return dict(zip(frame["original"], frame["merged"]))


class PrepareScenarioOperation:
    """Handles conversion of sector scenarios into per-node target demand."""

    def __init__(self, config: Config, output_dir: str):
        self.config = config
        self.store = ArtifactStore(output_dir)

    def prepare(self, steps_per_year: Optional[int] = None, mix_year: Optional[str] = None,
                broadcast_mix: Optional[bool] = None) -> Dict[str, Any]:
        """Map, normalize and interpolate every scenario onto the built network's nodes."""
        self.config.override('scenario', steps_per_year=steps_per_year, mix_year=mix_year,
                             broadcast_mix=broadcast_mix)
        settings = self.config.section('scenario')
        steps_per_year = self.config.steps_per_year
        for artifact in (EDGES_FILE, NODES_FILE, MERGE_MAP_FILE):
            if not self.store.exists(artifact):
                raise InputError(f"Missing {artifact} in {self.store.root}; run build-network first")

        paths = {
            "sector_demand": self.config.require_input("sector_demand"),
            "mix": self.config.require_input("mix"),
        }
        logger.info(f"Preparing scenarios from {paths['sector_demand']}")

        network, _ = load_network(self.store.path(EDGES_FILE), self.store.path(NODES_FILE))
        merge_map = load_merge_map(self.store.path(MERGE_MAP_FILE))
        regions = sorted({node.region_id for node in network.nodes})

        mix = load_mix(paths["mix"], regions, str(settings['mix_year'] or MIX_AVERAGE),
                       bool(settings['broadcast_mix']))
        mix = remap_mix(mix, merge_map)
        raw = occupation_demand(load_sector_demand(paths["sector_demand"]), mix)
        normalized = normalize_demand(raw, settings['base_year'])
        scenarios = build_scenarios(normalized, network.nodes, steps_per_year,
                                    settings['start_year'], settings['end_year'])

        baseline = scenarios[BASELINE]
        first_year, last_year = baseline.years[0], baseline.years[-1]
        rows = []
        yearly_rows = []
        for scenario_id, scenario in scenarios.items():
            for group, (created, destroyed) in reallocation_volume(scenario, first_year, last_year).items():
                rows.append({"scenario": scenario_id, "group": group,
                             "jobs_created": created, "jobs_destroyed": destroyed})
            for row in yearly_reallocation(scenario):
                yearly_rows.append({"scenario": scenario_id, **row})

        totals = yearly_totals(normalized)
        baseline_totals = list(totals[BASELINE].values())
        reference = baseline_totals[0]
        summary = {
            "Scenarios": list(scenarios),
            "Years": [first_year, last_year],
            "StepsPerYear": steps_per_year,
            "Timesteps": baseline.n_steps,
            "Nodes": len(network),
            "YearlyTotals": {sid: {str(y): v for y, v in by_year.items()} for sid, by_year in totals.items()},
            "RawYearlyTotals": {sid: {str(y): v for y, v in by_year.items()}
                                for sid, by_year in yearly_totals(raw).items()},
            "BaselineTotalMaxRelativeDeviation": max(abs(total - reference) / reference
                                                     for total in baseline_totals),
        }

        self.store.write_frame(DEMAND_FILE, demand_frame(scenarios.values()))
        self.store.write_frame(TARGETS_FILE, target_frame(scenarios.values()))
        self.store.write_frame(REALLOCATION_FILE, pd.DataFrame(
            rows, columns=["scenario", "group", "jobs_created", "jobs_destroyed"]))
        self.store.write_frame(YEARLY_REALLOCATION_FILE, pd.DataFrame(
            yearly_rows, columns=["scenario", "year", "created", "destroyed"]))
        self.store.write_json(SUMMARY_FILE, summary)

        inputs = digest_inputs(paths)
        inputs.update(self.store.digests([NODES_FILE, MERGE_MAP_FILE]))
        outputs = [DEMAND_FILE, TARGETS_FILE, REALLOCATION_FILE, YEARLY_REALLOCATION_FILE, SUMMARY_FILE]
        manifest = ArtifactManifest(
            kind="scenario",
            inputs=inputs,
            outputs=self.store.digests(outputs),
            parameters={
                "steps_per_year": steps_per_year,
                "base_year": settings['base_year'],
                "start_year": first_year,
                "end_year": last_year,
                "mix_year": str(settings['mix_year'] or MIX_AVERAGE),
                "broadcast_mix": bool(settings['broadcast_mix']),
            },
        )
        self.store.write_json(MANIFEST_FILE, manifest.to_dict())
        logger.info(f"Prepared {len(scenarios)} scenarios, {first_year}-{last_year}, {baseline.n_steps} steps")
        return {
            'summary': summary,
            'outputs': outputs,
            'output_dir': self.store.root,
        }
