"""Ensemble simulation of the prepared scenarios."""

import logging
import os
import time
from typing import Any, Dict, List

from ..config.settings import RunConfig
from ..errors import InputError
from ..models.manifest import ArtifactManifest, RunManifest, RunRecord
from ..models.network import MobilityNetwork
from ..models.scenario import BASELINE, DemandScenario
from ..scenario.demand import scenario_ids
from ..storage.artifact_store import ArtifactStore
from ..storage.csv_io import load_network, load_scenarios
from ..workers.run_worker import SimulationWorkerPool
from .build_network import EDGES_FILE, NODES_FILE
from .prepare_scenario import DEMAND_FILE, MANIFEST_FILE as SCENARIO_MANIFEST, TARGETS_FILE


logger = logging.getLogger(__name__)

RUNS_PREFIX = "runs"
RUN_MANIFEST_FILE = os.path.join(RUNS_PREFIX, "manifest.json")
TIMING_FILE = os.path.join(RUNS_PREFIX, "timing.json")
SIMULATION_INPUTS = [EDGES_FILE, NODES_FILE, DEMAND_FILE, TARGETS_FILE]


def run_parameters(run_config: RunConfig) -> Dict[str, Any]:
    """Parameters shared by every run; the seed varies per run."""
    parameters = run_config.params.to_dict()
    parameters.pop('seed')
    return parameters


class SimulateOperation:
    """Handles seed-ensemble simulation of baseline and shock scenarios."""

    def __init__(self, output_dir: str):
        self.store = ArtifactStore(output_dir)

    def load_inputs(self, steps_per_year: int):
        for artifact in SIMULATION_INPUTS + [SCENARIO_MANIFEST]:
            if not self.store.exists(artifact):
                raise InputError(f"Missing {artifact} in {self.store.root}; build the network and prepare scenarios first")
        prepared = ArtifactManifest.from_dict(self.store.load_json(SCENARIO_MANIFEST))
        prepared_steps = int(prepared.parameters.get("steps_per_year", steps_per_year))
        if prepared_steps != steps_per_year:
            raise InputError(
                f"Scenarios were prepared at {prepared_steps} steps/year but the simulation uses {steps_per_year}"
            )
        network, metadata = load_network(self.store.path(EDGES_FILE), self.store.path(NODES_FILE))
        scenarios = load_scenarios(self.store.path(DEMAND_FILE), self.store.path(TARGETS_FILE), steps_per_year)
        for scenario in scenarios.values():
            if scenario.nodes != network.nodes:
                raise InputError(f"Scenario {scenario.scenario_id!r} does not follow the network's node order")
        return network, metadata, scenarios

    @staticmethod
    def select(scenarios: Dict[str, DemandScenario], requested: List[str] = None) -> List[DemandScenario]:
        """Baseline plus the requested scenarios (all when none are named)."""
        if BASELINE not in scenarios:
            raise InputError(f"Prepared scenarios have no {BASELINE!r} scenario")
        if not requested:
            return [scenarios[sid] for sid in scenario_ids(scenarios)]
        unknown = [sid for sid in requested if sid not in scenarios]
        if unknown:
            raise InputError(f"Unknown scenarios: {', '.join(unknown)}")
        return [scenarios[sid] for sid in scenario_ids(set(requested) | {BASELINE})]

    def simulate(self, run_config: RunConfig) -> Dict[str, Any]:
        """Run every selected scenario with every seed; faulted runs are recorded, not raised."""
        logger.info(f"Starting simulation in {self.store.root}")
        params = run_config.params
        network, _, scenarios = self.load_inputs(params.steps_per_year)
        selected = self.select(scenarios, run_config.scenarios)

        self.store.create_lock()
        logger.info("Created simulation lock")
        try:
            started = time.perf_counter()
            results = self._run(network, selected, run_config)
            wall_time = time.perf_counter() - started

            manifest = RunManifest(
                inputs=self.store.digests(SIMULATION_INPUTS),
                parameters=run_parameters(run_config),
                scenarios=[scenario.scenario_id for scenario in selected],
                seeds=list(run_config.seeds),
                runs=[
                    RunRecord(
                        scenario=run['scenario'],
                        seed=run['seed'],
                        status="Success" if run['success'] else "Faulted",
                        path=run['path'],
                        digest=run['digest'],
                        wall_time=run['wall_time'],
                        error=run['error'],
                    )
                    for run in results['runs']
                ],
                wall_time=wall_time,
            )
            self.store.write_json(RUN_MANIFEST_FILE, manifest.to_dict())
            self.store.write_json(TIMING_FILE, manifest.timing())
        finally:
            self.store.remove_lock()
            logger.info("Removed simulation lock")

        logger.info(
            f"Simulation finished: {results['completed_runs']} runs completed, "
            f"{results['faulted_runs']} faulted in {wall_time:.1f}s"
        )
        return {
            'manifest': manifest,
            'results': results,
            'output_dir': self.store.root,
        }

    def _run(self, network: MobilityNetwork, selected: List[DemandScenario],
             run_config: RunConfig) -> Dict[str, Any]:
        pool = SimulationWorkerPool(network, self.store.root, run_config.workers, run_config.backend)
        return pool.run_ensemble(selected, run_config.seeds, run_config.params, progress=run_config.progress)
