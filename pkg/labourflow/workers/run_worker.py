"""Concurrent simulation workers."""

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Sequence, Tuple

from ..abm.engine import simulate
from ..models.network import MobilityNetwork
from ..models.scenario import DemandScenario
from ..models.state import SimulationParams
from ..storage.artifact_store import ArtifactStore
from ..storage.csv_io import trajectory_frame
from ..utils.progress import ProgressReporter


logger = logging.getLogger(__name__)


def run_path(scenario_id: str, seed: int) -> str:
    return os.path.join("runs", scenario_id, f"seed_{seed}.csv")


class RunWorker:
    """Worker for simulating individual (scenario, seed) runs."""

    def __init__(self, worker_id: int, network: MobilityNetwork, output_dir: str):
        self.worker_id = worker_id
        self.network = network
        self.output_dir = output_dir

    def simulate_run(self, scenario: DemandScenario, params: SimulationParams) -> Dict[str, Any]:
        """Simulate one run and write its trajectory CSV."""
        result = {
            'worker_id': self.worker_id,
            'scenario': scenario.scenario_id,
            'seed': params.seed,
            'success': False,
            'error': None,
            'path': None,
            'digest': None,
            'wall_time': 0.0,
        }

        started = time.perf_counter()
        try:
            trajectory = simulate(scenario, self.network, params)
            store = ArtifactStore(self.output_dir)
            rel_path = run_path(scenario.scenario_id, params.seed)
            store.write_frame(rel_path, trajectory_frame(trajectory))
            result['path'] = rel_path
            result['digest'] = store.digests([rel_path])[rel_path]
            result['success'] = True
        except Exception as e:
            result['error'] = f"{type(e).__name__}: {e}"
        result['wall_time'] = time.perf_counter() - started
        return result


def _simulate_in_process(network: MobilityNetwork, output_dir: str, scenario: DemandScenario,
                         params: SimulationParams) -> Dict[str, Any]:
    return RunWorker(os.getpid(), network, output_dir).simulate_run(scenario, params)


class SimulationWorkerPool:
    """Pool of workers for concurrent ensemble runs."""

    def __init__(self, network: MobilityNetwork, output_dir: str, num_workers: int = 1,
                 backend: str = "thread"):
        self.network = network
        self.output_dir = output_dir
        self.num_workers = num_workers
        self.backend = backend

    def run_ensemble(self, scenarios: Sequence[DemandScenario], seeds: Sequence[int],
                     params: SimulationParams, progress: bool = True) -> Dict[str, Any]:
        """Simulate every scenario with every seed.

        Run results are returned in (scenario, seed) order whatever order the
        workers finish in.
        """
        tasks: List[Tuple[DemandScenario, SimulationParams]] = [
            (scenario, params.with_seed(seed)) for scenario in scenarios for seed in seeds
        ]
        results = {
            'total_runs': len(tasks),
            'completed_runs': 0,
            'faulted_runs': 0,
            'runs': [],
            'errors': [],
        }
        if not tasks:
            return results

        collected = {}
        with ProgressReporter(len(tasks), enabled=progress) as reporter:
            with self._executor() as executor:
                future_to_task = self._submit(executor, tasks)
                for future in as_completed(future_to_task):
                    result = future.result()
                    collected[(result['scenario'], result['seed'])] = result
                    if result['success']:
                        results['completed_runs'] += 1
                    else:
                        results['faulted_runs'] += 1
                        results['errors'].append({
                            'scenario': result['scenario'],
                            'seed': result['seed'],
                            'error': result['error'],
                        })
                        logger.error(f"Run {result['scenario']}/seed {result['seed']} faulted: {result['error']}")
                    reporter.update(result)

        results['runs'] = [collected[(scenario.scenario_id, p.seed)] for scenario, p in tasks]
        results['errors'].sort(key=lambda error: (error['scenario'], error['seed']))
        return results

    def _executor(self):
        if self.backend == "process":
            return ProcessPoolExecutor(max_workers=self.num_workers)
        return ThreadPoolExecutor(max_workers=self.num_workers)

    def _submit(self, executor, tasks):
        if self.backend == "process":
            return {
                executor.submit(_simulate_in_process, self.network, self.output_dir, scenario, params):
                    (scenario.scenario_id, params.seed)
                for scenario, params in tasks
            }
        workers = [RunWorker(i, self.network, self.output_dir) for i in range(self.num_workers)]
        return {
            executor.submit(workers[i % self.num_workers].simulate_run, scenario, params):
                (scenario.scenario_id, params.seed)
            for i, (scenario, params) in enumerate(tasks)
        }
