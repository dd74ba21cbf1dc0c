"""Outcome analysis of a simulated ensemble."""

import logging
import math
import os
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from ..config.settings import RunConfig
from ..errors import ConstraintError, InputError, SimulationFault
from ..metrics.aggregates import aggregate_series, mean_series
from ..metrics.decomposition import variance_decomposition
from ..metrics.outcomes import (OutcomeTable, demand_response_correlation, group_table, heatmap_table,
                                outcome_table, region_table, spearman, top_affected, within_bin_dispersion)
from ..models.manifest import ArtifactManifest, RunManifest
from ..models.scenario import BASELINE
from ..models.state import Trajectory
from ..storage.artifact_store import ArtifactStore
from ..storage.csv_io import load_trajectory
from .simulate import RUN_MANIFEST_FILE, SIMULATION_INPUTS, SimulateOperation, run_parameters


logger = logging.getLogger(__name__)

ANALYSIS_PREFIX = "analysis"
SUMMARY_FILE = os.path.join(ANALYSIS_PREFIX, "summary.json")
SERIES_FILE = os.path.join(ANALYSIS_PREFIX, "aggregate_series.csv")
REALLOCATION_FILE = os.path.join(ANALYSIS_PREFIX, "reallocation.csv")
MANIFEST_FILE = os.path.join(ANALYSIS_PREFIX, "manifest.json")


def _without_thresholds(parameters: Dict[str, Any]) -> Dict[str, Any]:
    return {key: value for key, value in parameters.items() if key != 'age_thresholds_months'}


class AnalyzeOperation:
    """Handles outcome tables, aggregate series and decompositions of a finished ensemble."""

    def __init__(self, output_dir: str):
        self.store = ArtifactStore(output_dir)
        self.simulation = SimulateOperation(output_dir)

    def load_manifest(self, run_config: RunConfig) -> RunManifest:
        """The run manifest, checked against the inputs on disk and the requested parameters."""
        if not self.store.exists(RUN_MANIFEST_FILE):
            raise InputError(f"No simulation manifest in {self.store.root}; run simulate first")
        manifest = RunManifest.from_dict(self.store.load_json(RUN_MANIFEST_FILE))

        current = self.store.digests(SIMULATION_INPUTS)
        changed = sorted(name for name, digest in current.items() if manifest.inputs.get(name) != digest)
        if changed:
            raise ConstraintError(f"Inputs changed since simulation: {', '.join(changed)}")
        tracked = sorted(manifest.parameters.get('age_thresholds_months', []))
        if run_config.x_months not in tracked:
            raise InputError(
                f"Simulation tracked vacancy ages {tracked} months, not x_months={run_config.x_months}; "
                f"re-simulate with --x-months {run_config.x_months}"
            )
        if _without_thresholds(manifest.parameters) != _without_thresholds(run_parameters(run_config)):
            raise InputError("Simulation parameters differ from the requested analysis parameters")
        if sorted(manifest.seeds) != sorted(run_config.seeds):
            raise InputError(f"Simulation used seeds {manifest.seeds}, analysis requested {run_config.seeds}")
        if BASELINE not in manifest.scenarios:
            raise InputError(f"Simulation has no {BASELINE!r} runs")
        for run in manifest.runs:
            if run.status != "Success":
                continue
            if not self.store.exists(run.path):
                raise InputError(f"Trajectory {run.path} is missing")
            if self.store.digests([run.path])[run.path] != run.digest:
                raise ConstraintError(f"Trajectory {run.path} does not match its recorded digest")
        return manifest

    @staticmethod
    def paired_seeds(manifest: RunManifest) -> List[int]:
        """Seeds whose runs completed in every scenario."""
        faulted = {run.seed for run in manifest.faulted}
        if faulted:
            logger.warning(f"Dropping seeds with faulted runs: {sorted(faulted)}")
        seeds = [seed for seed in manifest.seeds if seed not in faulted]
        if not seeds:
            raise SimulationFault("No seed completed in every scenario")
        return seeds

    def analyze(self, run_config: RunConfig) -> Dict[str, Any]:
        """Write outcome tables, plot-ready CSVs and the summary for every shock scenario."""
        logger.info(f"Analyzing simulation in {self.store.root}")
        manifest = self.load_manifest(run_config)
        seeds = self.paired_seeds(manifest)
        _, metadata, scenarios = self.simulation.load_inputs(run_config.params.steps_per_year)

        runs: Dict[str, List[Trajectory]] = {}
        for scenario_id in manifest.scenarios:
            scenario = scenarios[scenario_id]
            runs[scenario_id] = [
                load_trajectory(self.store.path(manifest.run_for(scenario_id, seed).path), scenario_id, seed,
                                scenario.steps_per_year, scenario.years[0])
                for seed in seeds
            ]

        series_frames, reallocation_frames = [], []
        for scenario_id, trajectories in runs.items():
            series = mean_series(aggregate_series(trajectory) for trajectory in trajectories)
            series_frames.append(series.per_step.assign(scenario=scenario_id))
            reallocation_frames.append(series.per_year.assign(scenario=scenario_id))
        self.store.write_frame(SERIES_FILE, _scenario_first(pd.concat(series_frames, ignore_index=True)))
        self.store.write_frame(REALLOCATION_FILE, _scenario_first(pd.concat(reallocation_frames, ignore_index=True)))
        outputs = [SERIES_FILE, REALLOCATION_FILE]

        summary = {
            "Seeds": seeds,
            "Window": [run_config.start_year, run_config.end_year],
            "XMonths": run_config.x_months,
            "Scenarios": {},
        }
        for scenario_id in manifest.scenarios:
            if scenario_id == BASELINE:
                continue
            table = outcome_table(runs[BASELINE], runs[scenario_id], scenarios[BASELINE], scenarios[scenario_id],
                                  run_config.start_year, run_config.end_year, run_config.x_months, metadata)
            written, scenario_summary = self._scenario_outputs(table, runs, run_config, scenarios)
            outputs.extend(written)
            summary["Scenarios"][scenario_id] = scenario_summary

        self.store.write_json(SUMMARY_FILE, summary)
        outputs.append(SUMMARY_FILE)
        analysis_manifest = ArtifactManifest(
            kind="analysis",
            inputs={RUN_MANIFEST_FILE: self.store.digests([RUN_MANIFEST_FILE])[RUN_MANIFEST_FILE]},
            outputs=self.store.digests(outputs),
            parameters={
                "start_year": run_config.start_year,
                "end_year": run_config.end_year,
                "x_months": run_config.x_months,
                "top_n": run_config.top_n,
                "bins": run_config.bins,
                "seeds": seeds,
            },
        )
        self.store.write_json(MANIFEST_FILE, analysis_manifest.to_dict())
        logger.info(f"Analysis written for {len(summary['Scenarios'])} scenarios")
        return {
            'summary': summary,
            'outputs': outputs,
            'output_dir': self.store.root,
        }

    def _scenario_outputs(self, table: OutcomeTable, runs: Dict[str, List[Trajectory]],
                          run_config: RunConfig, scenarios) -> Tuple[List[str], Dict[str, Any]]:
        prefix = os.path.join(ANALYSIS_PREFIX, table.scenario_id)
        files = {
            "outcomes.csv": table.frame(),
            "heatmap.csv": heatmap_table(table),
            "regions.csv": region_table(table),
            "groups.csv": group_table(table),
            "top_affected.csv": top_affected(table, run_config.top_n),
        }
        written = []
        for name, frame in files.items():
            self.store.write_frame(os.path.join(prefix, name), frame)
            written.append(os.path.join(prefix, name))

        occupations = [node.occupation_id for node in table.nodes]
        decompositions = {
            "Unemployment": variance_decomposition(table.u_delta_pp, table.regions, occupations).to_dict(),
            "Vacancy": variance_decomposition(table.v_delta_pp, table.regions, occupations).to_dict(),
        }
        decomposition_file = os.path.join(prefix, "decomposition.json")
        self.store.write_json(decomposition_file, decompositions)
        written.append(decomposition_file)

        thresholds = sorted(runs[BASELINE][0].aged_vacancies)
        by_threshold = {
            x: outcome_table(runs[BASELINE], runs[table.scenario_id], scenarios[BASELINE],
                             scenarios[table.scenario_id], run_config.start_year, run_config.end_year, x).v_delta_pp
            for x in thresholds
        }
        robustness = {
            f"{x}-{y}": spearman(by_threshold[x], by_threshold[y])
            for i, x in enumerate(thresholds) for y in thresholds[i + 1:]
        }
        dispersion, _ = within_bin_dispersion(table.demand_change_pct, table.u_delta_pp, run_config.bins)

        summary = {
            "DemandResponseCorrelation": demand_response_correlation(table),
            "WithinBinUnemploymentDeltaStd": _finite_or_none(dispersion),
            "VacancyThresholdRankCorrelation": robustness,
            "Decomposition": {
                kind: {"Total": values["Total"], "Shares": values["Shares"]}
                for kind, values in decompositions.items()
            },
            "TopAffected": [
                {"Occupation": row["occupation"], "Region": row["region"], "UnemploymentDeltaPP": row["u_delta_pp"]}
                for row in files["top_affected.csv"].to_dict(orient="records")
            ],
        }
        return written, summary


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _scenario_first(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[["scenario"] + [column for column in frame.columns if column != "scenario"]]
