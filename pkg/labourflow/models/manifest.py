"""Reproducibility manifest data models."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .. import __version__


@dataclass
class ArtifactManifest:
    """Manifest written next to every artifact set."""
    kind: str  # "network", "scenario", "synthetic", "analysis", "calibration"
    inputs: Dict[str, str]  # input name -> sha256
    outputs: Dict[str, str]  # output file -> sha256
    parameters: Dict[str, Any] = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "Kind": self.kind,
            "Version": self.version,
            "Inputs": dict(sorted(self.inputs.items())),
            "Outputs": dict(sorted(self.outputs.items())),
            "Parameters": self.parameters,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ArtifactManifest':
        """Create from dictionary loaded from JSON."""
        return cls(
            kind=data.get("Kind", ""),
            inputs=data.get("Inputs", {}),
            outputs=data.get("Outputs", {}),
            parameters=data.get("Parameters", {}),
            version=data.get("Version", ""),
        )


@dataclass
class RunRecord:
    """Outcome of a single (scenario, seed) run."""
    scenario: str
    seed: int
    status: str  # "Success", "Faulted"
    path: Optional[str] = None
    digest: Optional[str] = None
    wall_time: float = 0.0
    error: Optional[str] = None


@dataclass
class RunManifest:
    """Manifest of a simulate command: inputs, parameters and every run."""
    inputs: Dict[str, str]
    parameters: Dict[str, Any]
    scenarios: List[str]
    seeds: List[int]
    runs: List[RunRecord] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def faulted(self) -> List[RunRecord]:
        return [run for run in self.runs if run.status != "Success"]

    def run_for(self, scenario: str, seed: int) -> Optional[RunRecord]:
        for run in self.runs:
            if run.scenario == scenario and run.seed == seed:
                return run
        return None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization; timings are kept out, see :meth:`timing`."""
        return {
            "Kind": "simulation",
            "Version": self.version,
            "Inputs": dict(sorted(self.inputs.items())),
            "Parameters": self.parameters,
            "Scenarios": self.scenarios,
            "Seeds": self.seeds,
            "Runs": [
                {
                    "Scenario": run.scenario,
                    "Seed": run.seed,
                    "Status": run.status,
                    "Path": run.path,
                    "Digest": run.digest,
                    "Error": run.error,
                }
                for run in self.runs
            ],
        }

    def timing(self) -> Dict[str, Any]:
        """Wall-clock times, which differ between otherwise identical runs."""
        return {
            "WallTime": round(self.wall_time, 3),
            "Runs": {f"{run.scenario}/seed_{run.seed}": round(run.wall_time, 3) for run in self.runs},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        """Create from dictionary loaded from JSON."""
        runs = [
            RunRecord(
                scenario=run["Scenario"],
                seed=int(run["Seed"]),
                status=run.get("Status", "Faulted"),
                path=run.get("Path"),
                digest=run.get("Digest"),
                error=run.get("Error"),
            )
            for run in data.get("Runs", [])
        ]
        return cls(
            inputs=data.get("Inputs", {}),
            parameters=data.get("Parameters", {}),
            scenarios=list(data.get("Scenarios", [])),
            seeds=[int(seed) for seed in data.get("Seeds", [])],
            runs=runs,
            version=data.get("Version", ""),
        )
