"""Configuration management for labourflow."""

import copy
import logging
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml

from ..errors import InputError
from ..models.network import NORMALIZATIONS, SOURCE
from ..models.state import SimulationParams
from ..synthetic.generator import SyntheticSpec


logger = logging.getLogger(__name__)

CONFIG_ENV = 'LABOURFLOW_CONFIG'
BACKENDS = ("thread", "process")

DEFAULTS: Dict[str, Dict[str, Any]] = {
    'inputs': {
        'transitions': None,
        'hierarchy': None,
        'regions': None,
        'wages': None,
        'sector_demand': None,
        'mix': None,
    },
    'network': {
        'normalization': SOURCE,
        'min_presence': 1,
        'no_friction': False,
    },
    'scenario': {
        'steps_per_year': 12,
        'base_year': None,
        'start_year': None,
        'end_year': None,
        'mix_year': 'average',
        'broadcast_mix': False,
    },
    'simulation': {
        'params': {},
        'seed': 0,
        'seeds': 1,
        'scenarios': None,
        'workers': 1,
        'backend': 'thread',
    },
    'analysis': {
        'start_year': 2018,
        'end_year': 2030,
        'x_months': 6,
        'top_n': 5,
        'bins': 10,
    },
    'synthetic': {},
    'calibration': {
        'target_unemployment': 0.05,
        'lower': 1e-4,
        'upper': 0.2,
        'tolerance': 1e-10,
        'horizon_years': 20,
    },
}


class Config:
    """Configuration manager for labourflow.

    Values come from built-in defaults, then a YAML file (``--config`` or the
    ``LABOURFLOW_CONFIG`` environment variable), then command-line overrides.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path or os.environ.get(CONFIG_ENV)
        self._data = copy.deepcopy(DEFAULTS)
        if self.path:
            self._merge(self._load_file(self.path))

    @staticmethod
    def _load_file(path: str) -> Dict[str, Any]:
        if not os.path.exists(path):
            raise InputError(f"Config file not found: {path}")
        with open(path, 'r') as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise InputError(f"Config file {path} is not valid YAML: {e}")
        if not isinstance(data, dict):
            raise InputError(f"Config file {path} must hold a mapping of sections")
        return data

    def _merge(self, data: Dict[str, Any]):
        for section, values in data.items():
            if section not in self._data:
                raise InputError(f"Unknown config section: {section}")
            if not isinstance(values, dict):
                raise InputError(f"Config section {section} must be a mapping")
            for key, value in values.items():
                if section != 'synthetic' and key not in self._data[section]:
                    raise InputError(f"Unknown config key: {section}.{key}")
                self._data[section][key] = value

    def override(self, section: str, **values):
        """Apply command-line values; ``None`` means the flag was not given."""
        for key, value in values.items():
            if value is None:
                continue
            if section == 'simulation' and key != 'seed' and key in SimulationParams.__dataclass_fields__:
                self._data['simulation']['params'][key] = value
            else:
                self._data[section][key] = value

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self._data[name])

    @property
    def inputs(self) -> Dict[str, Optional[str]]:
        """Input paths; relative paths resolve against the config file's directory."""
        base = os.path.dirname(os.path.abspath(self.path)) if self.path else os.getcwd()
        resolved = {}
        for name, path in self._data['inputs'].items():
            resolved[name] = os.path.join(base, path) if path and not os.path.isabs(path) else path
        return resolved

    def require_input(self, name: str) -> str:
        path = self.inputs.get(name)
        if not path:
            raise InputError(f"inputs.{name} is not configured")
        return path

    @property
    def normalization(self) -> str:
        value = self._data['network']['normalization']
        if value not in NORMALIZATIONS:
            raise InputError(f"network.normalization must be one of {NORMALIZATIONS}, got {value!r}")
        return value

    @property
    def min_presence(self) -> int:
        return self._positive_int('network', 'min_presence')

    @property
    def no_friction(self) -> bool:
        return bool(self._data['network']['no_friction'])

    @property
    def steps_per_year(self) -> int:
        return self._positive_int('scenario', 'steps_per_year')

    @property
    def simulation_params(self) -> SimulationParams:
        params = dict(self._data['simulation']['params'] or {})
        params.setdefault('steps_per_year', self.steps_per_year)
        params.setdefault('seed', self._data['simulation']['seed'])
        if 'age_thresholds_months' in params:
            params['age_thresholds_months'] = tuple(params['age_thresholds_months'])
        try:
            return SimulationParams.from_dict(params)
        except TypeError as e:
            raise InputError(f"Invalid simulation.params: {e}")

    @property
    def seeds(self) -> List[int]:
        """Explicit seed list, or ``seeds`` consecutive seeds starting at ``seed``."""
        seeds = self._data['simulation']['seeds']
        if isinstance(seeds, list):
            values = [int(seed) for seed in seeds]
        else:
            start = int(self._data['simulation']['seed'])
            values = list(range(start, start + int(seeds)))
        if not values:
            raise InputError("simulation.seeds is empty")
        if len(set(values)) != len(values):
            raise InputError("simulation.seeds has duplicates")
        return values

    @property
    def workers(self) -> int:
        return self._positive_int('simulation', 'workers')

    @property
    def backend(self) -> str:
        value = self._data['simulation']['backend']
        if value not in BACKENDS:
            raise InputError(f"simulation.backend must be one of {BACKENDS}, got {value!r}")
        return value

    @property
    def synthetic_spec(self) -> SyntheticSpec:
        values = dict(self._data['synthetic'])
        if 'mix_years' in values:
            values['mix_years'] = tuple(values['mix_years'])
        try:
            return SyntheticSpec.from_dict(values)
        except TypeError as e:
            raise InputError(f"Invalid synthetic section: {e}")

    def _positive_int(self, section: str, key: str) -> int:
        value = self._data[section][key]
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InputError(f"{section}.{key} must be a positive integer, got {value!r}")
        return value


@dataclass
class RunConfig:
    """Everything a simulate or analyze command needs, resolved from Config and flags."""
    output_dir: str
    params: SimulationParams
    seeds: List[int]
    scenarios: Optional[List[str]] = None
    start_year: int = 2018
    end_year: int = 2030
    x_months: int = 6
    top_n: int = 5
    bins: int = 10
    workers: int = 1
    backend: str = 'thread'
    progress: bool = True

    def __post_init__(self):
        if not self.seeds:
            raise InputError("Seed list is empty")
        if self.start_year > self.end_year:
            raise InputError(f"Window {self.start_year}-{self.end_year} is empty")
        if self.x_months not in self.params.age_thresholds_months:
            raise InputError(
                f"x_months={self.x_months} is not a tracked vacancy age "
                f"(age_thresholds_months={list(self.params.age_thresholds_months)})"
            )

    @classmethod
    def from_config(cls, config: Config, output_dir: str, progress: bool = True) -> 'RunConfig':
        analysis = config.section('analysis')
        scenarios = config.section('simulation')['scenarios']
        params = config.simulation_params
        x_months = int(analysis['x_months'])
        if x_months not in params.age_thresholds_months:
            params = SimulationParams.from_dict({
                **params.to_dict(),
                'age_thresholds_months': tuple(params.age_thresholds_months) + (x_months,),
            })
        return cls(
            output_dir=output_dir,
            params=params,
            seeds=config.seeds,
            scenarios=list(scenarios) if scenarios else None,
            start_year=int(analysis['start_year']),
            end_year=int(analysis['end_year']),
            x_months=x_months,
            top_n=int(analysis['top_n']),
            bins=int(analysis['bins']),
            workers=config.workers,
            backend=config.backend,
            progress=progress,
        )
