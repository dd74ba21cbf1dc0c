"""Synthetic input generation."""

import logging
import os
from typing import Any, Dict, Optional

from ..config.settings import Config
from ..models.manifest import ArtifactManifest
from ..storage.artifact_store import ArtifactStore
from ..synthetic.generator import write_synthetic


logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


class SyntheticOperation:
    """Handles generation of a synthetic input set from the ``synthetic`` config section."""

    def __init__(self, config: Config, output_dir: str):
        self.config = config
        self.store = ArtifactStore(output_dir)

    def generate(self, seed: Optional[int] = None) -> Dict[str, Any]:
        if seed is not None:
            self.config.override('synthetic', seed=seed)
        spec = self.config.synthetic_spec
        logger.info(
            f"Generating synthetic inputs: {spec.n_occupations} occupations x {spec.n_regions} regions, "
            f"seed {spec.seed}"
        )
        written = write_synthetic(spec, self.store)
        outputs = {name: self.store.relative(path) for name, path in written.items()}

        manifest = ArtifactManifest(
            kind="synthetic",
            inputs={},
            outputs=self.store.digests(sorted(outputs.values())),
            parameters=spec.to_dict(),
        )
        self.store.write_json(MANIFEST_FILE, manifest.to_dict())
        return {
            'spec': spec,
            'outputs': outputs,
            'nodes': spec.n_occupations * spec.n_regions,
            'output_dir': self.store.root,
        }
