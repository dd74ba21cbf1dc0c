"""Output directory layout, deterministic writers and digests."""

import hashlib
import json
import logging
import os
from typing import Any, Dict, Iterable, Optional

import pandas as pd

from ..errors import ConstraintError, InputError


logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
LOCK_NAME = "simulate.lock"


def file_digest(path: str) -> str:
    """sha256 of a file's bytes."""
    sha = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            sha.update(chunk)
    return sha.hexdigest()


def digest_inputs(paths: Dict[str, Optional[str]]) -> Dict[str, str]:
    """Digest every named input that is set; missing files are an input error."""
    digests = {}
    for name, path in paths.items():
        if not path:
            continue
        if not os.path.exists(path):
            raise InputError(f"Input file for {name} not found: {path}")
        digests[name] = file_digest(path)
    return digests


class ArtifactStore:
    """Artifacts of one command, rooted at an output directory.

    Layout: ``network/``, ``scenario/``, ``runs/<scenario>/seed_<n>.csv``,
    ``analysis/``, each with its ``manifest.json``.
    """

    def __init__(self, root: str):
        self.root = root
        os.makedirs(self.root, exist_ok=True)

    def path(self, *parts: str) -> str:
        full = os.path.join(self.root, *parts)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        return full

    def relative(self, path: str) -> str:
        return os.path.relpath(path, self.root)

    def exists(self, *parts: str) -> bool:
        return os.path.exists(os.path.join(self.root, *parts))

    def write_json(self, rel_path: str, data: Any) -> str:
        path = self.path(rel_path)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, sort_keys=False, allow_nan=False)
            f.write("\n")
        return path

    def load_json(self, rel_path: str) -> Dict[str, Any]:
        path = os.path.join(self.root, rel_path)
        if not os.path.exists(path):
            raise InputError(f"Artifact not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def write_frame(self, rel_path: str, frame: pd.DataFrame) -> str:
        path = self.path(rel_path)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_text(self, rel_path: str, text: str) -> str:
        path = self.path(rel_path)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def digests(self, rel_paths: Iterable[str]) -> Dict[str, str]:
        return {rel: file_digest(os.path.join(self.root, rel)) for rel in rel_paths}

    def create_lock(self):
        """Create the simulate lock; fails if another simulate owns the directory."""
        try:
            fd = os.open(os.path.join(self.root, LOCK_NAME), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ConstraintError(
                f"Simulation in progress in {self.root}. Use 'unlock' command if it is stuck."
            )
        with os.fdopen(fd, 'w') as f:
            f.write(str(os.getpid()))

    def remove_lock(self) -> bool:
        """Remove the simulate lock; returns whether one existed."""
        try:
            os.remove(os.path.join(self.root, LOCK_NAME))
            return True
        except FileNotFoundError:
            return False
