"""Unlock operations for removing simulation locks."""

import logging
from typing import Any, Dict

from ..storage.artifact_store import ArtifactStore


logger = logging.getLogger(__name__)


class UnlockOperation:
    """Handles unlock operations for simulation locks."""

    def __init__(self, output_dir: str):
        self.store = ArtifactStore(output_dir)

    def unlock(self) -> Dict[str, Any]:
        """Remove the simulation lock of an output directory."""
        logger.info(f"Unlocking {self.store.root}")
        lock_existed = self.store.remove_lock()
        if lock_existed:
            logger.info(f"Removed lock in {self.store.root}")
            message = f"Successfully removed simulation lock in '{self.store.root}'"
        else:
            logger.info(f"No lock found in {self.store.root}")
            message = f"No simulation lock found in '{self.store.root}'"
        return {
            'output_dir': self.store.root,
            'lock_existed': lock_existed,
            'message': message,
        }
