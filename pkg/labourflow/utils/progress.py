"""Progress reporting for seed ensembles."""

import sys
from typing import Any, Dict
from tqdm import tqdm


class ProgressReporter:
    """tqdm bar over (scenario, seed) runs, counting faulted runs separately."""

    def __init__(self, total: int, description: str = "Simulating", enabled: bool = True):
        self.total = total
        self.description = description
        self.enabled = enabled
        self.progress_bar = None
        self.completed = 0
        self.faulted = 0

    def start(self):
        self.progress_bar = tqdm(
            total=self.total,
            desc=self.description,
            unit="run",
            file=sys.stderr,
            disable=not self.enabled
        )

    def update(self, result: Dict[str, Any]):
        """Count a finished run and show which scenario it belonged to."""
        if result.get('success', False):
            self.completed += 1
        else:
            self.faulted += 1

        if self.progress_bar is not None:
            self.progress_bar.set_postfix({
                'scenario': result.get('scenario'),
                'completed': self.completed,
                'faulted': self.faulted
            })
            self.progress_bar.update(1)

    def finish(self):
        if self.progress_bar is not None:
            self.progress_bar.close()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.finish()
