"""Variance decomposition of node outcomes into region, occupation and residual parts."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import InputError


@dataclass
class VarianceDecomposition:
    """Components are population variances over the included nodes.

    With grand mean m, region deviation a = mean_region - m and occupation
    deviation b = mean_occupation - m, the components are mean(a^2),
    mean(b^2) and mean((x - m - a - b)^2); ``total`` is mean((x - m)^2). The
    three add up to ``total`` on balanced panels; ``discrepancy`` reports the
    gap otherwise.
    """
    between_region: float
    between_occupation: float
    residual: float
    total: float
    n_nodes: int
    excluded: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def component_sum(self) -> float:
        return self.between_region + self.between_occupation + self.residual

    @property
    def discrepancy(self) -> float:
        return abs(self.component_sum - self.total)

    def shares(self) -> Dict[str, Optional[float]]:
        if self.total <= 0:
            return {"between_region": None, "between_occupation": None, "residual": None}
        return {
            "between_region": self.between_region / self.total,
            "between_occupation": self.between_occupation / self.total,
            "residual": self.residual / self.total,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "BetweenRegion": self.between_region,
            "BetweenOccupation": self.between_occupation,
            "Residual": self.residual,
            "Total": self.total,
            "ComponentSum": self.component_sum,
            "Discrepancy": self.discrepancy,
            "Shares": {
                "BetweenRegion": self.shares()["between_region"],
                "BetweenOccupation": self.shares()["between_occupation"],
                "Residual": self.shares()["residual"],
            },
            "Nodes": self.n_nodes,
            "ExcludedUndefined": self.excluded,
            "Notes": list(self.notes),
        }


def variance_decomposition(values: Sequence[float], regions: Sequence[str],
                           occupations: Sequence[str]) -> VarianceDecomposition:
    """Decompose per-node ``values`` labelled by region and occupation; NaN values are left out."""
    values = np.asarray(values, dtype=np.float64)
    if not len(values) == len(regions) == len(occupations):
        raise InputError("Values, regions and occupations must have the same length")

    defined = np.isfinite(values)
    excluded = int((~defined).sum())
    notes = []
    if excluded:
        notes.append(f"{excluded} nodes with undefined outcomes excluded")
    if not defined.any():
        raise InputError("No defined outcomes to decompose")

    frame = pd.DataFrame({
        "value": values[defined],
        "region": np.asarray(regions, dtype=object)[defined],
        "occupation": np.asarray(occupations, dtype=object)[defined],
    })
    grand_mean = frame["value"].mean()
    centred = frame["value"] - grand_mean
    region_dev = frame.groupby("region")["value"].transform("mean") - grand_mean
    occupation_dev = frame.groupby("occupation")["value"].transform("mean") - grand_mean
    residual = centred - region_dev - occupation_dev

    if frame["region"].nunique() == 1:
        notes.append("single region: between-region component is 0")
        region_dev[:] = 0.0
    if frame["occupation"].nunique() == 1:
        notes.append("single occupation: between-occupation component is 0")
        occupation_dev[:] = 0.0

    cells = frame.groupby(["region", "occupation"]).size()
    balanced = (len(cells) == frame["region"].nunique() * frame["occupation"].nunique()
                and cells.nunique() == 1)
    if not balanced:
        notes.append("unbalanced panel: components need not add up to the total")

    return VarianceDecomposition(
        between_region=float(np.mean(region_dev.to_numpy() ** 2)),
        between_occupation=float(np.mean(occupation_dev.to_numpy() ** 2)),
        residual=float(np.mean(residual.to_numpy() ** 2)),
        total=float(np.mean(centred.to_numpy() ** 2)),
        n_nodes=len(frame),
        excluded=excluded,
        notes=notes,
    )
