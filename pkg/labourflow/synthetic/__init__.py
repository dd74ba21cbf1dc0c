from .generator import (SyntheticSpec, gen_mix, gen_sector_demand, gen_transitions, gen_wages, hierarchy_rows,
                        synthetic_nodes, write_synthetic)
from .oracle import MAX_ORACLE_NODES, closed_form_hires, enumerate_expected_hires, mean_field_oracle

__all__ = [
    "SyntheticSpec", "gen_mix", "gen_sector_demand", "gen_transitions", "gen_wages", "hierarchy_rows",
    "synthetic_nodes", "write_synthetic",
    "MAX_ORACLE_NODES", "closed_form_hires", "enumerate_expected_hires", "mean_field_oracle",
]
