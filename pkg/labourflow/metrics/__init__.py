from .aggregates import AggregateSeries, aggregate_series, mean_series, yearly_reallocation
from .decomposition import VarianceDecomposition, variance_decomposition
from .outcomes import (OutcomeTable, RunRates, demand_change_pct, demand_response_correlation, group_table,
                       heatmap_table, outcome_table, paired_deltas, region_table, run_rates, spearman,
                       top_affected, within_bin_dispersion)
from .rates import avg_unemployment_rate, avg_vacancy_rate, ratio

__all__ = [
    "AggregateSeries", "aggregate_series", "mean_series", "yearly_reallocation",
    "VarianceDecomposition", "variance_decomposition",
    "OutcomeTable", "RunRates", "demand_change_pct", "demand_response_correlation", "group_table",
    "heatmap_table", "outcome_table", "paired_deltas", "region_table", "run_rates", "spearman",
    "top_affected", "within_bin_dispersion",
    "avg_unemployment_rate", "avg_vacancy_rate", "ratio",
]
