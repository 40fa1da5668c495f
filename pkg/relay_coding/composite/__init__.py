"""Composite relay networks: Monte Carlo outage, selective coding and ε-capacity"""

from .sampler import ThetaSample, draw_theta, iter_theta, sample_theta, splitmix64
from .regions import RegionRegistry, cf_masks, region_registry
from .outage import (
    eps_capacity_bounds,
    error_lower_bound,
    network_rate_table,
    optimize_decision_region,
    outage_cf,
    outage_df,
    outage_direct,
    outage_scs_network,
    outage_scs_relay,
    scheme_outage,
    select_relay_parameters,
)

__all__ = [
    "ThetaSample", "draw_theta", "iter_theta", "sample_theta", "splitmix64",
    "RegionRegistry", "cf_masks", "region_registry",
    "eps_capacity_bounds", "error_lower_bound", "network_rate_table",
    "optimize_decision_region", "outage_cf", "outage_df", "outage_direct",
    "outage_scs_network", "outage_scs_relay", "scheme_outage", "select_relay_parameters",
]
