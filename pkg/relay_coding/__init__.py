from .exceptions import (
    BracketError,
    ConfigurationError,
    DegenerateCovarianceError,
    EnumerationCapError,
    InfeasibleStrategyError,
    RelayCodingError,
)
from .pydantic_models import (
    CompositeModel,
    CompressionConfig,
    DecisionRegion,
    FadingDraw,
    GapReport,
    GaussianNetwork,
    InputCovariance,
    MonteCarloConfig,
    OutageEstimate,
    RateResult,
    SchemeParams,
    StrategyAssignment,
)
from .gauss_core import JointCovariance, VariableSet, assemble_covariance, conditional_mi, logdet_psd
from .network_model import (
    build_input_covariance,
    build_layered_covariance,
    enumerate_ordered_partitions,
    enumerate_subsets,
    independent_inputs,
    validate_network,
)
from .rate_engine import (
    q_term,
    r_term,
    rate_cf_single,
    rate_df_single,
    rate_df_single_opt,
    rate_fd_nnc,
    rate_lmnnc,
    rate_mnnc,
    rate_mnnc_search,
    rate_nnc,
    rate_noncoop,
    rate_two_relay,
    relay_rate_term,
)
from .cutset import cutset_bound_relaxed, cutset_df_single, cutset_df_single_opt, cutset_exact
from .gap_analysis import (
    gap_df_single,
    gap_empirical,
    gap_mnnc_delta1,
    gap_mnnc_delta2,
    gap_nnc_constant,
)

__version__ = "0.0.1"

__all__ = [
    "BracketError",
    "ConfigurationError",
    "DegenerateCovarianceError",
    "EnumerationCapError",
    "InfeasibleStrategyError",
    "RelayCodingError",
    "CompositeModel",
    "CompressionConfig",
    "DecisionRegion",
    "FadingDraw",
    "GapReport",
    "GaussianNetwork",
    "InputCovariance",
    "MonteCarloConfig",
    "OutageEstimate",
    "RateResult",
    "SchemeParams",
    "StrategyAssignment",
    "JointCovariance",
    "VariableSet",
    "assemble_covariance",
    "conditional_mi",
    "logdet_psd",
    "build_input_covariance",
    "build_layered_covariance",
    "enumerate_ordered_partitions",
    "enumerate_subsets",
    "independent_inputs",
    "validate_network",
    "q_term",
    "r_term",
    "rate_cf_single",
    "rate_df_single",
    "rate_df_single_opt",
    "rate_fd_nnc",
    "rate_lmnnc",
    "rate_mnnc",
    "rate_mnnc_search",
    "rate_nnc",
    "rate_noncoop",
    "rate_two_relay",
    "relay_rate_term",
    "cutset_bound_relaxed",
    "cutset_df_single",
    "cutset_df_single_opt",
    "cutset_exact",
    "gap_df_single",
    "gap_empirical",
    "gap_mnnc_delta1",
    "gap_mnnc_delta2",
    "gap_nnc_constant",
    "__version__",
]
