"""Key-rate lower bounds for decoy-state QKD with discrete phase randomization."""

from .analytic import (
    Bb84BoundSet,
    MdiBoundSet,
    basis_dependence_delta,
    bb84_a_coefficient,
    bb84_analytic_bounds,
    bb84_key_rate,
    binary_entropy,
    mdi_analytic_bounds,
    mdi_key_rate,
    phase_error_upper,
)
from .channel import (
    DECOY,
    SIGNAL,
    VACUUM,
    X_BASIS,
    Y_BASIS,
    ChannelParams,
    ObservableSet,
    bb84_gain_error,
    mdi_gain_error,
    simulate_bb84,
    simulate_mdi,
    transmittance,
)
from .lp import LpProblem, LpSolution, lp_solve
from .numeric import bb84_numeric_bounds, mdi_numeric_bounds
from .source import (
    CprStatistics,
    DprStatistics,
    FidelityRecord,
    SeriesConvergenceError,
    SourceConfig,
    basis_fidelity_bb84,
    basis_fidelity_mdi,
    basis_fidelity_mdi_pair_gram,
    intensity_fidelity,
    pseudo_poisson_pmf,
)
from .sweep import (
    ConfigError,
    RatePoint,
    RunConfig,
    cpr_baseline_context,
    default_run_config,
    optimize_intensities,
    parse_config,
    parse_config_dict,
    rate_point,
    sweep,
    write_config,
    write_csv,
)

__version__ = "0.1.0"
