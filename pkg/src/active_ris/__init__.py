"""Two-timescale analysis toolkit for amplifying (active) RIS links.

Closed-form achievable rates, Monte-Carlo verification oracles, GA-based
discrete phase optimization, and active-vs-passive power-budget
comparison, driven by a sweep CLI.
"""

from .channels import ChannelRealization, los_components, sample_channel
from .closed_form import (
    DownlinkMoments,
    PowerBudget,
    UplinkMoments,
    amplification_factor_up,
    beamforming_constants_down,
    cascade_fourth_down,
    cascade_fourth_up,
    cascade_power_down,
    cascade_power_up,
    downlink_moments,
    noise_quadratic_up,
    rate_downlink_active,
    rate_downlink_passive,
    rate_uplink_active,
    rate_uplink_passive,
    reradiated_quadratic_down,
    split_budget,
    uplink_moments,
)
from .config import SystemConfig, default_config, load_config
from .errors import ConfigError, DimensionError, InfeasibleBudgetError
from .geometry import (
    AngleSet,
    PhaseConfig,
    aligned_phases,
    angle_gains,
    f_scalar,
    steering_vector,
)
from .monte_carlo import (
    MomentKind,
    MonteCarloEstimate,
    ergodic_rate,
    estimate_moment,
    snr_downlink_instant,
    snr_uplink_instant,
    validate_all,
)
from .optimizer import (
    GAParams,
    OptimizationResult,
    exhaustive_search,
    ga_optimize,
    optimize_rate,
    random_phases,
)

__version__ = "0.1.0"
