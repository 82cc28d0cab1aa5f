"""Distributed Bayesian detection with Byzantine data falsification."""

from .attacks import (
    AttackScenario,
    StrategySet,
    assumption_holds,
    blinding_fraction,
    dispatch,
    is_blind,
    optimal_local_attack,
    optimal_majority_attack,
    optimal_strategy_aware_attack,
)
from .core import (
    AttackConfig,
    ErrorReport,
    FusionRule,
    Marginals,
    NetworkConfig,
    Polarity,
    Priors,
    SensorModel,
    ValidationError,
    d_pE_dP01,
    d_pE_dP10,
    d_pe_local,
    global_probs,
    local_error,
    marginals,
    r_p01,
    r_p10,
    system_error,
)
from .fusion import (
    RuleSearchResult,
    SandwichBounds,
    brute_force_rule_search,
    majority_rule,
    min_error,
    optimal_fusion_rule,
    sandwich_bounds,
)
from .simulate import Placement, SimConfig, SimResult, simulate, validate_against_closed_form

__version__ = "0.1.0"
