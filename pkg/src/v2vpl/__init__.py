"""Path-loss modelling toolkit for mmWave V2V links between crossing cars."""

__version__ = "0.1.0"

from .propagation import (  # noqa: E402
    AbgParams,
    CiParams,
    FiParams,
    ProposedParams,
    ThreeGppParams,
    eval_median,
    evaluate,
    fspl,
    sample_shadowing,
)
from .estimation import (  # noqa: E402
    Direction,
    FitError,
    FitResult,
    Trace,
    estimate_sigma,
    fit_abg,
    fit_all,
    fit_ci,
    fit_fi,
    fit_proposed,
)
from .gof import GofWeights, rank_models  # noqa: E402
from .crossing import (  # noqa: E402
    TABLE2,
    ScenarioConfig,
    average_model,
    crossover_distance,
    max_pl_gap,
    simulate_crossing,
    split_at_rendezvous,
)
