"""Extended compact GA with MDL linkage learning for cyclic dynamic environments."""

from ._kernels import BACKEND
from .core import (
    ConfigurationError,
    EnvironmentClock,
    Individual,
    Population,
    RandomStream,
    evaluate_population,
    oracle_change_detected,
    random_population,
    sentinel_change_detected,
)
from .model import (
    MarginalProductModel,
    MdlScore,
    compressed_population_complexity,
    estimate_tables,
    greedy_model_search,
    group_entropy,
    mdl_score,
    model_complexity,
)
from .operators import bb_wise_crossover, tournament_select, uniform_crossover
from .problems import (
    DynamicTrap,
    ModifiedTrap4,
    MovingParabola,
    StaticTrap,
    SwitchingTrap,
    decode_binary,
    make_problem,
    trap_value,
)
from .solvers import RunTrace, SolverConfig, predicted_convergence_time, run

__version__ = "0.1.0"
