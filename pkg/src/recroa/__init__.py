"""recroa: inner approximations of regions of attraction, learned from
sampled trajectories via recurrence counter-examples."""

__version__ = "0.1.0"

from . import backend
from .dynamics import VectorField, eval_field, field_from_config, linear, paper2d, parse_system
from .expr import ParseError
from .groundtruth import GridClassification, compare, grid_classify, make_grid_stop, verify_recurrence
from .integrate import IntegratorConfig, TrajectoryOutcome, rk4_step, sample_trajectory
from .learner import LearnerConfig, RunResult, RunStats, classify_sample, learn
from .sets import (
    EpsilonPolicy,
    MultiApprox,
    PolytopeSet,
    SphereSet,
    check_epsilon_bound,
    contains,
    estimate_volume,
    generate_directions,
    sample_uniform,
    update_multi,
    update_on_counterexample,
    update_polytope,
    update_sphere,
    verify_net,
)

__all__ = [
    "__version__",
    "backend",
    "VectorField",
    "eval_field",
    "field_from_config",
    "linear",
    "paper2d",
    "parse_system",
    "ParseError",
    "GridClassification",
    "compare",
    "grid_classify",
    "make_grid_stop",
    "verify_recurrence",
    "IntegratorConfig",
    "TrajectoryOutcome",
    "rk4_step",
    "sample_trajectory",
    "LearnerConfig",
    "RunResult",
    "RunStats",
    "classify_sample",
    "learn",
    "EpsilonPolicy",
    "MultiApprox",
    "PolytopeSet",
    "SphereSet",
    "check_epsilon_bound",
    "contains",
    "estimate_volume",
    "generate_directions",
    "sample_uniform",
    "update_multi",
    "update_on_counterexample",
    "update_polytope",
    "update_sphere",
    "verify_net",
]
