"""Explore-explore-then-commit linear bandits on ellipsoidal action sets."""

from .baselines import (
    OfulBallPolicy,
    OraclePolicy,
    UniformPolicy,
    max_norm_over_confidence,
    oracle_etc_policy,
)
from .bounds import logbar, theorem3_rhs, theorem4_rhs
from .ellipsoid import (
    EllipsoidSet,
    exploration_direction,
    factorize,
    membership,
    mnorm,
    optimal_action,
)
from .environment import (
    BanditInstance,
    NoiseModel,
    RegretTrace,
    instantaneous_regret,
    pull,
    run_episode,
)
from .errors import (
    ConfigError,
    ContractViolation,
    IncompleteDesign,
    NotPositiveDefinite,
    PolicyViolation,
    SingularDesign,
    UnsupportedActionSet,
    ZeroParameter,
)
from .estimation import (
    LsEstimate,
    RoundRobinAccumulator,
    concentration_tail_estimate,
    confidence_width,
    ls_from_accumulator,
    ls_generic,
)
from .explore_commit import E2tcPolicy, Phase, exploration_budget, schedule, simulate_e2tc
from .harness import ExperimentConfig, load_config, run_experiment, runtime_probe
from .kernels import BACKEND as KERNEL_BACKEND
from .lowerbound import (
    AssouadFamily,
    GaussianPrior,
    assouad_theta,
    build_assouad,
    flip_coordinate,
    sample_prior,
)
from .reduction import ReducedPolicy, reduced_e2tc

__version__ = "0.1.0"
