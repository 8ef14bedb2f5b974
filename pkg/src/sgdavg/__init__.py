"""Stochastic subgradient descent for non-smooth convex problems, with
last-iterate, uniform, suffix and polynomial-decay averaging, closed-form
error bounds and an experiment harness."""

from .analysis import BoundParams, aggregate, check_bound_compliance, fit_rate, theoretical_bound
from .averaging import (
    LastIterate,
    PolyDecayAverage,
    SuffixAverage,
    SuffixBank,
    UniformAverage,
    polydecay_weights,
)
from .domains import Box, L2Ball, Unbounded, diameter, project
from .engine import (
    Constant,
    GeneralConvex,
    RunConfig,
    RunRecord,
    StronglyConvex,
    repetition_seed,
    run_repetitions,
    run_sgd,
    sgd_step,
    step_size,
)
from .estimator import AveragedSGDClassifier
from .exceptions import BoundUnavailableError, ConfigError, ParseError, UsageError
from .oracles import (
    NoisyL1,
    NoisyQuadratic,
    RegularizedHinge,
    full_subgradient,
    generate_synthetic,
    objective_value,
    oracle_norm_bound,
    reference_optimum,
    stochastic_subgradient,
)
from .svmlight import Dataset, dump_svmlight, load_svmlight, parse_svmlight

__version__ = "0.1.0"
