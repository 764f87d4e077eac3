"""Explicit Euler integration under exact and noise-corrupted oracles.

The solver targets initial-value problems whose right-hand side is
continuous, of linear growth, one-sided Lipschitz, and locally
(alpha, beta)-Hölder, but not necessarily Lipschitz. Alongside the
scheme itself the package ships the corruption model (perturbations
bounded by delta*(1+||y||) plus a perturbed initial value), two
irregular benchmark families, assumption-constant estimators, and an
experiment harness that measures empirical convergence rates against
the theoretical error envelopes.
"""
from .core import (
    OdeProblem,
    RhsFunction,
    Trajectory,
    euler_solve,
    euler_solve_noisy,
    interpolate,
    make_problem,
)
from .errors import (
    ConfigError,
    EulerLabError,
    EvaluationError,
    FitError,
    IntegrationError,
    ParameterError,
)
from .experiments import (
    ConvergenceReport,
    StudyRow,
    bound_ratio_check,
    convergence_study,
    fit_rate,
    reference_solution,
    sup_error,
    worst_case_error,
)
from .noise import (
    KINDS,
    CorruptingFunction,
    NoisyOracle,
    make_corruption,
    make_oracle,
    perturb_initial,
)
from .problems import (
    PROBLEM_NAMES,
    AdditiveParams,
    AssumptionEstimate,
    MultiplicativeParams,
    additive_problem,
    build_problem,
    estimate_assumptions,
    linear_problem,
    multiplicative_instance,
    multiplicative_problem,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveParams",
    "AssumptionEstimate",
    "ConfigError",
    "ConvergenceReport",
    "CorruptingFunction",
    "EulerLabError",
    "EvaluationError",
    "FitError",
    "IntegrationError",
    "KINDS",
    "MultiplicativeParams",
    "NoisyOracle",
    "OdeProblem",
    "PROBLEM_NAMES",
    "ParameterError",
    "RhsFunction",
    "StudyRow",
    "Trajectory",
    "additive_problem",
    "bound_ratio_check",
    "build_problem",
    "convergence_study",
    "estimate_assumptions",
    "euler_solve",
    "euler_solve_noisy",
    "fit_rate",
    "interpolate",
    "linear_problem",
    "make_corruption",
    "make_oracle",
    "make_problem",
    "multiplicative_instance",
    "multiplicative_problem",
    "perturb_initial",
    "reference_solution",
    "sup_error",
    "worst_case_error",
]
