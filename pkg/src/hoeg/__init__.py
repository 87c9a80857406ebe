"""Higher-order extragradient solvers for structured min-max problems.

The package bundles the order-1 and order-2 extragradient iteration, its
continuous-time flow, the competitive preconditioned operator, and a
sampling-based certification suite for the assumptions the convergence
guarantees rest on.
"""

from .certify import (
    CertReport,
    certify_problem,
    check_half_step_norm_bound,
    check_potential_inequality,
    check_rho_threshold,
    estimate_comonotonicity,
    estimate_q_rho,
    estimate_smoothness,
    estimate_weak_mvi_rho,
    fit_rate,
)
from .competitive import eval_f_alpha, f_alpha_jacobian, stationary_equivalence_check
from .dynamics import (
    ContinuousConfig,
    ContinuousLog,
    check_energy_bound,
    normalized_field,
    resolvent_solve,
    simulate,
)
from .errors import (
    CapabilityError,
    ConvergenceError,
    DegenerateSampleError,
    NumericError,
    StationaryPointReached,
)
from .halfstep import HalfStepResult, lambda_step, solve_half_step_p1, solve_half_step_p2
from .problems import (
    OperatorMode,
    Point,
    ProblemSpec,
    builtin,
    eval_jacobian,
    eval_operator,
    problem_names,
)
from .solver import (
    IterateRecord,
    SolverConfig,
    TrajectoryLog,
    detect_cycling,
    run,
    select_output,
)
from .taylor import TaylorModel, phi, tau, taylor_model

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "CertReport",
    "ContinuousConfig",
    "ContinuousLog",
    "ConvergenceError",
    "DegenerateSampleError",
    "HalfStepResult",
    "IterateRecord",
    "NumericError",
    "OperatorMode",
    "Point",
    "ProblemSpec",
    "SolverConfig",
    "StationaryPointReached",
    "TaylorModel",
    "TrajectoryLog",
    "builtin",
    "certify_problem",
    "check_energy_bound",
    "check_half_step_norm_bound",
    "check_potential_inequality",
    "check_rho_threshold",
    "detect_cycling",
    "estimate_comonotonicity",
    "estimate_q_rho",
    "estimate_smoothness",
    "estimate_weak_mvi_rho",
    "eval_f_alpha",
    "eval_jacobian",
    "eval_operator",
    "f_alpha_jacobian",
    "fit_rate",
    "lambda_step",
    "normalized_field",
    "phi",
    "problem_names",
    "resolvent_solve",
    "run",
    "select_output",
    "simulate",
    "solve_half_step_p1",
    "solve_half_step_p2",
    "stationary_equivalence_check",
    "tau",
    "taylor_model",
]
