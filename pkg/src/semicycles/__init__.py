"""Numerical toolkit for oscillation thresholds and semicycle analysis of
second-order delay differential equations x″(t) + p(t)·x(t−τ(t)) = 0."""

from .errors import (
    DomainError,
    HistoryDomainError,
    InsufficientWindowError,
    IterationLimitError,
    NotApplicableError,
    ResolutionError,
    SemicycleError,
    ShootingError,
)
from .signals import (
    GridFunction,
    PiecewiseSignal,
    esssup_abs,
    eval_signal,
    signal_from_dict,
    signal_range,
    signal_to_dict,
)
from .thresholds import (
    ThresholdResult,
    beta_iterate,
    eval_r,
    forcing_term,
    gamma_constant,
    psi,
    psi_oracle_bvp,
    semicycle_threshold,
    theta,
)
from .integrator import (
    DelayProblem,
    Event,
    Trajectory,
    extremum_events,
    fundamental_system,
    integrate,
    problem_from_dict,
    problem_to_dict,
    rescale,
    wronskian,
    zero_crossings,
)
from .analysis import (
    Classification,
    Semicycle,
    check_ascent,
    check_descent,
    classify,
    criterion_gustafson,
    criterion_myshkis,
    criterion_wronskian_2e,
    envelope_decay_ratio,
    find_zeros,
    semicycles,
    verify_comparison,
    wronskian_min,
)
from .spectral import CharRoot, char_roots, eigen_semicycle, lambert_w
from .repro import (
    EXAMPLE_NAMES,
    ExampleSpec,
    build_example_problem,
    closed_form,
    example_horizon,
)
from .harness import (
    SUITE_NAMES,
    HarnessReport,
    eigenmode_problem,
    mode_mixture_problem,
    run_suite,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "HistoryDomainError",
    "InsufficientWindowError",
    "IterationLimitError",
    "NotApplicableError",
    "ResolutionError",
    "SemicycleError",
    "ShootingError",
    "GridFunction",
    "PiecewiseSignal",
    "esssup_abs",
    "eval_signal",
    "signal_from_dict",
    "signal_range",
    "signal_to_dict",
    "ThresholdResult",
    "beta_iterate",
    "eval_r",
    "forcing_term",
    "gamma_constant",
    "psi",
    "psi_oracle_bvp",
    "semicycle_threshold",
    "theta",
    "DelayProblem",
    "Event",
    "Trajectory",
    "extremum_events",
    "fundamental_system",
    "integrate",
    "problem_from_dict",
    "problem_to_dict",
    "rescale",
    "wronskian",
    "zero_crossings",
    "Classification",
    "Semicycle",
    "check_ascent",
    "check_descent",
    "classify",
    "criterion_gustafson",
    "criterion_myshkis",
    "criterion_wronskian_2e",
    "envelope_decay_ratio",
    "find_zeros",
    "semicycles",
    "verify_comparison",
    "wronskian_min",
    "CharRoot",
    "char_roots",
    "eigen_semicycle",
    "lambert_w",
    "EXAMPLE_NAMES",
    "ExampleSpec",
    "build_example_problem",
    "closed_form",
    "example_horizon",
    "SUITE_NAMES",
    "HarnessReport",
    "eigenmode_problem",
    "mode_mixture_problem",
    "run_suite",
    "__version__",
]
