"""Box-constrained direct search with a scaled-conjugate-gradient search step."""

from .bench import (
    ProfileTable,
    RunRecord,
    convergence_test,
    load_records,
    performance_profile,
    performance_ratio,
    progress_curve,
    run_cell,
    run_experiment,
)
from .exceptions import (
    BCSCGError,
    BudgetExhausted,
    DegenerateReflection,
    DegenerateTheta,
    IncompatibleDimension,
    InfeasibleBudget,
    InfeasibleStart,
    MissingCell,
    NotPoised,
    SingularSystem,
    UnknownProblem,
)
from .geometry import equiangular_basis, halton_direction, householder_matrix, rotate_basis
from .models import QuadraticModel, SampleSet, fit_quadratic, model_minimizer, simplex_gradient
from .poll import BoxDomain, Evaluator, poll_step
from .problems import NoiseKind, NoisyVariant, make_problem, psi, random_start
from .solver import RunTrace, SolverParams, Termination, bcscg_ds

__version__ = "0.1.0"

__all__ = [
    "BCSCGError", "BoxDomain", "BudgetExhausted", "DegenerateReflection",
    "DegenerateTheta", "Evaluator", "IncompatibleDimension", "InfeasibleBudget",
    "InfeasibleStart", "MissingCell", "NoiseKind", "NoisyVariant", "NotPoised",
    "ProfileTable", "QuadraticModel", "RunRecord", "RunTrace", "SampleSet",
    "SingularSystem", "SolverParams", "Termination", "UnknownProblem",
    "bcscg_ds", "convergence_test", "equiangular_basis", "fit_quadratic",
    "halton_direction", "householder_matrix", "load_records", "make_problem",
    "model_minimizer", "performance_profile", "performance_ratio", "poll_step",
    "progress_curve", "psi", "random_start", "rotate_basis", "run_cell",
    "run_experiment", "simplex_gradient",
]
