"""BCSCG-DS driver: alternates the poll step with the model / simplex
gradient / vicinity / scaled-conjugate-gradient search step."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .exceptions import BudgetExhausted, InfeasibleBudget, InfeasibleStart
from .geometry import DirectionBasis, HaltonCursor, equiangular_basis
from .poll import BoxDomain, Evaluator, poll_step
from .search import (
    ScgMemory,
    default_model_points,
    quadratic_model_step,
    scg_step,
    simplex_gradient_probe,
    vicinity_search,
)

_log = logging.getLogger(__name__)


@dataclass
class SolverParams:
    """Tuning constants.

    ``initial_radius`` overrides ``initial_radius_fraction * min(u - l)``
    when given; ``budget`` overrides ``budget_multiplier * (n + 1)``.
    ``max_model_points`` caps the poll points fed to the quadratic model.
    """

    rho: float = 0.25
    tau_l: float = 2.0
    tau_u: float = 2.0
    eps: float = 1e-6
    eps2: float = 0.01
    vicinity_count_fraction: float = 0.1
    initial_radius_fraction: float = 0.1
    budget_multiplier: int = 40
    brent_max_iter: int = 20
    brent_tol: float = 1e-5
    initial_radius: float | None = None
    budget: int | None = None
    max_model_points: int | None = None

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.tau_l <= 1.0 or self.tau_u <= 1.0:
            raise ValueError("tau_l and tau_u must exceed 1")
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if not 0.0 < self.eps2 < 1.0:
            raise ValueError("eps2 must lie in (0, 1)")

    def evaluation_budget(self, n: int) -> int:
        if self.budget is not None:
            return int(self.budget)
        return int(self.budget_multiplier) * (n + 1)

    def vicinity_count(self, n: int) -> int:
        return int(math.floor(self.vicinity_count_fraction * n))

    def radius0(self, box: BoxDomain) -> float:
        if self.initial_radius is not None:
            return float(self.initial_radius)
        return self.initial_radius_fraction * float(np.min(box.widths))

    def to_dict(self) -> dict:
        return asdict(self)


class Termination(enum.Enum):
    BUDGET = "Budget"
    STATIONARY = "Stationary"


@dataclass
class SolverState:
    x_k: np.ndarray
    f_k: float
    r_k: float
    delta_p: float
    basis: DirectionBasis
    reference: DirectionBasis
    cursor: HaltonCursor
    evaluator: Evaluator
    scg_memory: ScgMemory = field(default_factory=ScgMemory)
    iteration: int = 0
    rotations: int = 0

    @property
    def evaluations_used(self) -> int:
        return self.evaluator.used


@dataclass
class RunTrace:
    """Outcome of one run; ``best_history`` has one entry per evaluation."""

    best_history: list[tuple[int, float]]
    final_point: np.ndarray
    final_value: float
    termination: Termination
    evaluations_used: int
    iterations: int
    rotations: int


def update_poll_parameters(delta_p: float, step_length: float, tau_u: float) -> float:
    """Expand the poll parameter after a long search step.

    Both tests compare against the incoming ``delta_p``; when both fire the
    second assignment wins.
    """
    updated = delta_p
    if step_length > delta_p:
        updated = step_length
    if step_length > 2.0 * delta_p:
        updated = tau_u * delta_p
    return updated


def search_step(state: SolverState, outcome, params: SolverParams):
    """Run the search phase after a successful poll; return the new best."""
    ev = state.evaluator
    n = state.x_k.size
    x_b, f_b = outcome.best_point, outcome.best_value
    candidates = list(outcome.trial_set[outcome.last_round])
    gradient = None
    if outcome.last_round_feasible:
        improved = quadratic_model_step(
            state.x_k,
            state.f_k,
            outcome.trial_set,
            ev,
            f_b,
            max_points=params.max_model_points or default_model_points(n),
            brent_max_iter=params.brent_max_iter,
            brent_tol=params.brent_tol,
        )
        if improved is not None:
            x_b, f_b = improved
        gradient, probe = simplex_gradient_probe(
            state.x_k, state.f_k, state.r_k, ev, params.eps2
        )
        if probe is not None:
            candidates.append(probe)
            if probe[1] < f_b:
                x_b, f_b = probe
    x_b, f_b = vicinity_search(
        state.x_k, state.r_k, candidates, x_b, f_b, params.vicinity_count(n), ev
    )
    x_b, f_b, state.scg_memory, step = scg_step(
        state.x_k,
        x_b,
        f_b,
        gradient,
        state.scg_memory,
        ev,
        brent_max_iter=params.brent_max_iter,
        brent_tol=params.brent_tol,
    )
    return x_b, f_b, step


def bcscg_ds(
    objective: Callable[[np.ndarray], float],
    x0,
    box: BoxDomain,
    params: SolverParams | None = None,
) -> RunTrace:
    """Minimize ``objective`` over ``box`` starting from ``x0``.

    Parameters
    ----------
    objective : callable
        Black-box function of a 1-D array.
    x0 : array_like
        Feasible starting point.
    box : BoxDomain
        Bound constraints.
    params : SolverParams, optional
        Defaults to :class:`SolverParams()`.

    Returns
    -------
    RunTrace
        Terminates with ``Stationary`` when the poll radius falls to
        ``params.eps`` and ``Budget`` when evaluations run out.

    Raises
    ------
    InfeasibleStart
        If ``x0`` is outside ``box``.
    InfeasibleBudget
        If the budget cannot cover one poll round.
    """
    params = params or SolverParams()
    x0 = np.asarray(x0, dtype=float).copy()
    n = box.dimension
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},)")
    if not box.contains(x0):
        raise InfeasibleStart("starting point lies outside the box")
    budget = params.evaluation_budget(n)
    if budget < n + 1:
        raise InfeasibleBudget(f"budget {budget} is below n + 1 = {n + 1}")

    ev = Evaluator(objective, box, budget)
    reference = equiangular_basis(n)
    r0 = params.radius0(box)
    state = SolverState(
        x_k=x0,
        f_k=ev(x0),
        r_k=r0,
        delta_p=r0,
        basis=reference,
        reference=reference,
        cursor=HaltonCursor(n),
        evaluator=ev,
    )
    termination = Termination.BUDGET
    try:
        while True:
            outcome = poll_step(
                state.x_k,
                state.f_k,
                state.r_k,
                state.delta_p,
                ev,
                state.basis,
                state.reference,
                state.cursor,
                rho=params.rho,
                tau_l=params.tau_l,
                eps=params.eps,
            )
            state.r_k = outcome.radius
            state.delta_p = outcome.poll_parameter
            state.basis = outcome.basis
            state.rotations += outcome.rotations
            if not outcome.success:
                termination = Termination.STATIONARY
                break
            x_b, f_b, step = search_step(state, outcome, params)
            state.delta_p = update_poll_parameters(state.delta_p, step, params.tau_u)
            state.x_k, state.f_k = np.asarray(x_b, dtype=float), float(f_b)
            state.iteration += 1
            _log.debug(
                "iter %d f=%.6g r=%.3g dp=%.3g evals=%d",
                state.iteration, state.f_k, state.r_k, state.delta_p, ev.used,
            )
    except BudgetExhausted:
        termination = Termination.BUDGET

    return RunTrace(
        best_history=list(ev.history),
        final_point=ev.best_point.copy(),
        final_value=float(ev.best_value),
        termination=termination,
        evaluations_used=ev.used,
        iterations=state.iteration,
        rotations=state.rotations,
    )
