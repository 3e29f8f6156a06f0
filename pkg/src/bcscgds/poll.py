"""Barrier-guarded evaluation and the poll step."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import BudgetExhausted
from .geometry import DirectionBasis, HaltonCursor, halton_direction, rotate_basis

_log = logging.getLogger(__name__)

#: Value assigned to points outside the box (extreme barrier).
BARRIER_VALUE = 1.79e308


@dataclass(frozen=True)
class BoxDomain:
    """Closed box ``{x : lower <= x <= upper}``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be vectors of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("box bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError("box requires lower < upper in every coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, n: int, low: float = -50.0, high: float = 50.0) -> "BoxDomain":
        return cls(np.full(n, low), np.full(n, high))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def clip(self, x) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


class Evaluator:
    """Objective wrapper enforcing the extreme barrier, budget and cache.

    Infeasible points get :data:`BARRIER_VALUE` and cost nothing. Feasible
    points are looked up in an exact-match cache first; only cache misses
    consume budget. The best value seen so far is appended to ``history``
    after every true evaluation.

    Parameters
    ----------
    objective : callable
        Maps a 1-D array to a float.
    box : BoxDomain
        Feasible region.
    budget : int
        Maximum number of true evaluations.
    """

    def __init__(self, objective: Callable[[np.ndarray], float], box: BoxDomain, budget: int):
        self.objective = objective
        self.box = box
        self.budget = int(budget)
        self.used = 0
        self.history: list[tuple[int, float]] = []
        self.best_point: np.ndarray | None = None
        self.best_value = np.inf
        self._cache: dict[bytes, float] = {}
        n = box.dimension
        self._points = np.empty((max(self.budget, 0), n))
        self._values = np.empty(max(self.budget, 0))

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, x) -> float:
        return self.evaluate_with_barrier(x)

    def evaluate_with_barrier(self, x) -> float:
        # "+ 0.0" folds -0.0 into 0.0 so cache keys match.
        x = np.asarray(x, dtype=float) + 0.0
        if not self.box.contains(x):
            return BARRIER_VALUE
        key = x.tobytes()
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if self.used >= self.budget:
            raise BudgetExhausted()
        value = float(self.objective(x))
        self._points[self.used] = x
        self._values[self.used] = value
        self.used += 1
        self._cache[key] = value
        if value < self.best_value:
            self.best_value = value
            self.best_point = x.copy()
        self.history.append((self.used, self.best_value))
        return value

    def lookup(self, x) -> float | None:
        """Cached value at ``x`` or None, without evaluating."""
        x = np.asarray(x, dtype=float) + 0.0
        return self._cache.get(x.tobytes())

    @property
    def points(self) -> np.ndarray:
        """All truly evaluated (hence feasible) points, in evaluation order."""
        return self._points[: self.used]

    @property
    def values(self) -> np.ndarray:
        return self._values[: self.used]

    def neighbors(self, center, radius: float):
        """Cached points within ``radius`` of ``center``, center excluded."""
        pts = self.points
        if pts.shape[0] == 0:
            return pts, self.values
        dist = np.linalg.norm(pts - center, axis=1)
        mask = (dist <= radius) & (dist > 0.0)
        return pts[mask], self.values[mask]


def sufficient_decrease(f_new: float, f_incumbent: float, r: float, rho: float) -> bool:
    """True when ``f_new < f_incumbent - rho * r**2``."""
    return f_new < f_incumbent - rho * r * r


class PollStatus(enum.Enum):
    SUCCESS = "Success"
    EXHAUSTED = "Exhausted"


@dataclass
class PollOutcome:
    """Result of one poll step.

    ``trial_set`` holds every (point, value) pair evaluated during the step,
    across all rotation rounds; ``last_round`` indexes the pairs of the final
    round within it.
    """

    status: PollStatus
    best_point: np.ndarray | None
    best_value: float
    radius: float
    poll_parameter: float
    basis: DirectionBasis
    trial_set: list[tuple[np.ndarray, float]] = field(default_factory=list)
    last_round: slice = slice(0, 0)
    rotations: int = 0

    @property
    def success(self) -> bool:
        return self.status is PollStatus.SUCCESS

    @property
    def last_round_feasible(self) -> bool:
        return all(v < BARRIER_VALUE for _, v in self.trial_set[self.last_round])


def poll_step(
    x_k: np.ndarray,
    f_k: float,
    radius: float,
    delta_p: float,
    evaluator: Evaluator,
    basis: DirectionBasis,
    reference: DirectionBasis,
    cursor: HaltonCursor,
    *,
    rho: float = 0.25,
    tau_l: float = 2.0,
    eps: float = 1e-6,
) -> PollOutcome:
    """Poll ``n + 1`` points on the sphere of radius ``radius`` about ``x_k``.

    On failure a Halton direction is drawn, ``reference`` is rotated onto it
    and both the radius and the poll parameter shrink by ``tau_l``. The loop
    ends on the first round with sufficient decrease or when the radius drops
    to ``eps``.

    Parameters
    ----------
    basis : DirectionBasis
        Directions used for the first round.
    reference : DirectionBasis
        Unrotated equiangular set; every rotation starts from it.

    Raises
    ------
    BudgetExhausted
        Carries the partial ``trial_set``.
    """
    x_k = np.asarray(x_k, dtype=float)
    r0, dp0 = float(radius), float(delta_p)
    r, dp = r0, dp0
    trial_set: list[tuple[np.ndarray, float]] = []
    failures = 0
    while r > eps:
        start = len(trial_set)
        points = x_k + r * basis.directions
        values = np.empty(len(points))
        for i, point in enumerate(points):
            try:
                values[i] = evaluator(point)
            except BudgetExhausted as exc:
                exc.trial_set = trial_set
                raise
            trial_set.append((point, float(values[i])))
        best = int(np.argmin(values))
        if sufficient_decrease(values[best], f_k, r, rho):
            return PollOutcome(
                PollStatus.SUCCESS,
                points[best].copy(),
                float(values[best]),
                r,
                dp,
                basis,
                trial_set,
                slice(start, len(trial_set)),
                failures,
            )
        basis = rotate_basis(reference, halton_direction(cursor))
        failures += 1
        # Divide from the entry values so the k-th radius is exactly r0 / tau_l**k.
        scale = tau_l**failures
        r, dp = r0 / scale, dp0 / scale
    _log.debug("poll exhausted after %d rotations, radius %.3g", failures, r)
    return PollOutcome(
        PollStatus.EXHAUSTED,
        None,
        float(f_k),
        r,
        dp,
        basis,
        trial_set,
        slice(len(trial_set), len(trial_set)),
        failures,
    )
