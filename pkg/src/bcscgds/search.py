"""Search-step machinery: model descent, vicinity search, simplex-gradient
probe and scaled conjugate gradient directions with a box-restricted Brent
line search."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DegenerateTheta, NotPoised, SingularSystem
from .models import SampleSet, fit_quadratic, model_minimizer, simplex_gradient
from .poll import BARRIER_VALUE, BoxDomain, Evaluator

_log = logging.getLogger(__name__)

_TINY = 1e-14


@dataclass
class ScgMemory:
    """Previous simplex gradient and the step taken from that iterate."""

    prev_gradient: np.ndarray | None = None
    prev_step: np.ndarray | None = None

    def __post_init__(self):
        if (self.prev_gradient is None) != (self.prev_step is None):
            raise ValueError("prev_gradient and prev_step must be set together")

    @property
    def empty(self) -> bool:
        return self.prev_gradient is None


@dataclass
class LineSearchResult:
    step_length: float
    point: np.ndarray
    value: float


def max_feasible_step(x, d, box: BoxDomain) -> float:
    """Largest ``alpha >= 0`` keeping ``x + alpha * d`` inside ``box``."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if not np.any(d):
        raise ValueError("direction must be nonzero")
    with np.errstate(divide="ignore", invalid="ignore"):
        limits = np.where(
            d > 0, (box.upper - x) / d, np.where(d < 0, (box.lower - x) / d, np.inf)
        )
    return max(0.0, float(np.min(limits)))


def brent_line_search(
    evaluator: Evaluator,
    x,
    d,
    box: BoxDomain,
    max_iter: int = 20,
    tol: float = 1e-5,
) -> LineSearchResult:
    """Minimize ``f(x + alpha d)`` for ``alpha`` in ``[0, max_feasible_step]``.

    The far end of the bracket is evaluated first, then bounded Brent
    (golden section with parabolic steps) runs for at most ``max_iter``
    evaluations. The best evaluated point is returned; ``alpha = 0`` and the
    value at ``x`` when nothing improves on it.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    f0 = evaluator.lookup(x)
    if f0 is None:
        f0 = evaluator(x)
    best = LineSearchResult(0.0, x.copy(), f0)
    amax = max_feasible_step(x, d, box)
    if amax <= 0.0:
        return best

    def phi(alpha):
        nonlocal best
        point = box.clip(x + alpha * d)
        value = evaluator(point)
        if value < best.value:
            best = LineSearchResult(float(alpha), point, value)
        return value

    phi(amax)
    minimize_scalar(
        phi,
        bounds=(0.0, amax),
        method="bounded",
        options={"xatol": tol, "maxiter": max_iter},
    )
    return best


def _model_samples(x_k, f_k, trial_set, max_points):
    seen = {np.asarray(x_k, dtype=float).tobytes()}
    pts, vals = [], []
    for point, value in reversed(trial_set):
        key = point.tobytes()
        if value >= BARRIER_VALUE or key in seen:
            continue
        seen.add(key)
        pts.append(point)
        vals.append(value)
        if len(pts) == max_points:
            break
    return pts, vals


def quadratic_model_step(
    x_k,
    f_k: float,
    trial_set,
    evaluator: Evaluator,
    f_best: float,
    *,
    max_points: int | None = None,
    brent_max_iter: int = 20,
    brent_tol: float = 1e-5,
):
    """Try the minimizer of a quadratic fitted to the poll points.

    The model interpolates ``x_k`` and the most recent finite-valued trial
    points. When its Hessian is positive definite the minimizer is evaluated
    directly if feasible, otherwise a line search runs toward it.

    Returns
    -------
    tuple or None
        ``(point, value)`` if it beats ``f_best``.
    """
    x_k = np.asarray(x_k, dtype=float)
    n = x_k.size
    if max_points is None:
        max_points = default_model_points(n)
    pts, vals = _model_samples(x_k, f_k, trial_set, max_points)
    if len(pts) < n + 1:
        return None
    try:
        model = fit_quadratic(SampleSet(x_k, np.array(pts), np.array([f_k] + vals)))
    except (SingularSystem, ValueError) as exc:
        _log.debug("model step skipped: %s", exc)
        return None
    y = model_minimizer(model)
    if y is None:
        return None
    box = evaluator.box
    if box.contains(y):
        point, value = y, evaluator(y)
    else:
        direction = y - x_k
        if not np.any(direction):
            return None
        res = brent_line_search(evaluator, x_k, direction, box, brent_max_iter, brent_tol)
        point, value = res.point, res.value
    if value < f_best:
        return point, value
    return None


def default_model_points(n: int) -> int:
    """Trial points fed to the model besides the center."""
    return min((n + 1) * (n + 2) // 2 - 1, 2 * (n + 1))


def vicinity_search(
    x_k,
    radius: float,
    candidates,
    x_best,
    f_best: float,
    count: int,
    evaluator: Evaluator,
):
    """Probe toward midpoints between the best point and the best candidates.

    The ``count`` lowest-valued candidates are averaged with ``x_best``; each
    average fixes a direction from ``x_k`` and the point at distance
    ``radius`` along it is evaluated.

    Returns
    -------
    tuple
        Updated ``(x_best, f_best)``.
    """
    x_k = np.asarray(x_k, dtype=float)
    if count <= 0:
        return x_best, f_best
    chosen = sorted(candidates, key=lambda pv: pv[1])[:count]
    for point, _ in chosen:
        offset = 0.5 * (x_best + point) - x_k
        norm = np.linalg.norm(offset)
        if norm <= _TINY:
            continue
        trial = x_k + radius * offset / norm
        value = evaluator(trial)
        if value < f_best:
            x_best, f_best = trial, value
    return x_best, f_best


def simplex_gradient_probe(x_k, f_k: float, radius: float, evaluator: Evaluator, eps2: float = 0.01):
    """Simplex gradient from cached points near ``x_k`` plus one probe.

    Uses every cached point within ``radius * (1 + eps2)`` of ``x_k``. The
    probe is evaluated at distance ``radius`` along the negative gradient.

    Returns
    -------
    gradient : numpy.ndarray or None
        None when there are no neighbors or they are not poised.
    probe : tuple or None
        ``(point, value)``; None when the gradient is unavailable or ~0.
    """
    x_k = np.asarray(x_k, dtype=float)
    pts, vals = evaluator.neighbors(x_k, radius * (1.0 + eps2))
    if len(pts) == 0:
        return None, None
    try:
        g = simplex_gradient(x_k, pts, np.concatenate([[f_k], vals]))
    except NotPoised:
        return None, None
    gnorm = np.linalg.norm(g)
    if gnorm <= _TINY:
        return g, None
    x_g = x_k - radius * g / gnorm
    return g, (x_g, evaluator(x_g))


def scg_theta(x_best, x_k, gradient) -> np.ndarray:
    """Rank-one scaling matrix ``-s s^T / (s^T g)`` with ``s = x_best - x_k``."""
    s = np.asarray(x_best, dtype=float) - np.asarray(x_k, dtype=float)
    sg = float(s @ gradient)
    if not np.any(s) or abs(sg) <= _TINY:
        raise DegenerateTheta("step is zero or orthogonal to the gradient")
    return -np.outer(s, s) / sg


def scg_direction(theta: np.ndarray, g_new, memory: ScgMemory) -> np.ndarray:
    """Scaled conjugate gradient direction ``-theta g + beta s``.

    With ``y = g_new - g_prev`` and ``s`` the previous step,
    ``beta = (theta y - s)^T g_new / (y^T s)``. Restarts with ``-g_new`` when
    there is no memory or ``|y^T s|`` vanishes.
    """
    g_new = np.asarray(g_new, dtype=float)
    if memory.empty:
        return -g_new
    y = g_new - memory.prev_gradient
    s = memory.prev_step
    ys = float(y @ s)
    if abs(ys) <= _TINY:
        return -g_new
    beta = float((theta @ y - s) @ g_new) / ys
    return -theta @ g_new + beta * s


def scg_step(
    x_k,
    x_best,
    f_best: float,
    gradient,
    memory: ScgMemory,
    evaluator: Evaluator,
    *,
    brent_max_iter: int = 20,
    brent_tol: float = 1e-5,
):
    """Line search from ``x_k`` along the SCG direction or toward ``x_best``.

    The SCG direction is used when it is a descent direction for the simplex
    gradient; otherwise, or when no gradient or scaling matrix is available,
    the search runs along ``x_best - x_k``.

    Returns
    -------
    tuple
        ``(x_best, f_best, memory, step_length)`` where ``step_length`` is
        the distance from ``x_k`` to the line-search point when that point
        became the new best, else 0.
    """
    x_k = np.asarray(x_k, dtype=float)
    x_best = np.asarray(x_best, dtype=float)
    greedy = x_best - x_k
    direction = None
    if gradient is not None:
        d = None
        if memory.empty:
            d = -np.asarray(gradient, dtype=float)
        else:
            try:
                d = scg_direction(scg_theta(x_best, x_k, gradient), gradient, memory)
            except DegenerateTheta:
                pass
        if d is not None and float(d @ gradient) < 0.0:
            direction = d
    if direction is None and np.any(greedy):
        direction = greedy
    step_length = 0.0
    if direction is not None:
        res = brent_line_search(
            evaluator, x_k, direction, evaluator.box, brent_max_iter, brent_tol
        )
        if res.value < f_best:
            x_best, f_best = res.point, res.value
            step_length = float(np.linalg.norm(res.point - x_k))
    if gradient is None:
        new_memory = ScgMemory()
    else:
        new_memory = ScgMemory(np.asarray(gradient, dtype=float), x_best - x_k)
    return x_best, f_best, new_memory, step_length
