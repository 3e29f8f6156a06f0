"""Quadratic interpolation models and simplex gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import NotPoised, SingularSystem

_RANK_TOL = 1e-12
_POISED_TOL = 1e-10


def basis_size(n: int) -> int:
    """Number of monomials in the full quadratic basis of ``R^n``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return (n + 1) * (n + 2) // 2


def quadratic_features(Z: np.ndarray) -> np.ndarray:
    """Rows ``[z_1**2/2, ..., z_n**2/2, z_1 z_2, z_1 z_3, ..., z_{n-1} z_n]``."""
    Z = np.atleast_2d(Z)
    iu, ju = np.triu_indices(Z.shape[1], k=1)
    return np.hstack([0.5 * Z * Z, Z[:, iu] * Z[:, ju]])


def linear_features(Z: np.ndarray) -> np.ndarray:
    Z = np.atleast_2d(Z)
    return np.hstack([np.ones((Z.shape[0], 1)), Z])


@dataclass
class SampleSet:
    """Interpolation points ``center, points[0], ..., points[p-1]``.

    ``values`` holds ``f(center)`` first, then the point values.
    """

    center: np.ndarray
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        if self.values.size != self.points.shape[0] + 1:
            raise ValueError("need one value for the center plus one per point")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")
        allp = self.all_points
        sq = np.sum(allp * allp, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * allp @ allp.T
        np.fill_diagonal(d2, np.inf)
        # Exact check on the closest candidate pair; the Gram formula only
        # locates it.
        i, j = np.unravel_index(np.argmin(d2), d2.shape)
        if allp.shape[0] > 1 and np.linalg.norm(allp[i] - allp[j]) <= 1e-14:
            raise ValueError("sample points must be distinct")

    @property
    def all_points(self) -> np.ndarray:
        return np.vstack([self.center, self.points])

    @property
    def dimension(self) -> int:
        return self.center.size


@dataclass
class QuadraticModel:
    """``m(x) = alpha_L . [1, w] + alpha_Q . phi_Q(w)`` with ``w = x - center``.

    ``alpha_Q`` lists the ``w_i**2/2`` coefficients first, then the cross
    terms ``w_i w_j`` for ``i < j`` in row-major order.
    """

    alpha_L: np.ndarray
    alpha_Q: np.ndarray
    center: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.alpha_L = np.asarray(self.alpha_L, dtype=float)
        self.alpha_Q = np.asarray(self.alpha_Q, dtype=float)
        n = self.alpha_L.size - 1
        if self.alpha_Q.size != n * (n + 1) // 2:
            raise ValueError("alpha_Q size does not match alpha_L")
        self.center = np.zeros(n) if self.center is None else np.asarray(self.center, dtype=float)

    @property
    def dimension(self) -> int:
        return self.alpha_L.size - 1

    @property
    def hessian(self) -> np.ndarray:
        n = self.dimension
        H = np.diag(self.alpha_Q[:n])
        iu, ju = np.triu_indices(n, k=1)
        H[iu, ju] = self.alpha_Q[n:]
        H[ju, iu] = self.alpha_Q[n:]
        return H

    def __call__(self, x) -> float:
        w = np.atleast_2d(np.asarray(x, dtype=float) - self.center)
        out = linear_features(w) @ self.alpha_L + quadratic_features(w) @ self.alpha_Q
        return float(out[0]) if out.size == 1 else out


def model_gradient_hessian(model: QuadraticModel, x):
    """Return ``(value, gradient, hessian)`` of ``model`` at ``x``."""
    H = model.hessian
    w = np.asarray(x, dtype=float) - model.center
    g = model.alpha_L[1:] + H @ w
    return model(x), g, H


def model_minimizer(model: QuadraticModel) -> np.ndarray | None:
    """Unique minimizer of the model, or None when the Hessian is not PD."""
    try:
        factor = scipy.linalg.cho_factor(model.hessian)
    except np.linalg.LinAlgError:
        return None
    step = scipy.linalg.cho_solve(factor, -model.alpha_L[1:])
    if not np.all(np.isfinite(step)):
        return None
    return model.center + step


def _check_rank(singular_values, what):
    s = np.asarray(singular_values)
    if s.size == 0 or s[-1] <= _RANK_TOL * s[0]:
        raise SingularSystem(f"{what} is rank deficient")


def fit_quadratic(samples: SampleSet) -> QuadraticModel:
    """Fit a quadratic to ``samples``.

    Least squares when there are more points than monomials, interpolation
    when they match, minimum Frobenius norm interpolation otherwise. The fit
    is done in coordinates centered at ``samples.center`` and scaled by the
    sample radius; the returned model is expressed in unscaled coordinates
    relative to the center.

    Raises
    ------
    SingularSystem
        If the governing matrix is rank deficient relative to ``1e-12``.
    """
    n = samples.dimension
    W = samples.all_points - samples.center
    scale = float(np.max(np.linalg.norm(W, axis=1)))
    if scale == 0.0:
        raise SingularSystem("all samples coincide with the center")
    Z = W / scale
    f = samples.values
    npts, nq = Z.shape[0], basis_size(n)
    if npts >= nq:
        M = np.hstack([linear_features(Z), quadratic_features(Z)])
        _check_rank(np.linalg.svd(M, compute_uv=False), "interpolation matrix")
        if npts == nq:
            alpha = scipy.linalg.solve(M, f)
        else:
            alpha = np.linalg.lstsq(M, f, rcond=None)[0]
        aL, aQ = alpha[: n + 1], alpha[n + 1 :]
    else:
        aL, aQ = _mfn_coefficients(Z, f)
    aL = aL.copy()
    aL[1:] /= scale
    return QuadraticModel(aL, aQ / scale**2, samples.center.copy())


def _mfn_coefficients(Z: np.ndarray, f: np.ndarray):
    npts, n = Z.shape
    G = Z @ Z.T
    S = Z * Z
    # phi_Q(a) . phi_Q(b) = (a.b)^2 / 2 - sum_i a_i^2 b_i^2 / 4
    MQMQt = 0.5 * G * G - 0.25 * (S @ S.T)
    ML = linear_features(Z)
    F = np.zeros((npts + n + 1, npts + n + 1))
    F[:npts, :npts] = MQMQt
    F[:npts, npts:] = ML
    F[npts:, :npts] = ML.T
    _check_rank(np.linalg.svd(F, compute_uv=False), "minimum Frobenius norm system")
    rhs = np.concatenate([f, np.zeros(n + 1)])
    sol = scipy.linalg.solve(F, rhs, assume_a="sym")
    mu, aL = sol[:npts], sol[npts:]
    # alpha_Q = M_Q^T mu without forming M_Q.
    squares = 0.5 * (S.T @ mu)
    C = (Z * mu[:, None]).T @ Z
    iu, ju = np.triu_indices(n, k=1)
    return aL, np.concatenate([squares, C[iu, ju]])


def simplex_gradient(center, neighbors, values) -> np.ndarray:
    """Simplex gradient at ``center``.

    Solves ``(y_i - center) . g = f(y_i) - f(center)``: exactly when there
    are ``n`` neighbors, in the least-squares sense when there are more, and
    for the minimum-norm solution when there are fewer.

    ``values`` is ``[f(center), f(y_1), ..., f(y_q)]``.

    Raises
    ------
    NotPoised
        If the displacement matrix does not have rank ``min(n, q)``.
    """
    center = np.asarray(center, dtype=float)
    Y = np.atleast_2d(np.asarray(neighbors, dtype=float)) - center
    values = np.asarray(values, dtype=float)
    q, n = Y.shape
    if q == 0 or Y.size == 0:
        raise NotPoised("no neighbors")
    b = values[1:] - values[0]
    g, _, rank, s = np.linalg.lstsq(Y, b, rcond=None)
    if s[0] == 0.0 or np.sum(s > _POISED_TOL * s[0]) < min(n, q):
        raise NotPoised(f"displacement matrix has rank {rank} < {min(n, q)}")
    return g
