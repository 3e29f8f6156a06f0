"""Least-squares test problems with smooth and piecewise-smooth noisy
variants.

Residual definitions follow standard sparse nonlinear least-squares test
collections. Each problem maps a point to its residual vector
``(f_1(x), ..., f_m(x))``; the objective is built from the residuals by
:func:`evaluate`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import IncompatibleDimension, UnknownProblem
from .poll import BoxDomain

BOX_LOW, BOX_HIGH = -50.0, 50.0


def chebyshev_u3(alpha):
    """Cubic Chebyshev polynomial ``alpha (4 alpha^2 - 3)``."""
    return alpha * (4.0 * alpha * alpha - 3.0)


def psi(x) -> float:
    """Deterministic oscillatory noise in ``[-1, 1]``."""
    x = np.asarray(x, dtype=float)
    base = 0.9 * np.sin(100.0 * np.sum(np.abs(x))) * np.cos(
        100.0 * np.max(np.abs(x), initial=0.0)
    ) + 0.1 * np.cos(np.linalg.norm(x))
    return float(chebyshev_u3(base))


# ---------------------------------------------------------------- residuals


def _shift_pad(x):
    """Return ``(x_{i-1}, x_{i+1})`` with zero boundary values."""
    prev = np.concatenate([[0.0], x[:-1]])
    nxt = np.concatenate([x[1:], [0.0]])
    return prev, nxt


def chained_rosenbrock(x):
    a, b = x[:-1], x[1:]
    out = np.empty(2 * a.size)
    out[0::2] = 10.0 * (a * a - b)
    out[1::2] = a - 1.0
    return out


def broyden_tridiagonal(x):
    prev, nxt = _shift_pad(x)
    return (3.0 - 2.0 * x) * x - prev - 2.0 * nxt + 1.0


def gen_broyden_tridiagonal(x):
    prev, nxt = _shift_pad(x)
    return (3.0 - 2.0 * x) * x - prev - nxt + 1.0


def singular_broyden(x):
    return broyden_tridiagonal(x) ** 2


def chained_wood(x):
    # Blocks start at every odd 1-based index i = 1, 3, ..., n - 3.
    a, b, c, d = x[0:-3:2], x[1:-2:2], x[2:-1:2], x[3::2]
    out = np.empty(6 * a.size)
    out[0::6] = 10.0 * (a * a - b)
    out[1::6] = a - 1.0
    out[2::6] = np.sqrt(90.0) * (c * c - d)
    out[3::6] = c - 1.0
    out[4::6] = np.sqrt(10.0) * (b + d - 2.0)
    out[5::6] = (b - d) / np.sqrt(10.0)
    return out


def discrete_boundary_value(x):
    n = x.size
    h = 1.0 / (n + 1)
    t = h * np.arange(1, n + 1)
    prev, nxt = _shift_pad(x)
    return 2.0 * x - prev - nxt + 0.5 * h * h * (x + t + 1.0) ** 3


def chained_freudenstein_roth(x):
    a, b = x[:-1], x[1:]
    out = np.empty(2 * a.size)
    out[0::2] = -13.0 + a + ((5.0 - b) * b - 2.0) * b
    out[1::2] = -29.0 + a + ((1.0 + b) * b - 14.0) * b
    return out


def broyden_banded(x):
    n = x.size
    w = x * (1.0 + x)
    band = np.zeros(n)
    # Band j in [i-5, i+1], j != i (0-based), clipped to [0, n-1].
    # Shifted sums keep each term exactly local (no cumulative roundoff).
    for k in (-5, -4, -3, -2, -1, 1):
        if k < 0 and -k < n:
            band[-k:] += w[: n + k]
        elif k > 0 and k < n:
            band[: n - k] += w[k:]
    return x * (2.0 + 5.0 * x * x) + 1.0 - band


@dataclass(frozen=True)
class _CatalogEntry:
    residuals: Callable[[np.ndarray], np.ndarray]
    term_count: Callable[[int], int]
    valid: Callable[[int], bool]
    requirement: str


CATALOG: dict[str, _CatalogEntry] = {
    "chained_rosenbrock": _CatalogEntry(
        chained_rosenbrock, lambda n: 2 * (n - 1), lambda n: n >= 2, "n >= 2"
    ),
    "broyden_tridiagonal": _CatalogEntry(
        broyden_tridiagonal, lambda n: n, lambda n: n >= 1, "n >= 1"
    ),
    "gen_broyden_tridiagonal": _CatalogEntry(
        gen_broyden_tridiagonal, lambda n: n, lambda n: n >= 1, "n >= 1"
    ),
    "chained_wood": _CatalogEntry(
        chained_wood,
        lambda n: 3 * (n - 2),
        lambda n: n >= 4 and n % 2 == 0,
        "even n >= 4",
    ),
    "discrete_boundary_value": _CatalogEntry(
        discrete_boundary_value, lambda n: n, lambda n: n >= 1, "n >= 1"
    ),
    "chained_freudenstein_roth": _CatalogEntry(
        chained_freudenstein_roth, lambda n: 2 * (n - 1), lambda n: n >= 2, "n >= 2"
    ),
    "singular_broyden": _CatalogEntry(
        singular_broyden, lambda n: n, lambda n: n >= 1, "n >= 1"
    ),
    "broyden_banded": _CatalogEntry(
        broyden_banded, lambda n: n, lambda n: n >= 1, "n >= 1"
    ),
}


def register_problem(name, residuals, term_count, valid=lambda n: n >= 1, requirement="n >= 1"):
    """Add a residual function to the catalog under ``name``."""
    CATALOG[name] = _CatalogEntry(residuals, term_count, valid, requirement)


@dataclass(frozen=True)
class LeastSquaresProblem:
    name: str
    dimension: int
    term_count: int
    terms: Callable[[np.ndarray], np.ndarray]
    box: BoxDomain


def make_problem(name: str, n: int) -> LeastSquaresProblem:
    """Catalog problem ``name`` in dimension ``n`` on the box ``[-50, 50]^n``.

    Raises
    ------
    UnknownProblem
        If ``name`` is not registered.
    IncompatibleDimension
        If ``n`` violates the problem's structure.
    """
    try:
        entry = CATALOG[name]
    except KeyError:
        raise UnknownProblem(name) from None
    if not entry.valid(n):
        raise IncompatibleDimension(f"{name} requires {entry.requirement}, got n={n}")
    return LeastSquaresProblem(
        name, n, entry.term_count(n), entry.residuals, BoxDomain.uniform(n, BOX_LOW, BOX_HIGH)
    )


class NoiseKind(str, enum.Enum):
    SMOOTH = "smooth"
    PIECEWISE = "piecewise"


@dataclass(frozen=True)
class NoisyVariant:
    """Noisy objective ``(1 + eps_f psi(x)) * aggregate(f_i(x))``.

    The aggregate is the sum of squares for :attr:`NoiseKind.SMOOTH` and the
    sum of absolute values for :attr:`NoiseKind.PIECEWISE`.
    """

    base: LeastSquaresProblem
    kind: NoiseKind = NoiseKind.SMOOTH
    eps_f: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.eps_f < 0:
            raise ValueError("eps_f must be nonnegative")

    @property
    def box(self) -> BoxDomain:
        return self.base.box

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def __call__(self, x) -> float:
        return evaluate(self, x)


def aggregate(terms, kind: NoiseKind) -> float:
    terms = np.asarray(terms, dtype=float)
    if NoiseKind(kind) is NoiseKind.SMOOTH:
        return float(np.dot(terms, terms))
    return float(np.sum(np.abs(terms)))


def evaluate(variant: NoisyVariant, x) -> float:
    x = np.asarray(x, dtype=float)
    clean = aggregate(variant.base.terms(x), variant.kind)
    if variant.eps_f == 0.0:
        return clean
    return (1.0 + variant.eps_f * psi(x)) * clean


def random_start(box: BoxDomain, seed: int) -> np.ndarray:
    """Uniform point in ``box`` drawn with NumPy's PCG64 seeded by ``seed``."""
    rng = np.random.default_rng(seed)
    return rng.uniform(box.lower, box.upper)
