"""Poll direction sets: equiangular minimal positive bases, Halton
directions and Householder rotations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateReflection

_REFLECTOR_TOL = 1e-12


def first_primes(count: int) -> list[int]:
    """Return the first ``count`` primes in increasing order."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def halton_value(index: int, base: int) -> float:
    """Radical inverse of ``index`` in ``base``.

    Digits are reversed with integer arithmetic so the single division at
    the end is correctly rounded.
    """
    if index < 1 or base < 2:
        raise ValueError("index must be >= 1 and base >= 2")
    numerator, denominator = 0, 1
    while index > 0:
        index, digit = divmod(index, base)
        numerator = numerator * base + digit
        denominator *= base
    return numerator / denominator


@dataclass
class HaltonCursor:
    """Position in a Halton sequence with one prime base per coordinate.

    A cursor belongs to a single solver run; ``index`` is the next sequence
    position to be drawn and only ever increases.
    """

    dimension: int
    index: int = 1
    bases: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.index < 1:
            raise ValueError("Halton index starts at 1")
        if not self.bases:
            self.bases = first_primes(self.dimension)

    def draw(self) -> np.ndarray:
        """Return the Halton point at the current index and advance."""
        point = np.array([halton_value(self.index, b) for b in self.bases])
        self.index += 1
        return point


def halton_direction(cursor: HaltonCursor) -> np.ndarray:
    """Draw a unit direction from the Halton sequence.

    The point ``h`` in the unit cube is mapped to ``2h - 1`` and normalized.
    Points that land on the cube center are skipped.
    """
    while True:
        v = 2.0 * cursor.draw() - 1.0
        norm = np.linalg.norm(v)
        if norm >= _REFLECTOR_TOL:
            return v / norm


@dataclass(frozen=True)
class DirectionBasis:
    """``n + 1`` unit directions forming a regular simplex about the origin.

    Attributes
    ----------
    directions : numpy.ndarray, shape (n + 1, n)
        One direction per row.
    """

    directions: np.ndarray

    @property
    def dimension(self) -> int:
        return self.directions.shape[1]

    def __len__(self):
        return self.directions.shape[0]


def equiangular_basis(n: int) -> DirectionBasis:
    """Vertices of a regular ``n``-simplex inscribed in the unit sphere.

    Built from the Helmert basis of the hyperplane ``sum(z) = 0`` in
    ``R^(n+1)``: vertex ``i`` is the scaled projection of ``e_i`` onto that
    basis, so pairwise dot products are ``-1/n`` and the rows sum to zero.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    helmert = np.zeros((n, n + 1))
    for k in range(1, n + 1):
        helmert[k - 1, :k] = 1.0
        helmert[k - 1, k] = -float(k)
        helmert[k - 1] /= np.sqrt(k * (k + 1.0))
    directions = np.sqrt((n + 1.0) / n) * helmert.T
    # Exact renormalization removes the last few ulps of drift for large n.
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    return DirectionBasis(directions)


def householder_matrix(d: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Householder reflection mapping unit vector ``d`` onto unit vector ``u``.

    Raises
    ------
    DegenerateReflection
        If ``||d - u|| <= 1e-12``.
    """
    d = np.asarray(d, dtype=float)
    u = np.asarray(u, dtype=float)
    v = d - u
    vv = float(v @ v)
    if np.sqrt(vv) <= _REFLECTOR_TOL:
        raise DegenerateReflection("reflector d - u vanishes")
    return np.eye(d.size) - (2.0 / vv) * np.outer(v, v)


def rotate_basis(base: DirectionBasis, u: np.ndarray) -> DirectionBasis:
    """Reflect every direction of ``base`` so the first one becomes ``u``.

    ``base`` is returned unchanged when ``u`` already equals its first
    direction.
    """
    try:
        H = householder_matrix(base.directions[0], u)
    except DegenerateReflection:
        return base
    # Rows are directions, so apply H on the right (H is symmetric).
    return DirectionBasis(base.directions @ H)
