import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcscgds.exceptions import DegenerateReflection
from bcscgds.geometry import (
    DirectionBasis,
    HaltonCursor,
    equiangular_basis,
    first_primes,
    halton_direction,
    halton_value,
    householder_matrix,
    rotate_basis,
)


def check_basis(basis, n):
    D = basis.directions
    assert D.shape == (n + 1, n)
    np.testing.assert_allclose(np.linalg.norm(D, axis=1), 1.0, atol=1e-12)
    G = D @ D.T
    off = G[~np.eye(n + 1, dtype=bool)]
    np.testing.assert_allclose(off, -1.0 / n, atol=1e-10)
    assert np.linalg.norm(D.sum(axis=0)) <= 1e-10


@pytest.mark.parametrize(
    "index, base, expected", [(1, 2, 0.5), (3, 2, 0.75), (2, 3, 2.0 / 3.0)]
)
def test_halton_value_examples(index, base, expected):
    assert halton_value(index, base) == pytest.approx(expected, abs=1e-15)


def test_halton_first_eight_base_two():
    expected = [1 / 2, 1 / 4, 3 / 4, 1 / 8, 5 / 8, 3 / 8, 7 / 8, 1 / 16]
    got = [halton_value(i, 2) for i in range(1, 9)]
    np.testing.assert_allclose(got, expected, atol=1e-15, rtol=0)


def test_halton_value_rejects_bad_domain():
    with pytest.raises(ValueError):
        halton_value(0, 2)
    with pytest.raises(ValueError):
        halton_value(1, 1)


def test_first_primes():
    assert first_primes(8) == [2, 3, 5, 7, 11, 13, 17, 19]


def test_halton_direction_skips_center_in_one_dimension():
    cursor = HaltonCursor(1)
    d = halton_direction(cursor)
    # index 1 gives h=0.5 -> v=0, skipped; index 2 gives h=0.25 -> v=-0.5
    np.testing.assert_array_equal(d, [-1.0])
    assert cursor.index == 3


def test_halton_direction_two_dimensions():
    cursor = HaltonCursor(2)
    assert cursor.bases == [2, 3]
    d = halton_direction(cursor)
    np.testing.assert_allclose(d, [0.0, -1.0], atol=1e-15)


def test_halton_cursor_never_reuses_index():
    cursor = HaltonCursor(3)
    seen = []
    for _ in range(50):
        seen.append(cursor.index)
        halton_direction(cursor)
    assert seen == sorted(set(seen))


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_halton_directions_are_unit(n):
    cursor = HaltonCursor(n)
    for _ in range(100):
        assert np.linalg.norm(halton_direction(cursor)) == pytest.approx(1.0, abs=1e-12)


def test_equiangular_basis_small_cases():
    np.testing.assert_allclose(
        np.sort(equiangular_basis(1).directions.ravel()), [-1.0, 1.0]
    )
    check_basis(equiangular_basis(2), 2)
    D5 = equiangular_basis(5).directions
    assert D5.shape == (6, 5)
    np.testing.assert_allclose(D5 @ D5[0], [1.0] + [-0.2] * 5, atol=1e-12)


@pytest.mark.parametrize("n", range(1, 51))
def test_equiangular_basis_invariants(n):
    check_basis(equiangular_basis(n), n)


def test_householder_swaps_axes():
    H = householder_matrix(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    np.testing.assert_allclose(H, [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)


def test_householder_degenerate():
    with pytest.raises(DegenerateReflection):
        householder_matrix(np.array([1.0, 0.0]), np.array([1.0, 0.0]))


def test_householder_random_pairs():
    rng = np.random.default_rng(0)
    checked = 0
    while checked < 1000:
        n = int(rng.integers(1, 12))
        d = rng.standard_normal(n)
        u = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        u /= np.linalg.norm(u)
        if np.linalg.norm(d - u) <= 1e-6:
            continue
        H = householder_matrix(d, u)
        np.testing.assert_allclose(H, H.T, atol=1e-10)
        np.testing.assert_allclose(H.T @ H, np.eye(n), atol=1e-10)
        np.testing.assert_allclose(H @ d, u, atol=1e-10)
        checked += 1


def test_rotate_basis_two_dimensions():
    base = DirectionBasis(
        np.array([[1.0, 0.0], [-0.5, np.sqrt(3) / 2], [-0.5, -np.sqrt(3) / 2]])
    )
    rotated = rotate_basis(base, np.array([0.0, 1.0]))
    np.testing.assert_allclose(rotated.directions[0], [0.0, 1.0], atol=1e-15)
    check_basis(rotated, 2)


def test_rotate_basis_degenerate_returns_same_basis():
    base = equiangular_basis(3)
    assert rotate_basis(base, base.directions[0]) is base


def test_rotate_basis_keeps_zero_sum():
    base = equiangular_basis(3)
    cursor = HaltonCursor(3)
    rotated = rotate_basis(base, halton_direction(cursor))
    assert np.linalg.norm(rotated.directions.sum(axis=0)) <= 1e-10
    check_basis(rotated, 3)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_rotated_basis_positively_spans(n, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    rotated = rotate_basis(equiangular_basis(n), u)
    np.testing.assert_allclose(rotated.directions[0], u, atol=1e-12)
    for _ in range(100):
        v = rng.standard_normal(n)
        assert np.max(rotated.directions @ v) > 0.0


def test_rotation_preserves_pairwise_angles():
    base = equiangular_basis(4)
    cursor = HaltonCursor(4)
    for _ in range(20):
        rotated = rotate_basis(base, halton_direction(cursor))
        for i, j in itertools.combinations(range(5), 2):
            dot = rotated.directions[i] @ rotated.directions[j]
            assert dot == pytest.approx(-0.25, abs=1e-10)
