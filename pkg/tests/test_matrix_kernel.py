import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gapsolve import matrix_kernel as mk
from gapsolve.errors import DimensionMismatch, NotPositiveDefinite, ZeroVector

from conftest import random_spd


def test_cholesky_2x2_by_hand():
    f = mk.cholesky([[4.0, 2.0], [2.0, 5.0]])
    np.testing.assert_allclose(f.lower, [[2.0, 0.0], [1.0, 2.0]], atol=1e-15)


def test_cholesky_identity():
    np.testing.assert_array_equal(mk.cholesky(np.eye(3)).lower, np.eye(3))


@pytest.mark.parametrize("s", [[[1.0, 2.0], [2.0, 1.0]], [[0.0]], [[-1.0, 0.0], [0.0, 1.0]]])
def test_cholesky_rejects_indefinite(s):
    with pytest.raises(NotPositiveDefinite):
        mk.cholesky(s)


def test_cholesky_pivot_tolerance():
    # second pivot is 1e-16 relative to the diagonal: numerically singular
    eps = 1e-16
    with pytest.raises(NotPositiveDefinite):
        mk.cholesky([[1.0, 1.0], [1.0, 1.0 + eps]])


def test_only_lower_triangle_is_read():
    s = np.array([[4.0, 99.0], [2.0, 5.0]])
    np.testing.assert_allclose(mk.cholesky(s).lower, [[2.0, 0.0], [1.0, 2.0]])


@pytest.mark.parametrize(
    "s, rhs, expected",
    [
        (np.eye(2), [[3.0], [7.0]], [[3.0], [7.0]]),
        ([[4.0, 0.0], [0.0, 4.0]], [[8.0], [8.0]], [[2.0], [2.0]]),
        ([[4.0, 2.0], [2.0, 5.0]], [[6.0], [7.0]], [[1.0], [1.0]]),
    ],
)
def test_solve_spd_examples(s, rhs, expected):
    np.testing.assert_allclose(mk.solve_spd(mk.cholesky(s), rhs), expected, atol=1e-14)


def test_solve_spd_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mk.solve_spd(mk.cholesky(np.eye(2)), np.ones((3, 1)))


@pytest.mark.parametrize(
    "a, s, expected",
    [
        (np.diag([2.0, 5.0]), np.eye(2), [2.0, 5.0]),
        (np.diag([2.0, 5.0]), np.diag([1.0, 4.0]), [1.25, 2.0]),
        ([[0.0, 1.0], [1.0, 0.0]], np.eye(2), [-1.0, 1.0]),
    ],
)
def test_generalized_eig_examples(a, s, expected):
    np.testing.assert_allclose(mk.sym_generalized_eig(a, s).values, expected, atol=1e-14)


def test_generalized_eig_subset_matches_full(rng):
    a = rng.standard_normal((7, 7))
    s = random_spd(rng, 7)
    full = mk.sym_generalized_eig(a, s)
    part = mk.sym_generalized_eig(a, s, subset=(2, 4))
    np.testing.assert_allclose(part.values, full.values[2:5], atol=1e-12)


def test_generalized_eig_rejects_bad_metric():
    with pytest.raises(NotPositiveDefinite):
        mk.sym_generalized_eig(np.eye(2), [[1.0, 2.0], [2.0, 1.0]])


@pytest.mark.parametrize(
    "a, s, v, expected",
    [
        (np.diag([2.0, 5.0]), np.eye(2), [1.0, 0.0], 2.0),
        (np.diag([2.0, 5.0]), np.eye(2), [1.0, 1.0], 3.5),
        (np.eye(2), np.diag([1.0, 4.0]), [0.0, 1.0], 0.25),
    ],
)
def test_rayleigh_quotient(a, s, v, expected):
    assert mk.rayleigh_quotient(a, s, v) == pytest.approx(expected, abs=1e-15)


def test_rayleigh_quotient_zero_vector():
    with pytest.raises(ZeroVector):
        mk.rayleigh_quotient(np.eye(2), np.eye(2), [0.0, 0.0])


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 40), seed=st.integers(0, 2**31))
def test_cholesky_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    s = g.T @ g + n * np.eye(n)
    low = mk.cholesky(s).lower
    assert np.all(np.diag(low) > 0)
    assert np.max(np.abs(low @ low.T - s)) <= 1e-12 * np.max(np.abs(s))


@settings(max_examples=25, deadline=None)
@given(n=st.sampled_from([1, 2, 5, 17, 60, 200]), seed=st.integers(0, 2**31))
def test_generalized_eig_residual_and_orthonormality(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    a = 0.5 * (a + a.T)
    g = rng.standard_normal((n, n))
    s = g.T @ g + n * np.eye(n)
    ed = mk.sym_generalized_eig(a, s)
    assert np.all(np.diff(ed.values) >= 0)
    na, ns = np.linalg.norm(a, 2), np.linalg.norm(s, 2)
    for j in range(n):
        v = ed.vectors[:, j]
        r = a @ v - ed.values[j] * (s @ v)
        assert np.linalg.norm(r) <= 1e-9 * (na + abs(ed.values[j]) * ns)
    gram = ed.vectors.T @ s @ ed.vectors
    assert np.max(np.abs(gram - np.eye(n))) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_minmax_consistency_brute_force(n, rng):
    # diagonal A, S = I: coordinate subspaces are optimal, so the k-th value
    # is the min over k-subsets of the max diagonal entry in the subset
    d = rng.standard_normal(n)
    values = mk.sym_generalized_eig(np.diag(d), np.eye(n)).values
    for k in range(1, n + 1):
        brute = min(
            max(mk.rayleigh_quotient(np.diag(d), np.eye(n), np.eye(n)[i]) for i in sub)
            for sub in itertools.combinations(range(n), k)
        )
        assert values[k - 1] == pytest.approx(brute, abs=1e-14)
