import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breathing_rotators.minkowski import (
    LEVI_CIVITA,
    METRIC,
    boost,
    dot,
    gram_matrix,
    gramian3,
    lower,
    pauli_lubanski,
    random_lorentz,
    random_rotation,
    wedge,
)

seeds = st.integers(0, 2**32 - 1)


def test_signature_and_epsilon_convention():
    assert dot([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert dot([0, 1, 0, 0], [0, 1, 0, 0]) == -1.0
    assert LEVI_CIVITA[0, 1, 2, 3] == 1.0
    assert LEVI_CIVITA[1, 0, 2, 3] == -1.0
    assert np.count_nonzero(LEVI_CIVITA) == 24


def test_boost_along_x():
    L = boost(np.arctanh(0.6), [1.0, 0.0, 0.0])
    u = L @ np.array([1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(u, [1.25, 0.75, 0.0, 0.0], atol=1e-15)


@given(seeds)
def test_random_transforms_preserve_metric(seed):
    rng = np.random.default_rng(seed)
    L = random_lorentz(rng, max_rapidity=2.0)
    np.testing.assert_allclose(L.T @ METRIC @ L, METRIC, atol=1e-12)
    R = random_rotation(rng)
    np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(R) == pytest.approx(1.0)


@settings(max_examples=50)
@given(seeds)
def test_gramian3_is_gram_determinant(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.normal(size=(3, 4))
    assert gramian3(a, b, c) == pytest.approx(np.linalg.det(gram_matrix(a, b, c)), rel=1e-11, abs=1e-11)


def test_wedge_is_antisymmetric_and_lowered():
    a = np.array([1.0, 2.0, 0.0, 0.0])
    b = np.array([0.5, 0.0, 1.0, 0.0])
    W = wedge(a, b)
    np.testing.assert_allclose(W, -W.T)
    al, bl = lower(a), lower(b)
    assert W[0, 1] == pytest.approx(al[0] * bl[1] - al[1] * bl[0])


@settings(max_examples=50)
@given(seeds)
def test_pauli_lubanski_orthogonal_to_momentum(seed):
    rng = np.random.default_rng(seed)
    x, P, k, Pi = rng.normal(size=(4, 4))
    W = pauli_lubanski(wedge(x, P) + wedge(k, Pi), P)
    assert abs(dot(W, P)) < 1e-12 * (1 + np.abs(W).max() * np.abs(P).max())
