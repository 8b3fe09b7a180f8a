import numpy as np
import pytest
from conftest import random_case
from hypothesis import given, settings
from hypothesis import strategies as st

from breathing_rotators.dynamics import lagrangian_jet
from breathing_rotators.errors import ConstraintViolation, DegenerateCase, SingularMatrix
from breathing_rotators.hessian import (
    GaugeCoords,
    det_scale,
    extract_kappa,
    gauge_coords,
    gauge_with_invariants,
    hessian_blocks,
    hessian_det_closed,
    hessian_det_schur,
    hessian_fd,
    jacobian_casimir,
    jacobian_casimir_chain,
    jacobian_casimir_fd,
    jacobian_scale,
    model_hessian,
    reduced_hessian_det,
    singularity,
    state_from_gauge,
    verify_eq3,
)
from breathing_rotators.minkowski import random_rotation
from breathing_rotators.models import (
    Deformed,
    FundamentalNu,
    FundamentalSqrt,
    Polynomial,
    PolyS,
    Separable,
    fundamental_starlike,
)
from breathing_rotators.sampling import gauge_at, generic_models

seeds = st.integers(0, 2**32 - 1)


def test_gauge_coordinates_round_trip(rng):
    _, c, s = random_case(rng, 1.2, 0.8)
    back = gauge_coords(s)
    np.testing.assert_allclose(back.V, c.V, atol=1e-15)
    np.testing.assert_allclose(back.N, c.N, atol=1e-15)
    np.testing.assert_allclose(back.omega, c.omega, atol=1e-14)
    assert back.psi == pytest.approx(c.psi)
    # any parametrization maps to the same gauge point
    again = gauge_coords(s.reparametrized(2.5))
    np.testing.assert_allclose(again.omega, c.omega, atol=1e-14)


def test_gauge_validation():
    with pytest.raises(ConstraintViolation):
        GaugeCoords([0, 0, 0], [1, 1, 0], 0.0, [0, 0, 1])
    with pytest.raises(ConstraintViolation):
        GaugeCoords([1.0, 0, 0], [1, 0, 0], 0.0, [0, 0, 1])


@given(st.floats(-2, 2), st.floats(0.0, 3.0), seeds)
def test_gauge_with_invariants(P, Q, seed):
    rng = np.random.default_rng(seed)
    c = gauge_at(P, Q, rng)
    assert c.invariants == pytest.approx((P, Q), abs=1e-12)
    s = state_from_gauge(c, 1.0, 0.5)
    from breathing_rotators.observables import state_invariants

    assert state_invariants(s) == pytest.approx((P, Q), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_block_hessian_against_finite_differences(seed):
    rng = np.random.default_rng(seed)
    model, c, _ = random_case(rng)
    H = model_hessian(model, c)
    np.testing.assert_allclose(H, hessian_fd(model, c), atol=1e-6 * np.abs(H).max())


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_block_hessian_against_chain_rule_hessian(seed):
    # second route: Hessian in (V, Kdot) from the 9-variable kinematic jet,
    # rescaled by Kdot = e^psi Omega
    rng = np.random.default_rng(seed)
    model, c, _ = random_case(rng)
    _, _, Lzz, _ = lagrangian_jet(c, model)
    idx = np.r_[0:3, 6:9]
    D = np.diag([1, 1, 1] + [np.exp(c.psi)] * 3)
    H = model_hessian(model, c)
    np.testing.assert_allclose(D @ Lzz[np.ix_(idx, idx)] @ D, H, atol=1e-12 * np.abs(H).max())


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_three_determinant_routes(seed):
    rng = np.random.default_rng(seed)
    model, c, _ = random_case(rng)
    jet = model.jet(*c.invariants)
    blocks = hessian_blocks(c, jet)
    H = blocks.dense()
    scale = det_scale(H)
    closed = hessian_det_closed(jet, c)
    assert abs(hessian_det_schur(blocks) - closed) < 1e-10 * scale
    assert abs(np.linalg.det(H) - closed) < 1e-10 * scale


def test_determinant_is_rotation_invariant(rng):
    model, c, _ = random_case(rng)
    R = random_rotation(rng)
    d0 = hessian_det_closed(model.jet(*c.invariants), c)
    d1 = np.linalg.det(model_hessian(model, c.rotated(R)))
    assert d1 == pytest.approx(d0, rel=1e-10)


def test_schur_refuses_singular_omega_block():
    c = gauge_with_invariants(0.3, 0.5, np.array([0.1, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]))
    jet = FundamentalNu(0.0).jet(0.3, 0.5)
    # zero FP and FQ -> L_OO has no identity part and is rank deficient
    from breathing_rotators.models import FJet

    flat = FJet(jet.F, 0.0, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(SingularMatrix):
        hessian_det_schur(hessian_blocks(c, flat))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_jacobian_routes(seed):
    rng = np.random.default_rng(seed)
    model, c, _ = random_case(rng)
    P, Q = c.invariants
    jet = model.jet(P, Q)
    scale = jacobian_scale(jet, P, Q, 1.3, 0.7)
    closed = jacobian_casimir(model, P, Q, 1.3, 0.7)
    assert abs(jacobian_casimir_chain(jet, P, Q, 1.3, 0.7) - closed) < 1e-11 * scale
    assert abs(jacobian_casimir_fd(model, P, Q, 1.3, 0.7) - closed) < 1e-6 * scale


@pytest.mark.parametrize("S", [PolyS([1.0, 1.0]), PolyS([2.0, 0.0, 1.0])], ids=repr)
def test_separable_jacobian_vanishes(S):
    model = Separable(S)
    for P, Q in [(0.3, 0.5), (-1.0, 1.2), (0.0, 2.0)]:
        jet = model.jet(P, Q)
        assert abs(jacobian_casimir(model, P, Q)) < 1e-12 * max(1.0, jacobian_scale(jet, P, Q))


def test_kappa_independent_of_model_and_scales(rng):
    models = generic_models(rng, 4)
    c = gauge_at(0.4, 0.9, rng)
    rep = verify_eq3(models, c)
    assert rep.max_rel_diff < 1e-10
    # kappa scales as 1 / (m^6 ell^2)
    k2 = extract_kappa(models[0], c, m=2.0, ell=0.5)
    assert k2 * 2.0**6 * 0.25 == pytest.approx(rep.kappas[0], rel=1e-10)
    # frozen value for this frame (independently: 1 / (2 geometric factor))
    assert rep.kappas[0] == pytest.approx(1 / (2 * c.geometric_factor), rel=1e-10)


def test_kappa_degenerate_for_separable(rng):
    c = gauge_at(0.4, 0.9, rng)
    with pytest.raises(DegenerateCase):
        extract_kappa(Separable(PolyS([1.0, 1.0])), c)
    with pytest.raises(DegenerateCase):
        extract_kappa(FundamentalSqrt(), c)


@pytest.mark.parametrize(
    "model",
    [FundamentalSqrt(), FundamentalSqrt((1, -1)), FundamentalNu(1.0), FundamentalNu(0.5), fundamental_starlike()],
    ids=repr,
)
def test_fundamental_models_singular(model, rng):
    for _ in range(10):
        P, Q = rng.uniform(-1.0, 1.0), rng.uniform(0.05, 0.3)
        c = gauge_at(P, Q, rng)
        assert singularity(model_hessian(model, c)).singular


def test_reduced_hessian():
    rng = np.random.default_rng(3)
    c = gauge_at(0.3, 0.2, rng)
    H = model_hessian(FundamentalNu(1.0), c)
    # the breathing direction is a null vector of the full Hessian
    n = np.concatenate([np.zeros(3), c.N])
    assert np.abs(H @ n).max() < 1e-12 * np.abs(H).max()
    g = np.abs(np.linalg.eigvalsh(H)).max()
    assert abs(reduced_hessian_det(FundamentalNu(1.0), c)) < 1e-12 * g**5
    assert abs(reduced_hessian_det(Deformed(FundamentalNu(1.0), 0.1), c)) > 1e-4 * g**5
    # the starlike model is singular in 6x6 but not after removing the breathing direction
    assert abs(reduced_hessian_det(fundamental_starlike(), c)) > 1e-6


def test_singularity_report_fields():
    H = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 1e-14])
    rep = singularity(H)
    assert rep.singular and rep.condition == pytest.approx(5e14)
    assert abs(rep.null_vector[5]) == pytest.approx(1.0)
    assert not singularity(np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 1e-3])).singular


def test_deformed_polynomial_term_breaks_singularity(rng):
    model = Deformed(FundamentalSqrt(), 1e-3, Polynomial([(2, 0, 1.0), (0, 1, 1.0)]))
    for _ in range(10):
        c = gauge_at(rng.uniform(-1, 1), rng.uniform(0.1, 2), rng)
        assert not singularity(model_hessian(model, c)).singular
