"""Acceptance gate: each criterion at its stated tolerance, reported as PASS/FAIL."""

import math
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE, FIXTURES, random_case

from breathing_rotators.dynamics import (
    IllPosed,
    IntegratorConfig,
    conservation_report,
    eom_accelerations,
    gauge_shift_residual,
    integrate,
)
from breathing_rotators.errors import DegenerateCase
from breathing_rotators.fundamental import (
    default_grid,
    domain_points,
    pde_report,
    pde_residuals,
    recast_from_jet,
    verify_fundamental,
)
from breathing_rotators.hessian import (
    det_scale,
    gauge_coords,
    gauge_with_invariants,
    hessian_blocks,
    hessian_dense,
    hessian_det_closed,
    hessian_det_fd,
    hessian_det_schur,
    jacobian_casimir_from_jet,
    jacobian_scale,
    model_hessian,
    reduced_hessian,
    singularity,
    state_from_gauge,
    verify_eq3,
)
from breathing_rotators.minkowski import random_lorentz
from breathing_rotators.models import (
    Constant,
    Deformed,
    ExpS,
    FundamentalNu,
    FundamentalSqrt,
    Polynomial,
    PolyS,
    Separable,
    fundamental_starlike,
)
from breathing_rotators.observables import (
    casimir_scales,
    casimirs_from_jet,
    casimirs_kinematic,
    load_state,
    state_invariants,
)
from breathing_rotators.sampling import gauge_at, generic_models, random_invariants

SIGNS = [(1, 1), (1, -1)]
SQRT_NU = (
    [FundamentalSqrt(s) for s in SIGNS]
    + [FundamentalNu(nu, s) for nu in (0.0, 1.0, 5.0) for s in SIGNS]
    + [FundamentalNu.from_a(a, s) for a in (1.0, 2.0) for s in SIGNS]
)
CERTIFIED = SQRT_NU + [fundamental_starlike(s) for s in SIGNS]
SCALES = [(1.0, 1.0), (2.0, 0.5)]


def record(num, ok, detail):
    ACCEPTANCE.append((num, bool(ok), detail))
    return ok


def grid_state(model, rng):
    """Random (P, Q) inside the model's default grid, in a random frame."""
    g = default_grid(model)
    P, Q = random_invariants(model, rng, (g.p_min, g.p_max), (g.q_min, g.q_max))
    return gauge_at(P, Q, rng)


def test_criterion_1_fundamental_certification():
    t0 = time.perf_counter()
    worst_pp = worst_ww = 0.0
    for model in SQRT_NU:
        grid = default_grid(model)
        pts = domain_points(model, grid)
        for m, ell in SCALES:
            rep = verify_fundamental(model, pts, m, ell, grid=grid)
            worst_pp = max(worst_pp, rep.max_pp_dev)
            worst_ww = max(worst_ww, rep.max_ww_dev)
    dt = time.perf_counter() - t0
    ok = worst_pp < 1e-10 and worst_ww < 1e-10 and dt < 5.0
    record(1, ok, f"max PP dev {worst_pp:.1e}, max WW dev {worst_ww:.1e}, {len(SQRT_NU)} models x 2 scales, {dt:.2f} s")
    assert worst_pp < 1e-10 and worst_ww < 1e-10
    assert dt < 5.0


def test_criterion_2_pde_residuals():
    t0 = time.perf_counter()
    worst = 0.0
    uncertified = []
    for model in CERTIFIED:
        rep = pde_report(model, domain_points(model, default_grid(model)), tol=1e-10)
        if rep.certified_xsign is None:
            uncertified.append(repr(model))
        worst = max(worst, rep.max_r1, rep.max_r2)
    # free particle: r1 vanishes and r2 equals 2u identically
    one = Constant(1.0)
    free_r1 = free_r2 = 0.0
    for P, Q in domain_points(one, default_grid(one)):
        for xs in (1, -1):
            p = recast_from_jet(one.jet(P, Q), P, Q, xs)
            r1, r2 = pde_residuals(p)
            free_r1 = max(free_r1, abs(r1))
            free_r2 = max(free_r2, abs(r2 - 2 * p.u))
    dt = time.perf_counter() - t0
    ok = not uncertified and worst < 1e-10 and free_r1 < 1e-14 and free_r2 == 0.0 and dt < 2.0
    record(2, ok, f"max residual {worst:.1e}, F=1: |r1| {free_r1:.1e}, |r2-2u| {free_r2:.1e}, {dt:.2f} s")
    assert not uncertified, uncertified
    assert worst < 1e-10
    assert free_r1 < 1e-14 and free_r2 == 0.0
    assert dt < 2.0


def test_criterion_3_hessian_triple_agreement():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst_schur = worst_fd = 0.0
    for _ in range(1000):
        model, c, _ = random_case(rng)
        P, Q = c.invariants
        jet = model.jet(P, Q)
        scale = det_scale(hessian_dense(c, jet))
        closed = hessian_det_closed(jet, c)
        worst_schur = max(worst_schur, abs(closed - hessian_det_schur(hessian_blocks(c, jet))) / scale)
        worst_fd = max(worst_fd, abs(hessian_det_fd(model, c) - closed) / scale)
    dt = time.perf_counter() - t0
    ok = worst_schur < 1e-10 and worst_fd < 1e-5 and dt < 30.0
    record(3, ok, f"closed/Schur {worst_schur:.1e}, closed/FD {worst_fd:.1e}, 1000 pairs, {dt:.2f} s")
    assert worst_schur < 1e-10
    assert worst_fd < 1e-5
    assert dt < 30.0


def test_criterion_4_fundamental_models_singular():
    rng = np.random.default_rng(4)
    misses = []
    worst = 0.0
    for model in CERTIFIED:
        for _ in range(100):
            c = grid_state(model, rng)
            H = model_hessian(model, c)
            rep = singularity(H)
            worst = max(worst, rep.scaled_det)
            if not rep.singular:
                misses.append((repr(model), c.invariants))
            if isinstance(model, FundamentalNu):
                red = singularity(reduced_hessian(H, c.N))
                worst = max(worst, red.scaled_det)
                if not red.singular:
                    misses.append((repr(model) + " reduced", c.invariants))
    deformed = Deformed(FundamentalSqrt(), 1e-3, Polynomial([(2, 0, 1.0), (0, 1, 1.0)]))
    regular = 0
    smallest = math.inf
    for _ in range(100):
        c = gauge_at(*random_invariants(deformed, rng), rng)
        rep = singularity(model_hessian(deformed, c))
        regular += not rep.singular
        smallest = min(smallest, rep.scaled_det)
    ok = not misses and regular >= 99
    record(4, ok, f"{len(CERTIFIED)} certified models, worst scaled det {worst:.1e}; "
                  f"deformed eps=1e-3 regular at {regular}/100 (min scaled det {smallest:.1e})")
    assert not misses, misses[:5]
    assert regular >= 99


def test_criterion_5_kappa_consistency():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        models = generic_models(rng, 5)
        # polynomial models are entire, so one state serves all five
        P, Q = random_invariants(models[0], rng, (-1.0, 1.0), (0.2, 2.0))
        c = gauge_at(P, Q, rng)
        worst = max(worst, verify_eq3(models, c).max_rel_diff)
    degenerate = 0
    separables = [Separable(PolyS([1.0, 1.0])), Separable(ExpS()), fundamental_starlike()]
    for model in separables:
        c = gauge_at(0.4, 0.6, rng)
        try:
            verify_eq3([model, generic_models(rng, 1)[0]], c)
        except DegenerateCase:
            degenerate += 1
    ok = worst < 1e-8 and degenerate == len(separables)
    record(5, ok, f"max pairwise kappa diff {worst:.1e} over 50 states; "
                  f"DegenerateCase for {degenerate}/{len(separables)} separable models")
    assert worst < 1e-8
    assert degenerate == len(separables)


def test_criterion_6_casimir_routes_and_poincare():
    rng = np.random.default_rng(6)
    worst_route = 0.0
    cases = []
    for i in range(1000):
        m, ell = SCALES[i % 2]
        model, c, s = random_case(rng, m, ell)
        P, Q = state_invariants(s)
        jet = model.jet(P, Q)
        kin, closed = casimirs_kinematic(s, model), casimirs_from_jet(jet, P, Q, m, ell)
        spp, sww = casimir_scales(jet, P, Q, m, ell)
        worst_route = max(worst_route, abs(kin.PP - closed.PP) / spp, abs(kin.WW - closed.WW) / sww)
        cases.append((model, s, kin, spp, sww))
    worst_inv = 0.0
    for model, s, kin, spp, sww in cases[:100]:
        t = s.transformed(random_lorentz(rng), rng.normal(size=4))
        moved = casimirs_kinematic(t, model)
        worst_inv = max(worst_inv, abs(moved.PP - kin.PP) / spp, abs(moved.WW - kin.WW) / sww)
    ok = worst_route < 1e-10 and worst_inv < 1e-10
    record(6, ok, f"kinematic/closed {worst_route:.1e} on 1000 cases; Poincare {worst_inv:.1e} on 100")
    assert worst_route < 1e-10
    assert worst_inv < 1e-10


def _pp_q(jet, P, Q, m=1.0):
    """d(PP)/dQ from the jet."""
    F, FP, FQ, FPP, FPQ, FQQ = jet.as_array()
    a = F - P * FP
    a_Q = FQ - P * FPQ
    b = a - 4 * Q * FQ
    b_Q = a_Q - 4 * FQ - 4 * Q * FQQ
    return m**2 * (a_Q * b + a * b_Q - FP**2 - 2 * Q * FP * FPQ)


@pytest.mark.parametrize("S, dS", [(PolyS([1.0, 1.0]), lambda q: 1.0), (ExpS(), math.exp)], ids=["1+Q", "exp"])
def test_criterion_7_separable_structure(S, dS):
    model = Separable(S)
    V, N, d = np.array([0.2, -0.1, 0.05]), np.array([0.0, 0.6, 0.8]), np.array([1.0, 0.0, 0.0])
    worst_jac = 0.0
    ratios = []
    for P, Q in domain_points(model, default_grid(model)):
        jet = model.jet(P, Q)
        worst_jac = max(worst_jac, abs(jacobian_casimir_from_jet(jet, P, Q)) / jacobian_scale(jet, P, Q))
        c = gauge_with_invariants(P, Q, V, N, d)
        factor = dS(Q) * _pp_q(jet, P, Q)
        s = float(S(Q))
        if factor != 0.0:
            det = hessian_det_closed(jet, c)
            ratios.append(det * c.geometric_factor * (P * P + Q) ** 2 / (Q * s**3 * factor))
    ratios = np.array(ratios)
    spread = float(np.ptp(ratios) / np.abs(ratios).mean())
    ok = worst_jac < 1e-12 and spread < 1e-6
    record(7, ok, f"S={S.to_dict()}: scaled Jacobian {worst_jac:.1e}, det ratio spread {spread:.1e}")
    assert worst_jac < 1e-12
    assert spread < 1e-6


def test_criterion_8_dynamics():
    model = Deformed(FundamentalSqrt(), 0.1, Polynomial([(2, 0, 1.0)]))
    state = load_state(FIXTURES / "state_dynamics.json")
    cfg = IntegratorConfig(rtol=1e-8, atol=1e-8, span=100.0)
    traj = integrate(gauge_coords(state), model, cfg, state.m, state.ell)
    assert traj.diagnosis is None
    rep = conservation_report(traj, model)
    drift = max(rep.max_P_drift, rep.max_M_drift, rep.PP_drift, rep.WW_drift)

    rng = np.random.default_rng(8)
    no_null = []
    for model_f in (FundamentalSqrt(), FundamentalNu(0.0), FundamentalNu(1.0), FundamentalNu(5.0),
                    fundamental_starlike()):
        c = grid_state(model_f, rng)
        t = integrate(c, model_f, IntegratorConfig(span=1.0))
        diag = t.diagnosis
        H = model_hessian(model_f, c)
        if diag is None or np.abs(H @ diag.null_vector).max() > 1e-9 * np.abs(H).max():
            no_null.append(repr(model_f))
    c = grid_state(FundamentalNu(1.0), rng)
    if not isinstance(eom_accelerations(c, FundamentalNu(1.0), breathing_gauge=True), IllPosed):
        no_null.append("FundamentalNu(1.0) reduced")

    worst_shift = 0.0
    for _ in range(200):
        nu = float(rng.choice([0.0, 0.5, 1.0, 2.0, 5.0]))
        nu_model = FundamentalNu(nu)
        s = state_from_gauge(grid_state(nu_model, rng), rng.uniform(0.5, 2), rng.uniform(0.5, 2))
        worst_shift = max(worst_shift, gauge_shift_residual(nu_model, s, rng.uniform(-2, 2), rng.uniform(-3, 3)))

    ok = drift < 1e-6 and rep.max_kk < 1e-10 and not no_null and worst_shift < 1e-10
    record(8, ok, f"drift P {rep.max_P_drift:.1e} M {rep.max_M_drift:.1e} PP {rep.PP_drift:.1e} "
                  f"WW {rep.WW_drift:.1e}, |kk| {rep.max_kk:.1e}; IllPosed with null vector for all "
                  f"fundamental models: {not no_null}; gauge shift {worst_shift:.1e}")
    assert drift < 1e-6
    assert rep.max_kk < 1e-10
    assert not no_null, no_null
    assert worst_shift < 1e-10
