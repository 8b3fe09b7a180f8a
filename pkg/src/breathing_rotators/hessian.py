"""Gauge-fixed Hessian of the rotator Lagrangian and its determinant.

In the lab-time gauge the Lagrangian per unit m*ell is the scalar
``L = -sqrt(1 - V.V) F(P, Q)`` of six velocities ``(V, Omega)``.  The
Hessian determinant is available by three independent routes:

* ``hessian_det_closed`` -- closed form in the jet of F and the frame;
* ``hessian_det_schur``  -- block expansions in the elementary basis and
  the Schur identity, never densified;
* ``hessian_det_fd``     -- central differences of L itself (values only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .elementary import ElemMatrix, elem_det, invert_elem
from .errors import (
    ConstraintViolation, DecompositionError, DegenerateCase, DegenerateFrame, SingularMatrix,
)
from .models import ModelClass, classify_point

SINGULAR_RTOL = 1e-9
SCHUR_COND_LIMIT = 1e12


@dataclass(frozen=True)
class GaugeCoords:
    """Lab-time gauge coordinates of a state.

    ``xdot = ell (1, V)``, ``k = exp(psi) (1, N)``,
    ``kdot = exp(psi) (N.Omega, Omega)``.
    """

    V: np.ndarray
    N: np.ndarray
    psi: float
    omega: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        N = np.asarray(self.N, dtype=float)
        if abs(N @ N - 1.0) > 1e-12:
            raise ConstraintViolation(f"N is not a unit vector: |N|^2 = {N @ N!r}")
        if not V @ V < 1.0:
            raise ConstraintViolation("|V| must be < 1")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "psi", float(self.psi))

    @property
    def gamma(self):
        return 1.0 / math.sqrt(1.0 - self.V @ self.V)

    @property
    def chi(self):
        return 1.0 / (1.0 - self.N @ self.V)

    @property
    def zeta(self):
        return self.gamma * self.chi * (self.V @ self.omega)

    @property
    def P(self):
        return self.gamma * self.chi * (self.N @ self.omega - self.V @ self.omega)

    @property
    def Q(self):
        return self.chi**2 * (self.omega @ self.omega - (self.N @ self.omega) ** 2)

    @property
    def invariants(self):
        return self.P, self.Q

    @property
    def frame(self):
        return np.array([self.N, self.V, self.omega])

    @property
    def geometric_factor(self):
        """(1 - N.V)^4 (1 - V.V)^2."""
        return (1.0 - self.N @ self.V) ** 4 * (1.0 - self.V @ self.V) ** 2

    def rotated(self, R):
        return GaugeCoords(R @ self.V, R @ self.N, self.psi, R @ self.omega)


def gauge_coords(s):
    """Map a state to the gauge x^0 = ell * tau (rescaling the parameter)."""
    if not s.xdot[0] > 0.0:
        raise ConstraintViolation("lab-time gauge needs xdot^0 > 0")
    if not s.k[0] > 0.0:
        raise ConstraintViolation("lab-time gauge needs k^0 > 0")
    lam = s.ell / s.xdot[0]
    V = s.xdot[1:] / s.xdot[0]
    N = s.k[1:] / np.linalg.norm(s.k[1:])
    return GaugeCoords(V, N, math.log(s.k[0]), lam * s.kdot[1:] / s.k[0])


def state_from_gauge(c, m=1.0, ell=1.0, tau=0.0, position=None):
    """Inverse of :func:`gauge_coords`; ``position`` is the spatial x / ell."""
    from .observables import RotatorState

    y = np.zeros(3) if position is None else np.asarray(position, dtype=float)
    e = math.exp(c.psi)
    return RotatorState(
        np.concatenate([[ell * tau], ell * y]),
        ell * np.concatenate([[1.0], c.V]),
        e * np.concatenate([[1.0], c.N]),
        e * np.concatenate([[c.N @ c.omega], c.omega]),
        m, ell,
    )


def tangent_basis(N):
    """Two orthonormal vectors spanning the plane orthogonal to N."""
    a = np.zeros(3)
    a[np.argmin(np.abs(N))] = 1.0
    e1 = np.cross(N, a)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(N, e1)


def gauge_with_invariants(P, Q, V, N, direction=None, psi=0.0):
    """Gauge coordinates in frame (V, N) whose invariants are (P, Q).

    ``direction`` fixes the component of Omega orthogonal to N (projected
    onto the tangent plane and normalized); a fixed tangent vector is used
    when omitted.
    """
    V = np.asarray(V, dtype=float)
    N = np.asarray(N, dtype=float)
    if Q < 0:
        raise ValueError("Q must be non-negative")
    if direction is None:
        e = tangent_basis(N)[0]
    else:
        e = np.asarray(direction, dtype=float)
        e = e - (e @ N) * N
        e /= np.linalg.norm(e)
    one_nv = 1.0 - N @ V
    gamma = 1.0 / math.sqrt(1.0 - V @ V)
    perp = math.sqrt(Q) * one_nv * e
    t = (P * one_nv / gamma + V @ perp) / one_nv
    return GaugeCoords(V, N, psi, t * N + perp)


@dataclass(frozen=True)
class HessianBlocks:
    LVV: ElemMatrix
    LVO: ElemMatrix
    LOO: ElemMatrix

    def dense(self):
        H = np.empty((6, 6))
        H[:3, :3] = self.LVV.dense()
        H[:3, 3:] = self.LVO.dense()
        H[3:, :3] = H[:3, 3:].T
        H[3:, 3:] = self.LOO.dense()
        return H


def hessian_blocks(c, jet):
    c0, C = kernels.block_coefficients(c.V, c.N, c.omega, jet.as_array())
    frame = c.frame
    return HessianBlocks(*(ElemMatrix(float(c0[b]), C[b], frame) for b in range(3)))


def hessian_dense(c, jet):
    return kernels.hessian_dense(c.V, c.N, c.omega, jet.as_array())


def model_hessian(model, c):
    return hessian_dense(c, model.jet(*c.invariants))


def gauge_lagrangian(model, V, omega, N):
    vv = V @ V
    root = math.sqrt(1.0 - vv)
    chi = 1.0 / (1.0 - N @ V)
    no = N @ omega
    P = chi * (no - V @ omega) / root
    Q = chi**2 * (omega @ omega - no * no)
    return -root * model.value(P, Q)


def hessian_fd(model, c, h=None):
    """Central-difference Hessian of the gauge Lagrangian from values only."""
    z0 = np.concatenate([c.V, c.omega])
    h = h if h is not None else np.finfo(float).eps ** 0.25 * max(1.0, np.abs(z0).max())

    def L(z):
        return gauge_lagrangian(model, z[:3], z[3:], c.N)

    f0 = L(z0)
    H = np.empty((6, 6))
    eye = np.eye(6) * h
    plus = [L(z0 + eye[i]) for i in range(6)]
    minus = [L(z0 - eye[i]) for i in range(6)]
    for i in range(6):
        H[i, i] = (plus[i] - 2 * f0 + minus[i]) / h**2
        for j in range(i + 1, 6):
            H[i, j] = H[j, i] = (
                L(z0 + eye[i] + eye[j]) - L(z0 + eye[i] - eye[j])
                - L(z0 - eye[i] + eye[j]) + L(z0 - eye[i] - eye[j])
            ) / (4 * h**2)
    return H


def hessian_det_fd(model, c):
    return float(np.linalg.det(hessian_fd(model, c)))


def hessian_det_schur(blocks):
    """det H = det(L_OO) det(L_VV - L_VO L_OO^-1 L_VO^T).

    Computed in the elementary basis.  When the frame is degenerate or a
    block has no identity part, the same identity is applied to dense
    blocks instead.  A numerically singular L_OO raises SingularMatrix.
    """
    LOO = blocks.LOO.dense()
    if np.linalg.cond(LOO) > SCHUR_COND_LIMIT:
        raise SingularMatrix("L_OmegaOmega is singular; the Schur route does not apply")
    try:
        inv = invert_elem(blocks.LOO)
        schur = blocks.LVV - blocks.LVO @ inv @ blocks.LVO.T
        return elem_det(blocks.LOO) * elem_det(schur)
    except (DegenerateFrame, DecompositionError):
        pass
    LVO = blocks.LVO.dense()
    schur = blocks.LVV.dense() - LVO @ np.linalg.solve(LOO, LVO.T)
    return float(np.linalg.det(LOO) * np.linalg.det(schur))


def hessian_bracket(jet, P, Q):
    """(F_P^2 + F_x^2) F_PP + (F - P F_P) d(F_P, F_x)/d(P, x) with x = sqrt(Q)."""
    F, FP, FQ, FPP, FPQ, FQQ = jet.as_array()
    x = math.sqrt(Q)
    Fx = 2 * x * FQ
    Fxx = 2 * FQ + 4 * Q * FQQ
    FPx = 2 * x * FPQ
    return (FP**2 + Fx**2) * FPP + (F - P * FP) * (FPP * Fxx - FPx**2)


def hessian_det_closed(jet, c):
    P, Q = c.invariants
    a = jet.F - P * jet.FP
    spin = jet.FP**2 + 2 * jet.FQ * a
    return -a * spin * hessian_bracket(jet, P, Q) / c.geometric_factor


def det_scale(H):
    """Sensitivity scale of det H: sigma_max times the five largest singular values."""
    sv = np.linalg.svd(H, compute_uv=False)
    return float(sv[0] * np.prod(sv[:-1]))


@dataclass(frozen=True)
class SingularityReport:
    det: float
    scaled_det: float
    condition: float
    singular: bool
    null_vector: np.ndarray


def singularity(H, det=None, rtol=SINGULAR_RTOL):
    """Scale-free singularity test for a symmetric Hessian.

    With ``g`` the geometric mean of the eigenvalue magnitudes excluding the
    smallest, the matrix is singular when ``|det| < rtol * g^n``.
    """
    w, vecs = np.linalg.eigh(H)
    mags = np.abs(w)
    order = np.argsort(mags)
    rest = mags[order[1:]]
    if np.any(rest == 0.0):
        g = 0.0
    else:
        g = float(np.exp(np.mean(np.log(rest))))
    n = H.shape[0]
    det = float(np.prod(w)) if det is None else float(det)
    scaled = abs(det) / g**n if g > 0 else math.inf if det != 0 else 0.0
    cond = mags.max() / mags.min() if mags.min() > 0 else math.inf
    return SingularityReport(det, scaled, float(cond), bool(scaled < rtol), vecs[:, order[0]])


def reduced_hessian(H, N):
    """Project out the breathing direction (0, N) from a 6x6 Hessian."""
    e1, e2 = tangent_basis(N)
    B = np.zeros((6, 5))
    B[:3, :3] = np.eye(3)
    B[3:, 3] = e1
    B[3:, 4] = e2
    return B.T @ H @ B


def reduced_hessian_det(model, c):
    """Determinant of the 5x5 Hessian with Omega restricted to the tangent plane of N."""
    return float(np.linalg.det(reduced_hessian(model_hessian(model, c), c.N)))


def jacobian_casimir_from_jet(jet, P, Q, m=1.0, ell=1.0):
    """Closed form of d(PP, WW)/d(P, Q)."""
    D = jet.FP * (P * P + Q) - P * jet.F
    a = jet.F - P * jet.FP
    spin = jet.FP**2 + 2 * jet.FQ * a
    return -2 * m**6 * ell**2 * D * spin * hessian_bracket(jet, P, Q)


def jacobian_casimir(model, P, Q, m=1.0, ell=1.0):
    return jacobian_casimir_from_jet(model.jet(P, Q), P, Q, m, ell)


def jacobian_scale(jet, P, Q, m=1.0, ell=1.0):
    """Magnitude of the factors of the Jacobian before cancellation inside D."""
    a = jet.F - P * jet.FP
    spin = jet.FP**2 + 2 * jet.FQ * a
    D_mag = abs(jet.FP) * (P * P + Q) + abs(P * jet.F)
    return 2 * m**6 * ell**2 * D_mag * abs(spin) * abs(hessian_bracket(jet, P, Q))


def jacobian_casimir_chain(jet, P, Q, m=1.0, ell=1.0):
    """d(PP, WW)/d(P, Q) by the chain rule on the unfactored Casimirs."""
    F, FP, FQ, FPP, FPQ, FQQ = jet.as_array()
    a = F - P * FP
    a_P, a_Q = -P * FPP, FQ - P * FPQ
    b = a - 4 * Q * FQ
    b_P, b_Q = a_P - 4 * Q * FPQ, a_Q - 4 * FQ - 4 * Q * FQQ
    PP_P = m**2 * (a_P * b + a * b_P - 2 * Q * FP * FPP)
    PP_Q = m**2 * (a_Q * b + a * b_Q - FP**2 - 2 * Q * FP * FPQ)
    s = FP**2 + 2 * FQ * a
    s_P = 2 * FP * FPP + 2 * FPQ * a + 2 * FQ * a_P
    s_Q = 2 * FP * FPQ + 2 * FQQ * a + 2 * FQ * a_Q
    k = -(m**4) * ell**2
    WW_P = k * Q * 2 * s * s_P
    WW_Q = k * (s**2 + Q * 2 * s * s_Q)
    return PP_P * WW_Q - PP_Q * WW_P


def jacobian_casimir_fd(model, P, Q, m=1.0, ell=1.0, h=1e-5):
    from .observables import casimirs_closed

    def f(p, q):
        return np.array(casimirs_closed(model, p, q, m, ell).as_tuple())

    dP = (f(P + h, Q) - f(P - h, Q)) / (2 * h)
    dQ = (f(P, Q + h) - f(P, Q - h)) / (2 * h)
    return float(dP[0] * dQ[1] - dQ[0] * dP[1])


@dataclass(frozen=True)
class KappaReport:
    kappas: tuple
    max_rel_diff: float


def extract_kappa(model, c, m=1.0, ell=1.0, rtol=1e-10):
    """kappa = det H (F_P (P^2 + Q) - P F) / ((F - P F_P) |d(PP, WW)/d(P, Q)|).

    det H comes from the Schur route so the extraction is independent of
    both closed forms.
    """
    P, Q = c.invariants
    jet = model.jet(P, Q)
    D = jet.FP * (P * P + Q) - P * jet.F
    a = jet.F - P * jet.FP
    if classify_point(jet, P, Q, rtol) is not ModelClass.GENERIC:
        raise DegenerateCase(f"indeterminate form at (P, Q)=({P}, {Q}): D={D:.3e}, F-PF_P={a:.3e}")
    jac = jacobian_casimir_from_jet(jet, P, Q, m, ell)
    if abs(jac) <= rtol * jacobian_scale(jet, P, Q, m, ell) or jac == 0.0:
        raise DegenerateCase("Casimir Jacobian vanishes")
    det = hessian_det_schur(hessian_blocks(c, jet))
    return det * D / (a * jac)


def verify_eq3(models, target, m=1.0, ell=1.0):
    """Extract kappa for several models at one kinematic state and compare pairwise.

    ``target`` is a :class:`RotatorState` (its m and ell are used) or
    :class:`GaugeCoords`.
    """
    if not isinstance(target, GaugeCoords):
        m, ell = target.m, target.ell
        target = gauge_coords(target)
    kappas = tuple(extract_kappa(mod, target, m, ell) for mod in models)
    diff = max(
        (abs(a - b) / min(abs(a), abs(b)) for i, a in enumerate(kappas) for b in kappas[i + 1:]),
        default=0.0,
    )
    return KappaReport(kappas, float(diff))
