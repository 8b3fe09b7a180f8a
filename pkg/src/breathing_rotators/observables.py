"""Kinematic invariants, canonical momenta and Casimir invariants.

Casimirs are available along two independent routes: closed forms in
(P, Q) from the model jet, and kinematically from the momenta of a concrete
state.  The routes must agree.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, SingularKinematics
from .minkowski import dot, gramian3, pauli_lubanski, wedge

KK_TOL = 1e-12
KKDOT_TOL = 1e-10


def _vec4(v, name):
    a = np.asarray(v, dtype=float)
    if a.shape != (4,) or not np.all(np.isfinite(a)):
        raise ConstraintViolation(f"{name} must be a finite 4-vector, got {v!r}")
    return a


@dataclass(frozen=True)
class RotatorState:
    """Position, null vector and their parameter derivatives.

    ``x`` has units of length, ``k`` is dimensionless.  ``m`` and ``ell`` are
    the model's mass and length scales.  Validation is strict: states off
    the null cone are rejected, never projected.
    """

    x: np.ndarray
    xdot: np.ndarray
    k: np.ndarray
    kdot: np.ndarray
    m: float = 1.0
    ell: float = 1.0

    def __post_init__(self):
        for name in ("x", "xdot", "k", "kdot"):
            object.__setattr__(self, name, _vec4(getattr(self, name), name))
        if not (self.m > 0 and self.ell > 0):
            raise ConstraintViolation("m and ell must be positive")
        k, kd, xd = self.k, self.kdot, self.xdot
        if abs(dot(k, k)) > KK_TOL * k[0] ** 2 or k[0] == 0.0:
            raise ConstraintViolation(f"k is not null: kk={dot(k, k)!r}")
        if not dot(xd, xd) > 0.0:
            raise ConstraintViolation("worldline is not timelike")
        if dot(k, xd) == 0.0:
            raise ConstraintViolation("k.xdot vanishes")
        # hypot rescales internally, so tiny kdot does not underflow to a zero bound
        if abs(dot(k, kd)) > KKDOT_TOL * math.hypot(*k) * math.hypot(*kd):
            raise ConstraintViolation("kdot is not tangent to the null cone (k.kdot != 0)")

    def to_dict(self):
        return {
            "x": self.x.tolist(), "xdot": self.xdot.tolist(),
            "k": self.k.tolist(), "kdot": self.kdot.tolist(),
            "m": self.m, "ell": self.ell,
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(d["x"], d["xdot"], d["k"], d["kdot"], float(d.get("m", 1.0)),
                       float(d.get("ell", 1.0)))
        except (KeyError, TypeError) as exc:
            raise ConstraintViolation(f"malformed state: {exc}") from exc

    def transformed(self, L, shift=None):
        """Apply a Lorentz matrix to every vector, then translate x."""
        x = L @ self.x
        if shift is not None:
            x = x + shift
        return RotatorState(x, L @ self.xdot, L @ self.k, L @ self.kdot, self.m, self.ell)

    def reparametrized(self, lam):
        return RotatorState(self.x, lam * self.xdot, self.k, lam * self.kdot, self.m, self.ell)


def load_state(path):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConstraintViolation(f"malformed state file: {exc}") from exc
    if not isinstance(d, dict):
        raise ConstraintViolation("state file must hold a JSON object")
    return RotatorState.from_dict(d)


def _invariants(xdot, k, kdot, ell):
    xx = dot(xdot, xdot)
    kx = dot(k, xdot)
    if kx == 0.0 or not xx > 0.0:
        raise SingularKinematics("k.xdot = 0 or xdot not timelike")
    P = ell * dot(kdot, xdot) / (kx * math.sqrt(xx))
    Q = -(ell**2) * dot(kdot, kdot) / kx**2
    return P, Q


def state_invariants(s):
    """The dimensionless invariants (P, Q) of a state."""
    return _invariants(s.xdot, s.k, s.kdot, s.ell)


def lagrangian_raw(xdot, k, kdot, model, m=1.0, ell=1.0):
    """L = -m sqrt(xdot.xdot) F(P, Q), evaluated without constraint checks."""
    P, Q = _invariants(xdot, k, kdot, ell)
    return -m * math.sqrt(dot(xdot, xdot)) * model.value(P, Q)


def lagrangian(s, model):
    return lagrangian_raw(s.xdot, s.k, s.kdot, model, s.m, s.ell)


def momenta(s, model):
    """Contravariant momenta (P, Pi) conjugate to x and k.

    The ratio P/(kdot.u) appearing in the closed form equals
    ell/((k.u) sqrt(xdot.xdot)) identically, which is what is evaluated here.
    """
    xx = dot(s.xdot, s.xdot)
    sq = math.sqrt(xx)
    u = s.xdot / sq
    ku = dot(s.k, u)
    if ku == 0.0:
        raise SingularKinematics("k.u vanishes")
    P, Q = state_invariants(s)
    j = model.jet(P, Q)
    m, ell = s.m, s.ell
    r = ell / (ku * sq)
    Pm = m * ((j.F - P * j.FP) * u - (2 * Q * j.FQ + P * j.FP) * s.k / ku + j.FP * r * s.kdot)
    Pi = (m * ell / ku) * (j.FP * u - 2 * j.FQ * r * s.kdot)
    return Pm, Pi


def angular_momentum(s, model):
    """M_{mu nu} = x_mu P_nu - x_nu P_mu + k_mu Pi_nu - k_nu Pi_mu (indices down)."""
    P, Pi = momenta(s, model)
    return wedge(s.x, P) + wedge(s.k, Pi)


def pauli_lubanski_vector(s, model):
    P, _ = momenta(s, model)
    return pauli_lubanski(angular_momentum(s, model), P)


@dataclass(frozen=True)
class CasimirPair:
    PP: float  # mass^2
    WW: float  # mass^4 length^2

    def as_tuple(self):
        return (self.PP, self.WW)


def casimirs_from_jet(j, P, Q, m=1.0, ell=1.0):
    a = j.F - P * j.FP
    PP = m**2 * (a * (a - 4 * Q * j.FQ) - Q * j.FP**2)
    WW = -(m**4) * ell**2 * Q * (j.FP**2 + 2 * j.FQ * a) ** 2
    return CasimirPair(PP, WW)


def casimirs_closed(model, P, Q, m=1.0, ell=1.0):
    return casimirs_from_jet(model.jet(P, Q), P, Q, m, ell)


def casimir_scales(j, P, Q, m=1.0, ell=1.0):
    """Magnitudes of the terms entering PP and WW, used as error denominators."""
    a = j.F - P * j.FP
    pp = m**2 * (abs(a) * (abs(a) + 4 * abs(Q * j.FQ)) + abs(Q) * j.FP**2)
    ww = m**4 * ell**2 * abs(Q) * (j.FP**2 + 2 * abs(j.FQ * a)) ** 2
    return pp, ww


def casimirs_kinematic(s, model):
    """PP = P.P and WW = -G(P, Pi, k) from the momenta of the state."""
    P, Pi = momenta(s, model)
    return CasimirPair(dot(P, P), -gramian3(P, Pi, s.k))


def euler_residual(s, model):
    """P.xdot + Pi.kdot + L, which vanishes by degree-one homogeneity."""
    P, Pi = momenta(s, model)
    return dot(P, s.xdot) + dot(Pi, s.kdot) + lagrangian(s, model)
