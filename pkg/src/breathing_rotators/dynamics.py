"""Gauge-fixed Euler-Lagrange dynamics with degeneracy detection.

Integration runs in the lab-time gauge ``x = ell (tau, y)``, ``k = e^psi (1, N)``.
The 13-component state vector is ``(y, V, psi, N, Omega)``.  Coordinates
of the null vector are handled as ``K = e^psi N`` (so ``k = (|K|, K)``) and
its velocity ``Kdot = e^psi Omega``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DomainError, IllPosedError, StepFailure
from .hessian import GaugeCoords, reduced_hessian, singularity, state_from_gauge, tangent_basis
from .minkowski import dot
from .observables import angular_momentum, casimirs_kinematic, momenta

CONDITION_LIMIT = 1e12
NORM_TOL = 1e-12
_QDOT = np.r_[0:3, 6:9]


@dataclass(frozen=True)
class IllPosed:
    """Diagnosis returned when accelerations are not determined by the state."""

    det: float
    scaled_det: float
    condition: float
    null_vector: np.ndarray
    reason: str = "singular Hessian"

    def to_dict(self):
        return {
            "ill_posed": True,
            "reason": self.reason,
            "det": self.det,
            "scaled_det": self.scaled_det,
            "condition": self.condition,
            "null_vector": [float(x) for x in self.null_vector],
        }


@dataclass(frozen=True)
class Accelerations:
    Vdot: np.ndarray
    Omdot: np.ndarray
    det: float
    decoupled: bool = False


def lagrangian_jet(c, model):
    """Value, gradient and Hessian of -sqrt(1 - V.V) F over z = (V, K, Kdot)."""
    e = math.exp(c.psi)
    vals, grads, hess = kernels.kinematic_jet(c.V, e * c.N, e * c.omega)
    g, P, Q = vals
    j = model.jet(P, Q)
    gz, Pz, Qz = grads
    Fz = j.FP * Pz + j.FQ * Qz
    Fzz = (
        j.FPP * np.outer(Pz, Pz)
        + j.FPQ * (np.outer(Pz, Qz) + np.outer(Qz, Pz))
        + j.FQQ * np.outer(Qz, Qz)
        + j.FP * hess[1]
        + j.FQ * hess[2]
    )
    L = -g * j.F
    Lz = -(gz * j.F + g * Fz)
    Lzz = -(hess[0] * j.F + np.outer(gz, Fz) + np.outer(Fz, gz) + g * Fzz)
    return L, Lz, Lzz, j


def _rhs_vector(c, Lz, Lzz):
    """Right-hand side of H b = rhs in (V, Omega) velocity units."""
    e = math.exp(c.psi)
    Kd = e * c.omega
    rhs = -Lzz[_QDOT][:, 3:6] @ Kd
    rhs[3:] += Lz[3:6]
    rhs[3:] *= e
    return rhs


def _diagnose(H, reason="singular Hessian"):
    rep = singularity(H)
    return IllPosed(rep.det, rep.scaled_det, rep.condition, rep.null_vector, reason)


def _is_decoupled(H):
    scale = max(np.abs(H[:3, :3]).max(), 1e-300)
    return np.abs(H[:, 3:]).max() <= 1e-14 * scale


def eom_accelerations(c, model, breathing_gauge=False):
    """Accelerations (Vdot, Omegadot) or an :class:`IllPosed` diagnosis.

    With ``breathing_gauge`` the breathing direction is treated as pure
    gauge: the 5x5 system orthogonal to it is solved and psi'' = 0 is
    imposed.  This is meaningful only for models of the form
    ``nu P + f(Q)``.
    """
    _, Lz, Lzz, j = lagrangian_jet(c, model)
    H = kernels.hessian_dense(c.V, c.N, c.omega, j.as_array())
    rhs = _rhs_vector(c, Lz, Lzz)
    no = c.N @ c.omega
    if _is_decoupled(H):
        Vd = np.linalg.solve(H[:3, :3], rhs[:3])
        return Accelerations(Vd, -no * c.omega, float(np.linalg.det(H[:3, :3])), True)
    if breathing_gauge:
        Hr = reduced_hessian(H, c.N)
        rep = singularity(Hr)
        if rep.singular or rep.condition > CONDITION_LIMIT:
            return _diagnose(Hr, "singular reduced Hessian")
        e1, e2 = tangent_basis(c.N)
        rr = np.concatenate([rhs[:3], [rhs[3:] @ e1, rhs[3:] @ e2]])
        x = np.linalg.solve(Hr, rr)
        beta = 2 * no * no - c.omega @ c.omega
        bO = x[3] * e1 + x[4] * e2 + beta * c.N
        return Accelerations(x[:3], bO - no * c.omega, rep.det)
    rep = singularity(H)
    if rep.singular or rep.condition > CONDITION_LIMIT:
        return _diagnose(H)
    b = np.linalg.solve(H, rhs)
    return Accelerations(b[:3], b[3:] - no * c.omega, rep.det)


def pack(c, y=None):
    y = np.zeros(3) if y is None else np.asarray(y, dtype=float)
    return np.concatenate([y, c.V, [c.psi], c.N, c.omega])


def unpack(s):
    N = s[7:10] / np.linalg.norm(s[7:10])
    return GaugeCoords(s[3:6].copy(), N, float(s[6]), s[10:13].copy()), s[0:3].copy()


def derivative(s, model, breathing_gauge=False):
    c, _ = unpack(s)
    acc = eom_accelerations(c, model, breathing_gauge)
    if isinstance(acc, IllPosed):
        raise IllPosedError(acc)
    no = c.N @ c.omega
    return np.concatenate([c.V, acc.Vdot, [no], c.omega - no * c.N, acc.Omdot])


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-8
    atol: float = 1e-8
    max_step: float = 1.0
    span: float = 10.0
    first_step: float = 1e-3
    breathing_gauge: bool = False
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.max_step > 0 and self.span > 0):
            raise ValueError("tolerances, max_step and span must be positive")


@dataclass
class Sample:
    tau: float
    coords: GaugeCoords
    position: np.ndarray


@dataclass
class Trajectory:
    samples: list = field(default_factory=list)
    m: float = 1.0
    ell: float = 1.0
    diagnosis: IllPosed | None = None
    rejected: int = 0

    @property
    def taus(self):
        return np.array([s.tau for s in self.samples])

    def states(self):
        return [state_from_gauge(s.coords, self.m, self.ell, s.tau, s.position) for s in self.samples]


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def _dp_step(f, s, h, k0):
    k = [k0]
    for i in range(1, 7):
        k.append(f(s + h * sum(a * ki for a, ki in zip(_A[i], k))))
    K = np.array(k)
    s_new = s + h * (_B @ K)
    err = h * (_E @ K)
    return s_new, err, k[6]


def _renormalize(s):
    n = np.linalg.norm(s[7:10])
    if abs(n - 1.0) > NORM_TOL:
        s = s.copy()
        s[7:10] /= n
    return s


def integrate(c0, model, cfg=IntegratorConfig(), m=1.0, ell=1.0, position=None, raise_on_ill_posed=False):
    """Adaptive Dormand-Prince integration over ``[0, cfg.span]``.

    Every accepted step is recorded.  If the Hessian turns singular the
    run stops and the diagnosis is attached to the trajectory (or raised).
    """

    def f(s):
        return derivative(s, model, cfg.breathing_gauge)

    s = pack(c0, position)
    traj = Trajectory(m=m, ell=ell)
    traj.samples.append(Sample(0.0, *unpack(s)))
    try:
        k0 = f(s)
    except IllPosedError as exc:
        if raise_on_ill_posed:
            raise
        traj.diagnosis = exc.diagnosis
        return traj
    tau, h = 0.0, min(cfg.first_step, cfg.max_step, cfg.span)
    for _ in range(cfg.max_steps):
        if tau >= cfg.span:
            return traj
        h = min(h, cfg.span - tau)
        try:
            s_new, err, k_last = _dp_step(f, s, h, k0)
        except IllPosedError as exc:
            if h > 1e-6:
                h *= 0.25
                traj.rejected += 1
                continue
            if raise_on_ill_posed:
                raise
            traj.diagnosis = exc.diagnosis
            return traj
        except DomainError:
            h *= 0.25
            traj.rejected += 1
            if h < 1e-14 * max(1.0, tau):
                raise StepFailure(f"step size underflow at tau={tau}") from None
            continue
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(s), np.abs(s_new))
        en = float(np.abs(err / scale).max())
        if en <= 1.0:
            tau += h
            s = _renormalize(s_new)
            k0 = k_last if s is s_new else f(s)
            traj.samples.append(Sample(tau, *unpack(s)))
            fac = 5.0 if en == 0 else min(5.0, 0.9 * en**-0.2)
        else:
            traj.rejected += 1
            fac = max(0.2, 0.9 * en**-0.2)
        h = min(h * fac, cfg.max_step)
        if h < 1e-14 * max(1.0, tau):
            raise StepFailure(f"step size underflow at tau={tau}")
    raise StepFailure(f"exceeded {cfg.max_steps} steps")


@dataclass(frozen=True)
class Observables:
    tau: float
    P: np.ndarray
    M: np.ndarray  # independent components M01 M02 M03 M12 M13 M23
    PP: float
    WW: float
    kk: float  # k.k / (k^0)^2; k's amplitude is arbitrary
    detH: float


_M_INDEX = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def observables(sample, model, m=1.0, ell=1.0):
    st = state_from_gauge(sample.coords, m, ell, sample.tau, sample.position)
    P, _ = momenta(st, model)
    M = angular_momentum(st, model)
    cas = casimirs_kinematic(st, model)
    c = sample.coords
    H = kernels.hessian_dense(c.V, c.N, c.omega, model.jet(*c.invariants).as_array())
    return Observables(
        sample.tau,
        P,
        np.array([M[i, j] for i, j in _M_INDEX]),
        cas.PP,
        cas.WW,
        float(dot(st.k, st.k) / st.k[0] ** 2),
        float(np.linalg.det(H)),
    )


@dataclass
class ConservationReport:
    P_drift: list
    M_drift: list
    PP_drift: float
    WW_drift: float
    max_kk: float
    n_samples: int
    span: float

    @property
    def max_P_drift(self):
        return max(self.P_drift)

    @property
    def max_M_drift(self):
        return max(self.M_drift)

    def to_dict(self):
        return {
            "P_drift": self.P_drift,
            "M_drift": self.M_drift,
            "PP_drift": self.PP_drift,
            "WW_drift": self.WW_drift,
            "max_kk": self.max_kk,
            "n_samples": self.n_samples,
            "span": self.span,
        }


def conservation_report(traj, model):
    """Maximum drift of P, M, PP and WW relative to their initial magnitudes.

    P components are measured against |P(0)|; M components against
    max(|M(0)|, m ell) since M depends on the choice of origin.
    """
    obs = [observables(s, model, traj.m, traj.ell) for s in traj.samples]
    o0 = obs[0]
    p_ref = max(float(np.linalg.norm(o0.P)), 1e-300)
    m_ref = max(float(np.linalg.norm(o0.M)), traj.m * traj.ell)
    pp_ref = max(abs(o0.PP), traj.m**2)
    ww_ref = max(abs(o0.WW), traj.m**4 * traj.ell**2)
    P = np.array([o.P for o in obs])
    M = np.array([o.M for o in obs])
    return ConservationReport(
        [float(x) for x in np.abs(P - o0.P).max(axis=0) / p_ref],
        [float(x) for x in np.abs(M - o0.M).max(axis=0) / m_ref],
        float(max(abs(o.PP - o0.PP) for o in obs) / pp_ref),
        float(max(abs(o.WW - o0.WW) for o in obs) / ww_ref),
        float(max(abs(o.kk) for o in obs)),
        len(obs),
        float(traj.samples[-1].tau),
    )


CSV_COLUMNS = (
    ["tau", "x0", "x1", "x2", "x3", "xdot0", "xdot1", "xdot2", "xdot3",
     "k0", "k1", "k2", "k3", "kdot0", "kdot1", "kdot2", "kdot3",
     "P0", "P1", "P2", "P3"]
    + [f"M{i}{j}" for i, j in _M_INDEX]
    + ["PP", "WW", "kk", "detH"]
)


def write_trajectory_csv(traj, model, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for smp in traj.samples:
        st = state_from_gauge(smp.coords, traj.m, traj.ell, smp.tau, smp.position)
        o = observables(smp, model, traj.m, traj.ell)
        row = [smp.tau, *st.x, *st.xdot, *st.k, *st.kdot, *o.P, *o.M, o.PP, o.WW, o.kk, o.detH]
        w.writerow([repr(float(v)) for v in row])


def gauge_shift_residual(model, state, psi, psidot):
    """L(x, e^psi k) - L(x, k) + m ell nu psidot for a nu-type model.

    The rescaled null vector has velocity ``e^psi (kdot + psidot k)``.  The
    residual is returned relative to ``max(|L|, m ell |nu psidot|)``.
    """
    from .observables import lagrangian_raw

    nu = getattr(model, "nu", None)
    if nu is None:
        raise TypeError("gauge shift identity applies to nu-type models")
    e = math.exp(psi)
    k2 = e * state.k
    kd2 = e * (state.kdot + psidot * state.k)
    L0 = lagrangian_raw(state.xdot, state.k, state.kdot, model, state.m, state.ell)
    L1 = lagrangian_raw(state.xdot, k2, kd2, model, state.m, state.ell)
    shift = state.m * state.ell * nu * psidot
    return abs(L1 - L0 + shift) / max(abs(L0), abs(shift), 1e-300)
