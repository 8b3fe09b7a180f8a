"""Fundamental conditions PP = m^2, WW = -m^4 ell^2 / 4 as checkable predicates.

Two certificates are provided: direct evaluation of the closed-form
Casimirs over a grid, and the equivalent first-order PDE system in the
variables x = +-sqrt(Q), y = P, u = F^2.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .observables import casimirs_from_jet

CERT_TOL = 1e-10
DEFAULT_P = (-2.0, 2.0)
DEFAULT_Q = (0.05, 4.0)
DEFAULT_N = 50
DOMAIN_MARGIN = 0.02


@dataclass(frozen=True)
class Grid:
    p_min: float
    p_max: float
    n_p: int
    q_min: float
    q_max: float
    n_q: int

    def __post_init__(self):
        if not (self.p_min <= self.p_max and self.q_min <= self.q_max):
            raise ValueError("grid bounds must be ordered")
        if self.n_p < 1 or self.n_q < 1:
            raise ValueError("grid needs at least one point per axis")

    @classmethod
    def parse(cls, text):
        """Parse ``Pmin:Pmax:n,Qmin:Qmax:n``."""
        try:
            pa, qa = text.split(",")
            p0, p1, n_p = pa.split(":")
            q0, q1, n_q = qa.split(":")
            return cls(float(p0), float(p1), int(n_p), float(q0), float(q1), int(n_q))
        except ValueError as exc:
            raise ValueError(f"bad grid spec {text!r}: expected Pmin:Pmax:n,Qmin:Qmax:n") from exc

    def p_values(self):
        return np.linspace(self.p_min, self.p_max, self.n_p)

    def q_values(self):
        return np.linspace(self.q_min, self.q_max, self.n_q)

    def points(self):
        """Row-major: P is the slow index, Q the fast one."""
        return [(float(p), float(q)) for p in self.p_values() for q in self.q_values()]

    def to_dict(self):
        return asdict(self)


def q_domain(model, lo=1e-8, hi=DEFAULT_Q[1], samples=4000, P=0.0):
    """Empirical Q-interval (at fixed P) where the model evaluates.

    Returns the largest contiguous run of admissible samples, or ``None``.
    """
    qs = np.linspace(lo, hi, samples)
    ok = np.array([model.in_domain(P, q) for q in qs])
    if not ok.any():
        return None
    best, start, best_span = None, None, -1
    for i, flag in enumerate(list(ok) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best_span:
                best, best_span = (start, i - 1), i - start
            start = None
    i0, i1 = best
    return float(qs[i0]), float(qs[i1])


def default_grid(model, n=DEFAULT_N):
    """50x50 grid over P in [-2, 2], Q in [0.05, 4], clipped to the model's Q-domain.

    A small margin is kept from domain edges that fall inside the default
    range. When the domain lies entirely below Q = 0.05, the inner part of
    the domain itself is used so the grid is never empty.
    """
    lo_s, hi_s = 1e-8, 1.05 * DEFAULT_Q[1]
    dom = q_domain(model, lo=lo_s, hi=hi_s)
    if dom is None:
        raise DomainError("model has no admissible Q in (0, 4]")
    lo, hi = dom
    pad = DOMAIN_MARGIN * (hi - lo)
    lo_m = lo + pad if lo > lo_s else lo
    hi_m = hi - pad if hi < hi_s else hi
    q0, q1 = max(DEFAULT_Q[0], lo_m), min(DEFAULT_Q[1], hi_m)
    if q0 >= q1:
        q0, q1 = lo_m, hi_m
    return Grid(DEFAULT_P[0], DEFAULT_P[1], n, q0, q1, n)


def domain_points(model, grid):
    pts = [(p, q) for p, q in grid.points() if model.in_domain(p, q)]
    if not pts:
        raise DomainError("grid and model domain do not intersect")
    return pts


@dataclass(frozen=True)
class RecastPoint:
    x: float
    y: float
    u: float
    ux: float
    uy: float


def recast_from_jet(jet, P, Q, xsign=1):
    """Express the jet in x = xsign * sqrt(Q), y = P, u = F^2."""
    if not Q > 0.0:
        raise DomainError("recast needs Q > 0")
    if jet.F == 0.0:
        raise DomainError("recast needs F != 0")
    x = xsign * math.sqrt(Q)
    u = jet.F**2
    # dQ/dx = 2x at fixed y
    ux = 2 * jet.F * jet.FQ * 2 * x
    uy = 2 * jet.F * jet.FP
    return RecastPoint(x, P, u, ux, uy)


def pde_residuals(p):
    x, y, u, ux, uy = p.x, p.y, p.u, p.ux, p.uy
    r1 = 4 * u**2 - 4 * u * (1 + x * ux + y * uy) + 2 * x * y * ux * uy + (y**2 - x**2) * uy**2
    r2 = 2 * u + 2 * u * ux - y * ux * uy + x * uy**2
    return r1, r2


def _jets(model, points):
    return [model.jet(P, Q) for P, Q in points]


def _residual_maxima(jets, points):
    out = {}
    for xs in (1, -1):
        r1m = r2m = 0.0
        for jet, (P, Q) in zip(jets, points):
            r1, r2 = pde_residuals(recast_from_jet(jet, P, Q, xs))
            r1m, r2m = max(r1m, abs(r1)), max(r2m, abs(r2))
        out[xs] = (r1m, r2m)
    return out


@dataclass
class PdeReport:
    by_xsign: dict
    certified_xsign: int | None
    max_r1: float
    max_r2: float


def pde_report(model, points, tol=CERT_TOL, jets=None):
    """Residual maxima for both x-sign branches; names the one that annihilates both."""
    by = _residual_maxima(jets if jets is not None else _jets(model, points), points)
    best = min(by, key=lambda s: max(by[s]))
    r1, r2 = by[best]
    ok = max(r1, r2) < tol
    return PdeReport({str(k): list(v) for k, v in by.items()}, best if ok else None, r1, r2)


@dataclass
class CertificationReport:
    model: dict | None
    branch: dict
    grid: dict | None
    n_points: int
    max_pp_dev: float
    max_ww_dev: float
    pde_max_r1: float
    pde_max_r2: float
    certified: bool
    m: float = 1.0
    ell: float = 1.0
    pde_by_xsign: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _f_sign(jets):
    signs = {int(math.copysign(1, j.F)) for j in jets}
    return signs.pop() if len(signs) == 1 else "mixed"


def verify_fundamental(model, points=None, m=1.0, ell=1.0, tol=CERT_TOL, grid=None):
    """Certify PP = m^2 and WW = -m^4 ell^2/4 over grid points.

    ``points`` must lie in the model domain (DomainError otherwise); when
    omitted the default grid intersected with the domain is used.
    """
    if points is None:
        grid = grid if grid is not None else default_grid(model)
        points = domain_points(model, grid)
    jets = _jets(model, points)
    pp_dev = ww_dev = 0.0
    for jet, (P, Q) in zip(jets, points):
        cas = casimirs_from_jet(jet, P, Q, m, ell)
        pp_dev = max(pp_dev, abs(cas.PP - m**2) / m**2)
        ww_dev = max(ww_dev, abs(cas.WW + 0.25 * m**4 * ell**2) / (m**4 * ell**2))
    pde = pde_report(model, points, tol, jets)
    certified = pp_dev < tol and ww_dev < tol
    try:
        spec = model.to_dict()
    except TypeError:
        spec = None
    branch = {
        "x_sign": pde.certified_xsign,
        "F_sign": _f_sign(jets),
        "selectors": list(getattr(model, "signs", ())),
    }
    return CertificationReport(
        model=spec,
        branch=branch,
        grid=grid.to_dict() if grid is not None else None,
        n_points=len(points),
        max_pp_dev=float(pp_dev),
        max_ww_dev=float(ww_dev),
        pde_max_r1=float(pde.max_r1),
        pde_max_r2=float(pde.max_r2),
        certified=bool(certified),
        m=m,
        ell=ell,
        pde_by_xsign=pde.by_xsign,
    )
