"""Lagrangian shape functions F(P, Q) with exact second-order jets.

Every model implements :meth:`FModel.expr`, written once against the helpers
in :mod:`breathing_rotators.jets`.  Evaluated on floats it gives the value;
evaluated on seeded jets it gives exact first and second partials.

Sign selectors follow the convention ``signs = (outer, inner)``: the outer
sign multiplies the leading square root, the inner one multiplies sqrt(Q)
inside it.  All selectors default to ``+1``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DomainError
from .jets import Jet2

__all__ = [
    "FJet", "FModel", "Constant", "Polynomial", "FundamentalSqrt", "FundamentalNu",
    "Separable", "PolyS", "ExpS", "SqrtFundamentalS", "Deformed", "Custom",
    "ModelClass", "eval_jet", "fd_jet_check", "classify", "fundamental_starlike",
    "model_from_dict", "load_model", "dump_model",
]


@dataclass(frozen=True)
class FJet:
    F: float
    FP: float
    FQ: float
    FPP: float
    FPQ: float
    FQQ: float

    def as_array(self):
        return np.array([self.F, self.FP, self.FQ, self.FPP, self.FPQ, self.FQQ])


def _check_sign(s):
    if s not in (1, -1):
        raise ValueError(f"sign selectors must be +1 or -1, got {s!r}")
    return int(s)


class FModel:
    """Base class. Subclasses are immutable and define ``expr``."""

    kind = "abstract"
    signs: tuple = ()

    def expr(self, P, Q):
        raise NotImplementedError

    def value(self, P, Q):
        return jets.value_of(self.expr(float(P), float(Q)))

    def jet(self, P, Q):
        p, q = Jet2.variables(float(P), float(Q))
        out = self.expr(p, q)
        if not isinstance(out, Jet2):
            return FJet(float(out), 0.0, 0.0, 0.0, 0.0, 0.0)
        return FJet(out.val, out.p, out.q, out.pp, out.pq, out.qq)

    def in_domain(self, P, Q):
        try:
            v = self.value(P, Q)
        except DomainError:
            return False
        return math.isfinite(v)

    def params(self):
        return {}

    def to_dict(self):
        d = {"kind": self.kind, "params": self.params()}
        if self.signs:
            d["signs"] = list(self.signs)
        return d

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    def __repr__(self):
        return f"{type(self).__name__}({self.params()!r}, signs={self.signs!r})"


class Constant(FModel):
    """F = c.  With c = 1 this is the free particle."""

    kind = "constant"

    def __init__(self, value=1.0):
        self.c = float(value)

    def expr(self, P, Q):
        return self.c

    def params(self):
        return {"value": self.c}


class Polynomial(FModel):
    """F = sum of c_ij P^i Q^j over integer exponents i, j >= 0."""

    kind = "polynomial"

    def __init__(self, terms):
        if isinstance(terms, dict):
            terms = [(i, j, c) for (i, j), c in terms.items()]
        cleaned = []
        for i, j, c in terms:
            if int(i) != i or int(j) != j or i < 0 or j < 0:
                raise ValueError(f"polynomial exponents must be non-negative integers: {(i, j)}")
            cleaned.append((int(i), int(j), float(c)))
        self.terms = tuple(sorted(cleaned))

    def expr(self, P, Q):
        total = 0.0
        for i, j, c in self.terms:
            total = total + c * (P**i) * (Q**j)
        return total

    def params(self):
        return {"terms": [list(t) for t in self.terms]}


class FundamentalSqrt(FModel):
    """F = s1 * sqrt(1 + s2 * sqrt(Q)); the nu = 0 member of the nu-family."""

    kind = "fundamental_sqrt"

    def __init__(self, signs=(1, 1)):
        self.signs = tuple(_check_sign(s) for s in signs)

    def expr(self, P, Q):
        outer, inner = self.signs
        return outer * jets.sqrt(1.0 + inner * jets.sqrt(Q))


class FundamentalNu(FModel):
    """F = nu * P + s1 * sqrt(1 + s2 * sqrt(Q) - nu^2 Q).

    The same family is also written as F = (P +- sqrt((1 +- sqrt(Q)) a^2 - Q)) / a
    with a = 1/nu; use :meth:`from_a` for that parametrization.
    """

    kind = "fundamental_nu"

    def __init__(self, nu, signs=(1, 1)):
        self.nu = float(nu)
        self.signs = tuple(_check_sign(s) for s in signs)

    @classmethod
    def from_a(cls, a, signs=(1, 1)):
        if a == 0:
            raise ValueError("a must be nonzero")
        outer, inner = signs
        # (P + s sqrt(a^2 (...) - Q)) / a = P/a + s*sign(a) sqrt(...)
        return cls(1.0 / a, (outer * (1 if a > 0 else -1), inner))

    @property
    def a(self):
        return math.inf if self.nu == 0 else 1.0 / self.nu

    def expr(self, P, Q):
        outer, inner = self.signs
        nu = self.nu
        return nu * P + outer * jets.sqrt(1.0 + inner * jets.sqrt(Q) - nu * nu * Q)

    def params(self):
        return {"nu": self.nu}


class PolyS:
    """S(Q) = sum c_j Q^j."""

    form = "poly"

    def __init__(self, coeffs):
        self.coeffs = tuple(float(c) for c in coeffs)

    def __call__(self, Q):
        total = 0.0
        for j, c in enumerate(self.coeffs):
            total = total + c * Q**j
        return total

    def to_dict(self):
        return {"form": self.form, "coeffs": list(self.coeffs)}


class ExpS:
    """S(Q) = scale * exp(rate * Q)."""

    form = "exp"

    def __init__(self, scale=1.0, rate=1.0):
        self.scale = float(scale)
        self.rate = float(rate)

    def __call__(self, Q):
        return self.scale * jets.exp(self.rate * Q)

    def to_dict(self):
        return {"form": self.form, "scale": self.scale, "rate": self.rate}


class SqrtFundamentalS:
    """S(Q) = sqrt(1 + sign * sqrt(Q)), which makes the separable model fundamental."""

    form = "sqrt_fundamental"

    def __init__(self, sign=1):
        self.sign = _check_sign(sign)

    def __call__(self, Q):
        return jets.sqrt(1.0 + self.sign * jets.sqrt(Q))

    def to_dict(self):
        return {"form": self.form, "sign": self.sign}


_S_FORMS = {
    "poly": lambda d: PolyS(d["coeffs"]),
    "exp": lambda d: ExpS(d.get("scale", 1.0), d.get("rate", 1.0)),
    "sqrt_fundamental": lambda d: SqrtFundamentalS(d.get("sign", 1)),
}


class Separable(FModel):
    """F = sign * sqrt(1 + P^2/Q) * S(Q), the distinguished family."""

    kind = "separable"

    def __init__(self, S, sign=1):
        self.S = S
        self.signs = (_check_sign(sign),)

    def expr(self, P, Q):
        if jets.value_of(Q) <= 0.0:
            raise DomainError("separable models need Q > 0")
        return self.signs[0] * jets.sqrt(1.0 + P * P / Q) * self.S(Q)

    def params(self):
        return {"S": self.S.to_dict()}


def fundamental_starlike(signs=(1, 1)):
    """F = s1 * sqrt((1 + s2 sqrt(Q)) (1 + P^2/Q)), the separable fundamental solution."""
    outer, inner = signs
    return Separable(SqrtFundamentalS(inner), sign=outer)


class Deformed(FModel):
    """F = base + eps * term, with ``term`` a :class:`Polynomial` (default Q)."""

    kind = "deformed"

    def __init__(self, base, eps, term=None):
        self.base = base
        self.eps = float(eps)
        self.term = term if term is not None else Polynomial([(0, 1, 1.0)])

    def expr(self, P, Q):
        return self.base.expr(P, Q) + self.eps * self.term.expr(P, Q)

    def params(self):
        return {"eps": self.eps, "term": self.term.params()["terms"]}

    def to_dict(self):
        d = super().to_dict()
        d["base"] = self.base.to_dict()
        return d


class Custom(FModel):
    """User model from a closed-form expression or an exact jet supplier.

    ``expr`` must be written with :mod:`breathing_rotators.jets` helpers so it
    accepts both floats and jets.  Alternatively ``jet_fn(P, Q) -> FJet``
    supplies derivatives directly.  Custom models are not serializable.
    """

    kind = "custom"

    def __init__(self, expr=None, jet_fn=None, name="custom"):
        if (expr is None) == (jet_fn is None):
            raise ValueError("give exactly one of expr or jet_fn")
        self._expr = expr
        self._jet_fn = jet_fn
        self.name = name

    def expr(self, P, Q):
        if self._expr is None:
            return self._jet_fn(jets.value_of(P), jets.value_of(Q)).F
        return self._expr(P, Q)

    def jet(self, P, Q):
        if self._jet_fn is not None:
            return self._jet_fn(float(P), float(Q))
        return super().jet(P, Q)

    def to_dict(self):
        raise TypeError("custom models cannot be serialized")

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"Custom({self.name!r})"


def eval_jet(model, P, Q):
    return model.jet(P, Q)


_EPS = np.finfo(float).eps


def fd_jet_check(model, P, Q):
    """Max difference between the exact jet and central finite differences.

    First partials are differenced from values, second partials from the
    exact first partials, both with step cbrt(eps) * max(1, |P|, |Q|).
    """
    h = _EPS ** (1.0 / 3.0) * max(1.0, abs(P), abs(Q))
    j = model.jet(P, Q)
    f = model.value
    fp = (f(P + h, Q) - f(P - h, Q)) / (2 * h)
    fq = (f(P, Q + h) - f(P, Q - h)) / (2 * h)
    jpp, jpm = model.jet(P + h, Q), model.jet(P - h, Q)
    jqp, jqm = model.jet(P, Q + h), model.jet(P, Q - h)
    fpp = (jpp.FP - jpm.FP) / (2 * h)
    fpq = 0.5 * ((jqp.FP - jqm.FP) + (jpp.FQ - jpm.FQ)) / (2 * h)
    fqq = (jqp.FQ - jqm.FQ) / (2 * h)
    diffs = [j.FP - fp, j.FQ - fq, j.FPP - fpp, j.FPQ - fpq, j.FQQ - fqq]
    return float(max(abs(d) for d in diffs))


class ModelClass(str, enum.Enum):
    SEPARABLE = "separable"
    DEGENERATE_BRANCH = "degenerate_branch"
    GENERIC = "generic"


def classify_point(jet, P, Q, threshold=1e-10):
    scale = max(1.0, abs(jet.F))
    if abs(jet.FP * (P * P + Q) - P * jet.F) / scale < threshold:
        return ModelClass.SEPARABLE
    if abs(jet.F - P * jet.FP) / scale < threshold:
        return ModelClass.DEGENERATE_BRANCH
    return ModelClass.GENERIC


def classify(model, grid, threshold=1e-10):
    """Classify a model from the two structural expressions on a grid.

    Separable when F_P (P^2 + Q) - P F vanishes everywhere, degenerate branch
    when F - P F_P vanishes everywhere, generic otherwise.
    """
    sep = deg = 0.0
    for P, Q in grid:
        j = model.jet(P, Q)
        scale = max(1.0, abs(j.F))
        sep = max(sep, abs(j.FP * (P * P + Q) - P * j.F) / scale)
        deg = max(deg, abs(j.F - P * j.FP) / scale)
    if sep < threshold:
        return ModelClass.SEPARABLE
    if deg < threshold:
        return ModelClass.DEGENERATE_BRANCH
    return ModelClass.GENERIC


def model_from_dict(d):
    kind = d["kind"]
    params = d.get("params", {})
    signs = tuple(d.get("signs", ()))
    if kind == "constant":
        return Constant(params.get("value", 1.0))
    if kind == "polynomial":
        return Polynomial(params["terms"])
    if kind == "fundamental_sqrt":
        return FundamentalSqrt(signs or (1, 1))
    if kind == "fundamental_nu":
        if "nu" in params and "a" in params:
            raise ValueError("fundamental_nu takes either nu or a, not both (nu = 1/a)")
        if "a" in params:
            return FundamentalNu.from_a(params["a"], signs or (1, 1))
        return FundamentalNu(params["nu"], signs or (1, 1))
    if kind == "separable":
        S = params["S"]
        if S["form"] not in _S_FORMS:
            raise ValueError(f"unknown S form {S['form']!r}")
        return Separable(_S_FORMS[S["form"]](S), sign=(signs or (1,))[0])
    if kind == "deformed":
        term = params.get("term")
        return Deformed(
            model_from_dict(d["base"]),
            params["eps"],
            Polynomial(term) if term is not None else None,
        )
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))


def dump_model(model, path):
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
