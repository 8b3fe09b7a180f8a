"""Second-order forward-mode automatic differentiation.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to a fixed set of seed variables.  Arithmetic propagates all three
exactly (up to rounding), so model functions written once in terms of
:func:`sqrt`, :func:`exp` and the usual operators yield exact first and second
partials without finite differences.

The helper functions accept plain floats as well, which lets the same
expression code serve both value-only and derivative evaluation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = ["Jet", "Jet2", "sqrt", "exp", "log", "value_of"]


class Jet:
    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess):
        self.val = float(val)
        self.grad = grad
        self.hess = hess

    @classmethod
    def variables(cls, values):
        """Seed one jet per entry of ``values``."""
        n = len(values)
        eye = np.eye(n)
        return [cls(v, eye[i].copy(), np.zeros((n, n))) for i, v in enumerate(values)]

    @classmethod
    def constant(cls, c, n):
        return cls(c, np.zeros(n), np.zeros((n, n)))

    @property
    def nvars(self):
        return self.grad.shape[0]

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.nvars)

    def _unary(self, f, f1, f2):
        g = self.grad
        return Jet(f, f1 * g, f1 * self.hess + f2 * np.outer(g, g))

    def __repr__(self):
        return f"Jet({self.val!r}, grad={self.grad!r})"

    def __float__(self):
        return self.val

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.grad - other.grad, self.hess - other.hess)
        return Jet(self.val - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            cross = np.outer(a.grad, b.grad)
            return Jet(
                a.val * b.val,
                a.val * b.grad + b.val * a.grad,
                a.val * b.hess + b.val * a.hess + cross + cross.T,
            )
        return Jet(self.val * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def reciprocal(self):
        return self._unary(*_recip3(self.val))

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if other == 0:
            raise DomainError("division by zero in jet arithmetic")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, Jet):
            raise TypeError("jet exponents are not supported")
        if n == 0:
            return Jet.constant(1.0, self.nvars)
        return self._unary(*_pow3(self.val, n))

    def sqrt(self):
        return self._unary(*_sqrt3(self.val))

    def exp(self):
        return self._unary(*_exp3(self.val))

    def log(self):
        return self._unary(*_log3(self.val))


# value, first and second derivative of the elementary functions


def _recip3(v):
    if v == 0.0:
        raise DomainError("division by zero in jet arithmetic")
    return 1.0 / v, -1.0 / v**2, 2.0 / v**3


def _pow3(v, n):
    if float(n).is_integer():
        n = int(n)
        if n < 0 and v == 0.0:
            raise DomainError("negative power of zero")
        f1 = n * v ** (n - 1) if n != 1 else 1.0
        f2 = n * (n - 1) * v ** (n - 2) if n not in (1, 2) else float(n * (n - 1))
        return v**n, f1, f2
    if v <= 0.0:
        raise DomainError(f"non-integer power of non-positive value {v}")
    return v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2)


def _sqrt3(v):
    if not v > 0.0:
        raise DomainError(f"sqrt of non-positive radicand {v}")
    s = math.sqrt(v)
    return s, 0.5 / s, -0.25 / (s * v)


def _exp3(v):
    e = math.exp(v)
    return e, e, e


def _log3(v):
    if not v > 0.0:
        raise DomainError(f"log of non-positive value {v}")
    return math.log(v), 1.0 / v, -1.0 / v**2


class Jet2:
    """Jet in exactly two variables (P, Q) held in plain floats.

    Same arithmetic as :class:`Jet`; avoids array overhead for the model
    functions, which are evaluated on thousands of grid points.
    """

    __slots__ = ("val", "p", "q", "pp", "pq", "qq")

    def __init__(self, val, p=0.0, q=0.0, pp=0.0, pq=0.0, qq=0.0):
        self.val = float(val)
        self.p, self.q, self.pp, self.pq, self.qq = p, q, pp, pq, qq

    @classmethod
    def variables(cls, P, Q):
        return cls(P, 1.0, 0.0), cls(Q, 0.0, 1.0)

    def __repr__(self):
        return f"Jet2({self.val!r}, grad=({self.p!r}, {self.q!r}))"

    def __float__(self):
        return self.val

    def _unary(self, f, f1, f2):
        p, q = self.p, self.q
        return Jet2(f, f1 * p, f1 * q, f1 * self.pp + f2 * p * p,
                    f1 * self.pq + f2 * p * q, f1 * self.qq + f2 * q * q)

    def __neg__(self):
        return Jet2(-self.val, -self.p, -self.q, -self.pp, -self.pq, -self.qq)

    def __pos__(self):
        return self

    def __add__(self, o):
        if isinstance(o, Jet2):
            return Jet2(self.val + o.val, self.p + o.p, self.q + o.q,
                        self.pp + o.pp, self.pq + o.pq, self.qq + o.qq)
        return Jet2(self.val + o, self.p, self.q, self.pp, self.pq, self.qq)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Jet2):
            return Jet2(self.val - o.val, self.p - o.p, self.q - o.q,
                        self.pp - o.pp, self.pq - o.pq, self.qq - o.qq)
        return Jet2(self.val - o, self.p, self.q, self.pp, self.pq, self.qq)

    def __rsub__(self, o):
        return Jet2(o - self.val, -self.p, -self.q, -self.pp, -self.pq, -self.qq)

    def __mul__(self, o):
        if isinstance(o, Jet2):
            a, b = self.val, o.val
            return Jet2(a * b, a * o.p + b * self.p, a * o.q + b * self.q,
                        a * o.pp + b * self.pp + 2 * self.p * o.p,
                        a * o.pq + b * self.pq + self.p * o.q + self.q * o.p,
                        a * o.qq + b * self.qq + 2 * self.q * o.q)
        return Jet2(self.val * o, self.p * o, self.q * o, self.pp * o, self.pq * o, self.qq * o)

    __rmul__ = __mul__

    def reciprocal(self):
        return self._unary(*_recip3(self.val))

    def __truediv__(self, o):
        if isinstance(o, Jet2):
            return self * o.reciprocal()
        if o == 0:
            raise DomainError("division by zero in jet arithmetic")
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def __pow__(self, n):
        if isinstance(n, Jet2):
            raise TypeError("jet exponents are not supported")
        if n == 0:
            return Jet2(1.0)
        return self._unary(*_pow3(self.val, n))

    def sqrt(self):
        return self._unary(*_sqrt3(self.val))

    def exp(self):
        return self._unary(*_exp3(self.val))

    def log(self):
        return self._unary(*_log3(self.val))


_JETS = (Jet, Jet2)


def sqrt(x):
    if isinstance(x, _JETS):
        return x.sqrt()
    return _sqrt3(x)[0]


def exp(x):
    if isinstance(x, _JETS):
        return x.exp()
    return math.exp(x)


def log(x):
    if isinstance(x, _JETS):
        return x.log()
    return _log3(x)[0]


def value_of(x):
    return x.val if isinstance(x, _JETS) else float(x)
