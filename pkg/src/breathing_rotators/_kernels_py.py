"""Pure-Python kernels; reference implementation and import-time fallback.

``_ckernels`` (Cython) implements the same three functions with identical
signatures.  :mod:`breathing_rotators.kernels` picks one at import.
"""

import math

import numpy as np

from .jets import Jet


def gauge_scalars(V, N, Om):
    vv = V @ V
    gamma = 1.0 / math.sqrt(1.0 - vv)
    chi = 1.0 / (1.0 - N @ V)
    P = gamma * chi * (N @ Om - V @ Om)
    Q = chi**2 * (Om @ Om - (N @ Om) ** 2)
    zeta = gamma * chi * (V @ Om)
    return gamma, chi, zeta, P, Q


def block_coefficients(V, N, Om, jet):
    """Expansion coefficients of the three Hessian blocks.

    Returns ``(c0, C)`` with ``c0[b]`` the identity coefficient of block ``b``
    (order VV, VOmega, OmegaOmega) and ``C[b, i, j]`` the coefficient of
    ``u_i u_j^T`` for ``u = (N, V, Omega)``.
    """
    F, FP, FQ, FPP, FPQ, FQQ = jet
    g, c, zeta, P, Q = gauge_scalars(V, N, Om)
    pz = P + zeta
    A1 = FP + P * FPP + 2 * Q * FPQ
    B1 = P * FPQ + 2 * (FQ + Q * FQQ)
    c0 = np.empty(3)
    C = np.zeros((3, 3, 3))

    c0[0] = (F - P * FP) * g
    C[0, 1, 1] = g**3 * (F - P * (FP + P * FPP))
    C[0, 2, 2] = -g * c**2 * FPP
    C[0, 0, 0] = -(c**2) / g * (P * (2 * FP + P * FPP) + 2 * Q * (3 * FQ + 2 * (P * FPQ + Q * FQQ)))
    C[0, 0, 1] = C[0, 1, 0] = -g * c * (P**2 * FPP + 2 * Q * (P * FPQ - FQ))
    C[0, 0, 2] = C[0, 2, 0] = c**2 * A1
    C[0, 1, 2] = C[0, 2, 1] = g**2 * c * P * FPP

    c0[1] = c * FP
    C[1, 2, 2] = 2 * c**3 * FPQ
    C[1, 1, 1] = g**2 * c * P * FPP
    C[1, 0, 0] = c**2 / g**2 * (2 * pz * B1 - g**2 * A1)
    C[1, 0, 1] = c**2 * A1
    C[1, 0, 2] = -2 * c**3 / g * B1
    C[1, 1, 0] = c * (2 * pz * (P * FPQ - FQ) - g**2 * P * FPP)
    C[1, 2, 1] = -g * c**2 * FPP
    C[1, 1, 2] = -2 * g * c**2 * (P * FPQ - FQ)
    C[1, 2, 0] = c**2 / g * (g**2 * FPP - 2 * pz * FPQ)

    c0[2] = -2 * c**2 / g * FQ
    C[2, 1, 1] = -g * c**2 * FPP
    C[2, 2, 2] = -4 * c**4 / g * FQQ
    C[2, 0, 0] = c**2 / g**3 * (g**2 * (2 * FQ + 4 * pz * FPQ - g**2 * FPP) - 4 * pz**2 * FQQ)
    C[2, 0, 1] = C[2, 1, 0] = c**2 / g * (g**2 * FPP - 2 * pz * FPQ)
    C[2, 1, 2] = C[2, 2, 1] = 2 * c**3 * FPQ
    C[2, 0, 2] = C[2, 2, 0] = 2 * c**3 / g**2 * (2 * pz * FQQ - g**2 * FPQ)
    return c0, C


def hessian_dense(V, N, Om, jet):
    """The 6x6 Hessian of the gauge Lagrangian in (V, Omega)."""
    c0, C = block_coefficients(V, N, Om, jet)
    U = np.array([N, V, Om])
    blocks = [c0[b] * np.eye(3) + U.T @ C[b] @ U for b in range(3)]
    H = np.empty((6, 6))
    H[:3, :3] = blocks[0]
    H[:3, 3:] = blocks[1]
    H[3:, :3] = blocks[1].T
    H[3:, 3:] = blocks[2]
    return H


def kinematic_jet(V, K, Kd):
    """Value, gradient and Hessian of (sqrt(1-V.V), P, Q) over z = (V, K, Kdot).

    ``K`` is the spatial part of the null vector (k = (|K|, K)) and ``Kd`` its
    parameter derivative.
    """
    z = Jet.variables(list(V) + list(K) + list(Kd))
    v, k, kd = z[0:3], z[3:6], z[6:9]

    def d3(a, b):
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    r2 = d3(k, k)
    r = r2.sqrt()
    root = (1.0 - d3(v, v)).sqrt()
    kv = d3(k, v)
    b = r - kv  # r (1 - N.V)
    kkd = d3(k, kd)
    P = (kkd / r - d3(v, kd)) / (b * root)
    Q = (d3(kd, kd) - kkd * kkd / r2) / (b * b)
    outs = (root, P, Q)
    vals = np.array([o.val for o in outs])
    grads = np.array([o.grad for o in outs])
    hess = np.array([o.hess for o in outs])
    return vals, grads, hess
