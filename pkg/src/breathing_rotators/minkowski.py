"""Four-vector algebra in Minkowski space, signature (+,-,-,-).

Four-vectors are plain ``numpy`` arrays of shape ``(4,)`` holding
contravariant components.  Antisymmetric rank-2 tensors are ``(4, 4)``
arrays with both indices down.
"""

from __future__ import annotations

import itertools

import numpy as np

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def _levi_civita():
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


# eps^{0123} = +1, all indices up
LEVI_CIVITA = _levi_civita()


def four(c0, c1, c2, c3):
    return np.array([c0, c1, c2, c3], dtype=float)


def dot(a, b):
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]


def lower(a):
    """Lower the index of a four-vector (or the first index of a tensor)."""
    return METRIC @ a


def gram_matrix(*vectors):
    return np.array([[dot(a, b) for b in vectors] for a in vectors])


def gramian3(P, Pi, k):
    """Determinant of the 3x3 matrix of mutual scalar products of ``P``, ``Pi``, ``k``."""
    g = gram_matrix(P, Pi, k)
    return (
        g[0, 0] * (g[1, 1] * g[2, 2] - g[1, 2] * g[2, 1])
        - g[0, 1] * (g[1, 0] * g[2, 2] - g[1, 2] * g[2, 0])
        + g[0, 2] * (g[1, 0] * g[2, 1] - g[1, 1] * g[2, 0])
    )


def wedge(a, b):
    """Covariant antisymmetric tensor a_mu b_nu - a_nu b_mu."""
    al, bl = lower(a), lower(b)
    return np.outer(al, bl) - np.outer(bl, al)


def pauli_lubanski(M, P):
    """W^mu = -1/2 eps^{mu alpha beta gamma} M_{alpha beta} P_gamma.

    ``M`` has both indices down, ``P`` is contravariant; the result is
    contravariant.
    """
    return -0.5 * np.einsum("mabc,ab,c->m", LEVI_CIVITA, M, lower(P))


def boost(rapidity, direction):
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(4)
    L[0, 0] = ch
    L[0, 1:] = L[1:, 0] = sh * n
    L[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return L


def rotation(R):
    L = np.eye(4)
    L[1:, 1:] = R
    return L


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_lorentz(rng, max_rapidity=1.0):
    """A proper orthochronous transformation: rotation composed with a boost."""
    direction = rng.normal(size=3)
    return boost(rng.uniform(-max_rapidity, max_rapidity), direction) @ rotation(
        random_rotation(rng)
    )
