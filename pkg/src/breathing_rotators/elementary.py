"""3x3 matrices in the span of E and the nine dyads of a frame (N, V, Omega).

A matrix is stored as ``scalar * E + sum_ij coef[i, j] u_i u_j^T`` with
``u = (N, V, Omega)``.  The span is closed under sums, products,
transposition and inversion, so Schur complements can be formed without
densifying.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, DegenerateFrame, SingularMatrix

BASIS_LABELS = ("E", "NN", "NV", "NOm", "VN", "VV", "VOm", "OmN", "OmV", "OmOm")
FRAME_GRAM_TOL = 1e-12
SCALAR_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class ElemMatrix:
    scalar: float
    coef: np.ndarray  # (3, 3)
    frame: np.ndarray  # rows N, V, Omega

    @classmethod
    def identity(cls, frame, scale=1.0):
        return cls(float(scale), np.zeros((3, 3)), np.asarray(frame, dtype=float))

    @classmethod
    def from_coefficients(cls, coeffs, frame):
        """Build from the 10 coefficients ordered as ``BASIS_LABELS``."""
        c = np.asarray(coeffs, dtype=float)
        return cls(float(c[0]), c[1:].reshape(3, 3).copy(), np.asarray(frame, dtype=float))

    @property
    def coefficients(self):
        return np.concatenate([[self.scalar], self.coef.ravel()])

    @property
    def gram(self):
        return self.frame @ self.frame.T

    def dense(self):
        U = self.frame
        return self.scalar * np.eye(3) + U.T @ self.coef @ U

    def _same_frame(self, other):
        if other.frame is not self.frame and not np.array_equal(other.frame, self.frame):
            raise ValueError("elementary matrices live on different frames")

    def __add__(self, other):
        self._same_frame(other)
        return ElemMatrix(self.scalar + other.scalar, self.coef + other.coef, self.frame)

    def __sub__(self, other):
        self._same_frame(other)
        return ElemMatrix(self.scalar - other.scalar, self.coef - other.coef, self.frame)

    def __neg__(self):
        return ElemMatrix(-self.scalar, -self.coef, self.frame)

    def __mul__(self, s):
        return ElemMatrix(self.scalar * s, self.coef * s, self.frame)

    __rmul__ = __mul__

    def __matmul__(self, other):
        # (aE + U^T A U)(bE + U^T B U) = abE + U^T (aB + bA + A G B) U
        self._same_frame(other)
        a, b = self.scalar, other.scalar
        coef = a * other.coef + b * self.coef + self.coef @ self.gram @ other.coef
        return ElemMatrix(a * b, coef, self.frame)

    @property
    def T(self):
        return ElemMatrix(self.scalar, self.coef.T.copy(), self.frame)


def frame_gram_det(frame):
    return float(np.linalg.det(np.asarray(frame) @ np.asarray(frame).T))


def _check_scalar(M, rtol=SCALAR_RTOL):
    """Reject an identity coefficient that is zero relative to the dyadic part."""
    if abs(M.scalar) <= rtol * np.abs(M.gram @ M.coef).max():
        raise DecompositionError(f"identity coefficient {M.scalar:.3e} is numerically zero")


def elem_det(M):
    """Determinant through the bordered 3x3 identity.

    With ``M = s (E + N X^T + V Y^T + Omega Z^T)`` the determinant is ``s^3``
    times the 3x3 determinant with entries ``delta_ij + u_i . W_j`` where
    ``W = (X, Y, Z)``.
    """
    s = M.scalar
    _check_scalar(M)
    # W_j = sum_k coef[j, k] u_k / s, so u_i . W_j = (G coef^T)[i, j] / s
    bordered = np.eye(3) + M.gram @ M.coef.T / s
    return s**3 * float(np.linalg.det(bordered))


def invert_elem(M, frame_tol=FRAME_GRAM_TOL):
    """Inverse in the elementary basis from the 10 x 10 coefficient system.

    Unknowns are ``x0`` (identity) and ``X`` (dyads) with
    ``(x0 E + U^T X U) M = E``; matching coefficients gives
    ``x0 s = 1`` and ``x0 C + s X + X G C = 0``.
    """
    G = M.gram
    if abs(np.linalg.det(G)) < frame_tol:
        raise DegenerateFrame(f"Gram determinant of the frame is {np.linalg.det(G):.3e}")
    _check_scalar(M)
    s, C = M.scalar, M.coef
    # vec(X G C) = kron(I, (G C)^T) vec(X) for row-major vec
    A = np.zeros((10, 10))
    A[0, 0] = s
    A[1:, 0] = C.ravel()
    A[1:, 1:] = s * np.eye(9) + np.kron(np.eye(3), (G @ C).T)
    rhs = np.zeros(10)
    rhs[0] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("elementary matrix is not invertible") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularMatrix("elementary matrix is not invertible")
    return ElemMatrix(float(sol[0]), sol[1:].reshape(3, 3), M.frame)
