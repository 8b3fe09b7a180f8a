# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twins of the kernels in _kernels_py."""

from libc.math cimport sqrt
import numpy as np

cdef enum:
    NV = 9


cdef struct J9:
    double v
    double g[NV]
    double h[NV * NV]


cdef inline J9 j_var(double x, int i) noexcept nogil:
    cdef J9 r
    cdef int a
    r.v = x
    for a in range(NV):
        r.g[a] = 0.0
    for a in range(NV * NV):
        r.h[a] = 0.0
    r.g[i] = 1.0
    return r


cdef inline J9 j_add(J9 a, J9 b) noexcept nogil:
    cdef int i
    a.v += b.v
    for i in range(NV):
        a.g[i] += b.g[i]
    for i in range(NV * NV):
        a.h[i] += b.h[i]
    return a


cdef inline J9 j_sub(J9 a, J9 b) noexcept nogil:
    cdef int i
    a.v -= b.v
    for i in range(NV):
        a.g[i] -= b.g[i]
    for i in range(NV * NV):
        a.h[i] -= b.h[i]
    return a


cdef inline J9 j_rsub_const(double c, J9 a) noexcept nogil:
    cdef int i
    a.v = c - a.v
    for i in range(NV):
        a.g[i] = -a.g[i]
    for i in range(NV * NV):
        a.h[i] = -a.h[i]
    return a


cdef inline J9 j_mul(J9 a, J9 b) noexcept nogil:
    cdef J9 r
    cdef int i, j
    r.v = a.v * b.v
    for i in range(NV):
        r.g[i] = a.v * b.g[i] + b.v * a.g[i]
    for i in range(NV):
        for j in range(NV):
            r.h[i * NV + j] = (a.v * b.h[i * NV + j] + b.v * a.h[i * NV + j]
                               + a.g[i] * b.g[j] + b.g[i] * a.g[j])
    return r


cdef inline J9 j_unary(J9 a, double f, double f1, double f2) noexcept nogil:
    cdef J9 r
    cdef int i, j
    r.v = f
    for i in range(NV):
        r.g[i] = f1 * a.g[i]
    for i in range(NV):
        for j in range(NV):
            r.h[i * NV + j] = f1 * a.h[i * NV + j] + f2 * a.g[i] * a.g[j]
    return r


cdef inline J9 j_sqrt(J9 a) noexcept nogil:
    cdef double s = sqrt(a.v)
    return j_unary(a, s, 0.5 / s, -0.25 / (s * a.v))


cdef inline J9 j_recip(J9 a) noexcept nogil:
    cdef double v = a.v
    return j_unary(a, 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))


cdef inline J9 j_dot3(J9* a, J9* b) noexcept nogil:
    return j_add(j_add(j_mul(a[0], b[0]), j_mul(a[1], b[1])), j_mul(a[2], b[2]))


cdef void _store(J9* o, double[::1] vals, double[:, ::1] grads, double[:, :, ::1] hess, int row) noexcept nogil:
    cdef int i, j
    vals[row] = o.v
    for i in range(NV):
        grads[row, i] = o.g[i]
        for j in range(NV):
            hess[row, i, j] = o.h[i * NV + j]


def kinematic_jet(V, K, Kd):
    cdef double[::1] Vv = np.ascontiguousarray(V, dtype=float)
    cdef double[::1] Kv = np.ascontiguousarray(K, dtype=float)
    cdef double[::1] Dv = np.ascontiguousarray(Kd, dtype=float)
    cdef J9 v[3]
    cdef J9 k[3]
    cdef J9 kd[3]
    cdef J9 r2, r, root, kv, b, kkd, P, Q
    cdef int i
    for i in range(3):
        v[i] = j_var(Vv[i], i)
        k[i] = j_var(Kv[i], 3 + i)
        kd[i] = j_var(Dv[i], 6 + i)
    r2 = j_dot3(k, k)
    if r2.v <= 0.0:
        raise ValueError("K must be nonzero")
    r = j_sqrt(r2)
    root = j_rsub_const(1.0, j_dot3(v, v))
    if root.v <= 0.0:
        raise ValueError("|V| must be < 1")
    root = j_sqrt(root)
    kv = j_dot3(k, v)
    b = j_sub(r, kv)
    kkd = j_dot3(k, kd)
    P = j_mul(j_sub(j_mul(kkd, j_recip(r)), j_dot3(v, kd)), j_recip(j_mul(b, root)))
    Q = j_mul(j_sub(j_dot3(kd, kd), j_mul(j_mul(kkd, kkd), j_recip(r2))), j_recip(j_mul(b, b)))
    vals = np.empty(3)
    grads = np.empty((3, NV))
    hess = np.empty((3, NV, NV))
    cdef double[::1] vv = vals
    cdef double[:, ::1] gv = grads
    cdef double[:, :, ::1] hv = hess
    _store(&root, vv, gv, hv, 0)
    _store(&P, vv, gv, hv, 1)
    _store(&Q, vv, gv, hv, 2)
    return vals, grads, hess


cdef inline double d3(double* a, double* b) noexcept nogil:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


cdef void _coefficients(double* V, double* N, double* Om, double F, double FP, double FQ,
                        double FPP, double FPQ, double FQQ, double* c0, double* C) noexcept nogil:
    cdef double g = 1.0 / sqrt(1.0 - d3(V, V))
    cdef double c = 1.0 / (1.0 - d3(N, V))
    cdef double no = d3(N, Om)
    cdef double P = g * c * (no - d3(V, Om))
    cdef double Q = c * c * (d3(Om, Om) - no * no)
    cdef double zeta = g * c * d3(V, Om)
    cdef double pz = P + zeta
    cdef double A1 = FP + P * FPP + 2 * Q * FPQ
    cdef double B1 = P * FPQ + 2 * (FQ + Q * FQQ)
    cdef double c2 = c * c, c3 = c2 * c, g2 = g * g
    # C[b, i, j] at b*9 + i*3 + j
    c0[0] = (F - P * FP) * g
    C[4] = g2 * g * (F - P * (FP + P * FPP))
    C[8] = -g * c2 * FPP
    C[0] = -c2 / g * (P * (2 * FP + P * FPP) + 2 * Q * (3 * FQ + 2 * (P * FPQ + Q * FQQ)))
    C[1] = C[3] = -g * c * (P * P * FPP + 2 * Q * (P * FPQ - FQ))
    C[2] = C[6] = c2 * A1
    C[5] = C[7] = g2 * c * P * FPP

    c0[1] = c * FP
    C[9 + 8] = 2 * c3 * FPQ
    C[9 + 4] = g2 * c * P * FPP
    C[9 + 0] = c2 / g2 * (2 * pz * B1 - g2 * A1)
    C[9 + 1] = c2 * A1
    C[9 + 2] = -2 * c3 / g * B1
    C[9 + 3] = c * (2 * pz * (P * FPQ - FQ) - g2 * P * FPP)
    C[9 + 7] = -g * c2 * FPP
    C[9 + 5] = -2 * g * c2 * (P * FPQ - FQ)
    C[9 + 6] = c2 / g * (g2 * FPP - 2 * pz * FPQ)

    c0[2] = -2 * c2 / g * FQ
    C[18 + 4] = -g * c2 * FPP
    C[18 + 8] = -4 * c2 * c2 / g * FQQ
    C[18 + 0] = c2 / (g2 * g) * (g2 * (2 * FQ + 4 * pz * FPQ - g2 * FPP) - 4 * pz * pz * FQQ)
    C[18 + 1] = C[18 + 3] = c2 / g * (g2 * FPP - 2 * pz * FPQ)
    C[18 + 5] = C[18 + 7] = 2 * c3 * FPQ
    C[18 + 2] = C[18 + 6] = 2 * c3 / g2 * (2 * pz * FQQ - g2 * FPQ)


def block_coefficients(V, N, Om, jet):
    cdef double[::1] Vv = np.ascontiguousarray(V, dtype=float)
    cdef double[::1] Nv = np.ascontiguousarray(N, dtype=float)
    cdef double[::1] Ov = np.ascontiguousarray(Om, dtype=float)
    cdef double F = jet[0], FP = jet[1], FQ = jet[2], FPP = jet[3], FPQ = jet[4], FQQ = jet[5]
    c0 = np.empty(3)
    C = np.zeros((3, 3, 3))
    cdef double[::1] c0v = c0
    cdef double[:, :, ::1] Cv = C
    _coefficients(&Vv[0], &Nv[0], &Ov[0], F, FP, FQ, FPP, FPQ, FQQ, &c0v[0], &Cv[0, 0, 0])
    return c0, C


def hessian_dense(V, N, Om, jet):
    cdef double[::1] Vv = np.ascontiguousarray(V, dtype=float)
    cdef double[::1] Nv = np.ascontiguousarray(N, dtype=float)
    cdef double[::1] Ov = np.ascontiguousarray(Om, dtype=float)
    cdef double c0[3]
    cdef double C[27]
    cdef double* u[3]
    cdef int b, i, j, p, q, r0, s0
    cdef double acc
    _coefficients(&Vv[0], &Nv[0], &Ov[0], jet[0], jet[1], jet[2], jet[3], jet[4], jet[5], c0, C)
    u[0] = &Nv[0]
    u[1] = &Vv[0]
    u[2] = &Ov[0]
    H = np.empty((6, 6))
    cdef double[:, ::1] Hv = H
    cdef double blk[3][9]
    for b in range(3):
        for p in range(3):
            for q in range(3):
                acc = c0[b] if p == q else 0.0
                for i in range(3):
                    for j in range(3):
                        acc += C[b * 9 + i * 3 + j] * u[i][p] * u[j][q]
                blk[b][p * 3 + q] = acc
    for p in range(3):
        for q in range(3):
            Hv[p, q] = blk[0][p * 3 + q]
            Hv[p, 3 + q] = blk[1][p * 3 + q]
            Hv[3 + q, p] = blk[1][p * 3 + q]
            Hv[3 + p, 3 + q] = blk[2][p * 3 + q]
    return H
