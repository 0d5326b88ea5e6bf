# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernel for the class search.

Same contract as hgkit._kernels_np.penalty_components; plain C loops over
dense tensors (d <= 16 in practice, so everything stays in cache).
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

COMPONENTS = ("jacobi", "W1(J1)", "W3(J2)", "W3(J3)", "G1(J1)",
              "W0(J1)", "W0(J2)", "W0(J3)", "C")


def penalty_components(double[:, :, ::1] C, double[:, ::1] g, double[:, ::1] gi,
                       double[:, ::1] J1, double[:, ::1] J2, double[:, ::1] J3):
    """Squared Frobenius norms of the search residual tensors (see numpy twin)."""
    cdef int d = C.shape[0]
    cdef int i, j, k, l, m, a, b
    cdef double acc, s, t1, t2, t3

    cdef double[:, :, ::1] Cl = np.empty((d, d, d))
    cdef double[:, :, ::1] Gl = np.empty((d, d, d))
    cdef double[:, :, ::1] G = np.empty((d, d, d))
    cdef double[:, :, ::1] F1 = np.empty((d, d, d))
    cdef double[:, :, ::1] F2 = np.empty((d, d, d))
    cdef double[:, :, ::1] F3 = np.empty((d, d, d))
    cdef double[:, :, ::1] FJ = np.empty((d, d, d))
    cdef double[:, :, ::1] X = np.empty((d, d, d))
    cdef double[:, ::1] J

    cdef double sq_jac = 0.0, sq_w1 = 0.0, sq_w32 = 0.0, sq_w33 = 0.0
    cdef double sq_g1 = 0.0, sq_f1 = 0.0, sq_f2 = 0.0, sq_f3 = 0.0, sq_c = 0.0

    # Jacobi: X[i,j,k,m] = sum_l C[i,j,l] C[l,k,m], then the cyclic sum
    cdef double[:, :, :, ::1] XJ = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(d):
            for l in range(d):
                t1 = C[i, j, l]
                if t1 != 0.0:
                    for k in range(d):
                        for m in range(d):
                            XJ[i, j, k, m] += t1 * C[l, k, m]
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for m in range(d):
                    acc = XJ[i, j, k, m] + XJ[j, k, i, m] + XJ[k, i, j, m]
                    sq_jac += acc * acc

    # Koszul
    for i in range(d):
        for j in range(d):
            for k in range(d):
                acc = 0.0
                for m in range(d):
                    acc += C[i, j, m] * g[m, k]
                Cl[i, j, k] = acc
    for i in range(d):
        for j in range(d):
            for k in range(d):
                Gl[i, j, k] = 0.5 * (Cl[i, j, k] - Cl[j, k, i] + Cl[k, i, j])
    for i in range(d):
        for j in range(d):
            for k in range(d):
                acc = 0.0
                for m in range(d):
                    acc += Gl[i, j, m] * gi[m, k]
                G[i, j, k] = acc

    # structural tensors: F[i,j,k] = sum_m (nabla_i J)^m_j g[m,k]
    for a in range(3):
        if a == 0:
            J = J1
        elif a == 1:
            J = J2
        else:
            J = J3
        for i in range(d):
            for j in range(d):
                for m in range(d):
                    # X[i,m,j] holds (nabla_i J)^m_j
                    acc = 0.0
                    for l in range(d):
                        acc += J[l, j] * G[i, l, m] - G[i, j, l] * J[m, l]
                    X[i, m, j] = acc
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    acc = 0.0
                    for m in range(d):
                        acc += X[i, m, j] * g[m, k]
                    if a == 0:
                        F1[i, j, k] = acc
                    elif a == 1:
                        F2[i, j, k] = acc
                    else:
                        F3[i, j, k] = acc

    # violations and magnitudes
    for i in range(d):
        for j in range(d):
            for k in range(d):
                t1 = F1[i, j, k]
                sq_f1 += t1 * t1
                t2 = F2[i, j, k]
                sq_f2 += t2 * t2
                t3 = F3[i, j, k]
                sq_f3 += t3 * t3
                sq_c += C[i, j, k] * C[i, j, k]
                s = F1[i, j, k] + F1[j, i, k]
                sq_w1 += s * s
                s = F2[i, j, k] + F2[j, k, i] + F2[k, i, j]
                sq_w32 += s * s
                s = F3[i, j, k] + F3[j, k, i] + F3[k, i, j]
                sq_w33 += s * s

    # polarized G1 condition: (I + P01)(F1 - F1(J1., J1., .))
    for a in range(d):
        for j in range(d):
            for k in range(d):
                acc = 0.0
                for b in range(d):
                    acc += J1[b, j] * F1[a, b, k]
                X[a, j, k] = acc
    for i in range(d):
        for j in range(d):
            for k in range(d):
                acc = 0.0
                for a in range(d):
                    acc += J1[a, i] * X[a, j, k]
                FJ[i, j, k] = acc
    for i in range(d):
        for j in range(d):
            for k in range(d):
                s = (F1[i, j, k] - FJ[i, j, k]) + (F1[j, i, k] - FJ[j, i, k])
                sq_g1 += s * s

    return np.array([sq_jac, sq_w1, sq_w32, sq_w33, sq_g1,
                     sq_f1, sq_f2, sq_f3, sq_c])
