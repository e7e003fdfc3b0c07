# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pure``; same signatures and output order."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, sqrt, M_PI

cnp.import_array()

cdef double RHO = sqrt(3.0) / 2.0
cdef double PHI = M_PI / 3.0


def minmax_eval(const double[::1] x, Py_ssize_t n, Py_ssize_t d, bint dual):
    cdef Py_ssize_t P = n * (n - 1) // 2
    cdef Py_ssize_t w = 2 * d + 1
    g_arr = np.empty(2 * P)
    jv_arr = np.empty(2 * P * w)
    cdef double[::1] g = g_arr
    cdef double[::1] jv = jv_arr
    cdef double t = x[n * d]
    cdef double D, delta
    cdef Py_ssize_t i, j, k, p = 0, o1, o2
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                o1 = p * w
                o2 = (P + p) * w
                D = 0.0
                for k in range(d):
                    delta = x[i * d + k] - x[j * d + k]
                    D += delta * delta
                    jv[o1 + k] = -2.0 * delta
                    jv[o1 + d + k] = 2.0 * delta
                    jv[o2 + k] = 2.0 * delta
                    jv[o2 + d + k] = -2.0 * delta
                if dual:
                    g[p] = t - D
                    g[P + p] = D - 1.0
                    jv[o1 + 2 * d] = 1.0
                    jv[o2 + 2 * d] = 0.0
                else:
                    g[p] = 1.0 - D
                    g[P + p] = D - t
                    jv[o1 + 2 * d] = 0.0
                    jv[o2 + 2 * d] = -1.0
                p += 1
    return g_arr, jv_arr


def circles_eval(const double[::1] x, Py_ssize_t n):
    cdef Py_ssize_t P = n * (n - 1) // 2
    g_arr = np.empty(5 * n + P)
    jv_arr = np.empty(12 * n + 2 * n + 6 * P)
    cdef double[::1] g = g_arr
    cdef double[::1] jv = jv_arr
    cdef double a = x[3 * n]
    cdef double xi, yi, r, dx, dy, S
    cdef Py_ssize_t i, j, p = 0, o
    with nogil:
        for i in range(n):
            xi = x[2 * i]
            yi = x[2 * i + 1]
            r = x[2 * n + i]
            g[4 * i] = r - xi
            g[4 * i + 1] = xi + r - a
            g[4 * i + 2] = r - yi
            g[4 * i + 3] = yi + r - 2.0 + a
            o = 12 * i
            jv[o] = -1.0; jv[o + 1] = 1.0; jv[o + 2] = 0.0
            jv[o + 3] = 1.0; jv[o + 4] = 1.0; jv[o + 5] = -1.0
            jv[o + 6] = -1.0; jv[o + 7] = 1.0; jv[o + 8] = 0.0
            jv[o + 9] = 1.0; jv[o + 10] = 1.0; jv[o + 11] = 1.0
            g[4 * n + i] = r - 0.5 * a
            jv[12 * n + 2 * i] = 1.0
            jv[12 * n + 2 * i + 1] = -0.5
        for i in range(n):
            for j in range(i + 1, n):
                dx = x[2 * i] - x[2 * j]
                dy = x[2 * i + 1] - x[2 * j + 1]
                S = x[2 * n + i] + x[2 * n + j]
                g[5 * n + p] = S * S - dx * dx - dy * dy
                o = 14 * n + 6 * p
                jv[o] = -2.0 * dx
                jv[o + 1] = -2.0 * dy
                jv[o + 2] = 2.0 * dx
                jv[o + 3] = 2.0 * dy
                jv[o + 4] = 2.0 * S
                jv[o + 5] = 2.0 * S
                p += 1
    return g_arr, jv_arr


def hex_eval(const double[::1] x, Py_ssize_t n, bint literal):
    cdef Py_ssize_t P = n * (n - 1) // 2
    cdef Py_ssize_t m = 36 * n + (18 * n if literal else 0) + 4 * P
    cdef Py_ssize_t nnz = 144 * n + (54 * n if literal else 0) + (84 if literal else 58) * P
    g_arr = np.empty(m)
    jv_arr = np.empty(nnz)
    sv_arr = np.empty((n, 6))
    cv_arr = np.empty((n, 6))
    A_arr = np.empty((n, 6))
    B_arr = np.empty((n, 6))
    cdef double[::1] g = g_arr
    cdef double[::1] jv = jv_arr
    cdef double[:, ::1] sv = sv_arr
    cdef double[:, ::1] cv = cv_arr
    cdef double[:, ::1] A = A_arr
    cdef double[:, ::1] B = B_arr
    cdef double outs[6]
    cdef double outc[6]
    cdef double R = x[0]
    cdef double xi, yi, th, lam, Ak, Bk, Ck, vx, vy
    cdef double s_sum, ax, by, sep, lBi, lBj, lAi, lAj, dCi, dCj, xk, yk
    cdef Py_ssize_t i, j, k, q, p, row = 0, o = 0, base, lam0, h, a0, b0, c0
    with nogil:
        for k in range(6):
            outs[k] = sin(k * PHI)
            outc[k] = cos(k * PHI)
        for i in range(n):
            th = x[1 + 2 * n + i]
            for j in range(6):
                sv[i, j] = sin(th + (j + 0.5) * PHI)
                cv[i, j] = cos(th + (j + 0.5) * PHI)
                A[i, j] = sin(th + j * PHI)
                B[i, j] = cos(th + j * PHI)
        # containment
        for i in range(n):
            xi = x[1 + 2 * i]
            yi = x[2 + 2 * i]
            for j in range(6):
                vx = xi + sv[i, j]
                vy = yi + cv[i, j]
                for k in range(6):
                    g[row] = -(R * RHO + outs[k] * vx + outc[k] * vy)
                    jv[o] = -RHO
                    jv[o + 1] = -outs[k]
                    jv[o + 2] = -outc[k]
                    jv[o + 3] = -(cv[i, j] * outs[k] - sv[i, j] * outc[k])
                    row += 1
                    o += 4
        if literal:
            a0 = 1 + 3 * n
            b0 = a0 + 6 * n
            c0 = b0 + 6 * n
            lam0 = c0 + 6 * n
            for i in range(n):
                for j in range(6):
                    g[row] = x[a0 + 6 * i + j] - A[i, j]
                    jv[o] = 1.0
                    jv[o + 1] = -B[i, j]
                    row += 1
                    o += 2
            for i in range(n):
                for j in range(6):
                    g[row] = x[b0 + 6 * i + j] - B[i, j]
                    jv[o] = 1.0
                    jv[o + 1] = A[i, j]
                    row += 1
                    o += 2
            for i in range(n):
                xi = x[1 + 2 * i]
                yi = x[2 + 2 * i]
                for j in range(6):
                    g[row] = x[c0 + 6 * i + j] - (x[a0 + 6 * i + j] * xi + x[b0 + 6 * i + j] * yi - RHO)
                    jv[o] = 1.0
                    jv[o + 1] = -xi
                    jv[o + 2] = -yi
                    jv[o + 3] = -x[a0 + 6 * i + j]
                    jv[o + 4] = -x[b0 + 6 * i + j]
                    row += 1
                    o += 5
            p = 0
            for i in range(n):
                for j in range(i + 1, n):
                    base = lam0 + 12 * p
                    s_sum = 0.0
                    ax = 0.0
                    by = 0.0
                    sep = 0.0
                    for q in range(12):
                        h = i if q < 6 else j
                        k = q % 6
                        lam = x[base + q]
                        Ak = x[a0 + 6 * h + k]
                        Bk = x[b0 + 6 * h + k]
                        Ck = x[c0 + 6 * h + k]
                        s_sum += lam
                        ax += lam * Ak
                        by += lam * Bk
                        sep += lam * Ck
                        jv[o + q] = 1.0
                        jv[o + 12 + q] = Ak
                        jv[o + 24 + q] = lam
                        jv[o + 36 + q] = Bk
                        jv[o + 48 + q] = lam
                        jv[o + 60 + q] = -Ck
                        jv[o + 72 + q] = -lam
                    g[row] = s_sum - 1.0
                    g[row + 1] = ax
                    g[row + 2] = by
                    g[row + 3] = -sep
                    row += 4
                    o += 84
                    p += 1
        else:
            lam0 = 1 + 3 * n
            p = 0
            for i in range(n):
                for j in range(i + 1, n):
                    base = lam0 + 12 * p
                    s_sum = 0.0
                    ax = 0.0
                    by = 0.0
                    sep = 0.0
                    lAi = 0.0
                    lAj = 0.0
                    lBi = 0.0
                    lBj = 0.0
                    dCi = 0.0
                    dCj = 0.0
                    for q in range(12):
                        h = i if q < 6 else j
                        k = q % 6
                        lam = x[base + q]
                        Ak = A[h, k]
                        Bk = B[h, k]
                        xk = x[1 + 2 * h]
                        yk = x[2 + 2 * h]
                        Ck = Ak * xk + Bk * yk - RHO
                        s_sum += lam
                        ax += lam * Ak
                        by += lam * Bk
                        sep += lam * Ck
                        if q < 6:
                            lAi += lam * Ak
                            lBi += lam * Bk
                            dCi += lam * (Bk * xk - Ak * yk)
                        else:
                            lAj += lam * Ak
                            lBj += lam * Bk
                            dCj += lam * (Bk * xk - Ak * yk)
                        jv[o + q] = 1.0
                        jv[o + 12 + q] = Ak
                        jv[o + 26 + q] = Bk
                        jv[o + 40 + q] = -Ck
                    jv[o + 24] = lBi
                    jv[o + 25] = lBj
                    jv[o + 38] = -lAi
                    jv[o + 39] = -lAj
                    jv[o + 52] = -lAi
                    jv[o + 53] = -lBi
                    jv[o + 54] = -dCi
                    jv[o + 55] = -lAj
                    jv[o + 56] = -lBj
                    jv[o + 57] = -dCj
                    g[row] = s_sum - 1.0
                    g[row + 1] = ax
                    g[row + 2] = by
                    g[row + 3] = -sep
                    row += 4
                    o += 58
                    p += 1
    return g_arr, jv_arr


def al_merit(const double[::1] c, const double[::1] x, const double[::1] g,
             const double[::1] jv, const cnp.int64_t[::1] rows, const cnp.int64_t[::1] cols,
             const double[::1] y, double mu, const cnp.uint8_t[::1] is_eq):
    """Augmented Lagrangian value and gradient; returns ``(value, grad, w)``."""
    cdef Py_ssize_t nv = x.shape[0], m = g.shape[0], nnz = jv.shape[0], k
    grad_arr = np.empty(nv)
    w_arr = np.empty(m)
    cdef double[::1] grad = grad_arr
    cdef double[::1] w = w_arr
    cdef double val = 0.0, wk
    with nogil:
        for k in range(nv):
            val += c[k] * x[k]
            grad[k] = c[k]
        for k in range(m):
            wk = y[k] + mu * g[k]
            if is_eq[k]:
                val += y[k] * g[k] + 0.5 * mu * g[k] * g[k]
            else:
                if wk < 0.0:
                    wk = 0.0
                val += (wk * wk - y[k] * y[k]) / (2.0 * mu)
            w[k] = wk
        for k in range(nnz):
            grad[cols[k]] += jv[k] * w[rows[k]]
    return val, grad_arr, w_arr
