# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; semantics match ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def re_laurent(coeffs, z):
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef double complex[::1] zz = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t m = zz.shape[0], nc = c.shape[0], i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double complex w, acc
    with nogil:
        for i in range(m):
            w = 1.0 / zz[i]
            acc = 0
            for j in range(nc - 1, -1, -1):
                acc = acc * w + c[j]
            o[i] = acc.real
    return out


def polyline_min_dist(px, py, ax, ay, bx, by):
    cdef double[::1] X = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] Y = np.ascontiguousarray(py, dtype=np.float64)
    cdef double[::1] AX = np.ascontiguousarray(ax, dtype=np.float64)
    cdef double[::1] AY = np.ascontiguousarray(ay, dtype=np.float64)
    cdef double[::1] BX = np.ascontiguousarray(bx, dtype=np.float64)
    cdef double[::1] BY = np.ascontiguousarray(by, dtype=np.float64)
    cdef Py_ssize_t m = X.shape[0], ns = AX.shape[0], i, k
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double best, dx, dy, l2, t, ex, ey, d2
    with nogil:
        for i in range(m):
            best = 1e308
            for k in range(ns):
                dx = BX[k] - AX[k]
                dy = BY[k] - AY[k]
                l2 = dx * dx + dy * dy
                if l2 > 0:
                    t = ((X[i] - AX[k]) * dx + (Y[i] - AY[k]) * dy) / l2
                    if t < 0:
                        t = 0
                    elif t > 1:
                        t = 1
                else:
                    t = 0
                ex = AX[k] + t * dx - X[i]
                ey = AY[k] + t * dy - Y[i]
                d2 = ex * ex + ey * ey
                if d2 < best:
                    best = d2
            o[i] = sqrt(best)
    return out


def eta_invert(targets, eta_coeffs, v0, int iters=40, double tol=1e-14):
    cdef double complex[::1] t = np.ascontiguousarray(targets, dtype=np.complex128)
    cdef double complex[::1] c = np.ascontiguousarray(eta_coeffs, dtype=np.complex128)
    v_arr = np.array(v0, dtype=np.complex128, copy=True)
    done_arr = np.zeros(t.shape[0], dtype=np.uint8)
    cdef double complex[::1] v = v_arr
    cdef unsigned char[::1] done = done_arr
    cdef Py_ssize_t m = t.shape[0], nc = c.shape[0], i, j
    cdef int it
    cdef double complex f, d, x, step
    cdef double av
    with nogil:
        for i in range(m):
            x = v[i]
            for it in range(iters):
                f = 0
                d = 0
                for j in range(nc - 1, -1, -1):
                    d = d * x + f
                    f = f * x + c[j]
                f = f - t[i]
                if d == 0:
                    break
                step = f / d
                x = x - step
                av = sqrt(x.real * x.real + x.imag * x.imag)
                if av < 1e-300:
                    av = 1e-300
                if sqrt(step.real * step.real + step.imag * step.imag) <= tol * av:
                    done[i] = 1
                    break
            v[i] = x
    return v_arr, done_arr.astype(bool)
