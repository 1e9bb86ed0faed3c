# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Mirrors ``_kernels_py`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot, copysign

cnp.import_array()


def jacobi_eigh(a, double tol, int max_sweeps):
    """Cyclic Jacobi on a copy of ``a``; returns (diag, V, sweeps), sweeps=-1 if not converged."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t d = A.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] V = np.eye(d, dtype=np.float64)
    cdef double[:, ::1] am = A
    cdef double[:, ::1] vm = V
    cdef int sweep = _jacobi(am, vm, tol, max_sweeps)
    return np.diagonal(A).copy(), V, sweep


cdef int _jacobi(double[:, ::1] a, double[:, ::1] v, double tol, int max_sweeps) nogil:
    cdef Py_ssize_t d = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef double fro = 0.0, off, apq, theta, t, c, s, x, y
    cdef int sweep
    for p in range(d):
        for q in range(d):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(d - 1):
            for q in range(p + 1, d):
                off += a[p, q] * a[p, q]
        off = sqrt(2.0 * off)
        if off <= tol * fro:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = copysign(1.0, theta) / (fabs(theta) + hypot(theta, 1.0))
                c = 1.0 / hypot(t, 1.0)
                s = t * c
                for k in range(d):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(d):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(d):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    return -1


def quantize_codes(x, lam, t):
    """2-bit codes of x + lam*t at per-column resolution lam; lam==0 columns get code 2."""
    cdef const double[:, ::1] xm = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] lm = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double[:, ::1] tm = np.ascontiguousarray(t, dtype=np.float64)
    cdef Py_ssize_t n = xm.shape[0], d = xm.shape[1], i, j
    out = np.empty((n, d), dtype=np.uint8)
    cdef unsigned char[:, ::1] om = out
    cdef double l, dl, val
    with nogil:
        for i in range(n):
            for j in range(d):
                l = lm[j]
                if l == 0.0:
                    om[i, j] = 2
                    continue
                dl = l * tm[i, j]
                val = xm[i, j] + dl
                if val < -l:
                    om[i, j] = 0
                elif val < 0.0:
                    om[i, j] = 1
                elif val < l:
                    om[i, j] = 2
                else:
                    om[i, j] = 3
    return out


def pack_codes(codes):
    cdef const unsigned char[::1] cm = np.ascontiguousarray(codes, dtype=np.uint8).ravel()
    cdef Py_ssize_t m = cm.shape[0], k
    out = np.zeros((m + 3) // 4, dtype=np.uint8)
    cdef unsigned char[::1] om = out
    with nogil:
        for k in range(m):
            om[k >> 2] |= (cm[k] & 3) << (2 * (k & 3))
    return out.tobytes()


def unpack_codes(const unsigned char[::1] buf, Py_ssize_t count):
    out = np.empty(count, dtype=np.uint8)
    cdef unsigned char[::1] om = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(count):
            om[k] = (buf[k >> 2] >> (2 * (k & 3))) & 3
    return out
