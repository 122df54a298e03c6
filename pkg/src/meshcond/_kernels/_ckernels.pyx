# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: CSR products, fused CG loop, cyclic Jacobi."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign

cnp.import_array()


cdef inline void _spmv(const int[::1] indptr, const int[::1] indices,
                       const double[::1] data, const double[::1] x,
                       double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, k, n = indptr.shape[0] - 1
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


cdef inline double _dot(const double[::1] a, const double[::1] b) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(a.shape[0]):
        s += a[i] * b[i]
    return s


def csr_matvec(indptr, indices, data, x):
    cdef const int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const double[::1] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(ip.shape[0] - 1)
    cdef double[::1] ov = out
    with nogil:
        _spmv(ip, ix, dv, xv, ov)
    return out


def cg(indptr, indices, data, b, double tol, Py_ssize_t maxit):
    cdef const int[::1] ip = np.ascontiguousarray(indptr, dtype=np.int32)
    cdef const int[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const double[::1] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef Py_ssize_t n = ip.shape[0] - 1
    x_arr = np.zeros(n)
    r_arr = np.array(b, dtype=np.float64, copy=True)
    p_arr = r_arr.copy()
    ap_arr = np.empty(n)
    hist_arr = np.empty(maxit + 1)
    cdef double[::1] x = x_arr
    cdef double[::1] r = r_arr
    cdef double[::1] p = p_arr
    cdef double[::1] ap = ap_arr
    cdef double[::1] hist = hist_arr
    cdef double bnorm, rr, rr_new, pap, alpha, beta
    cdef Py_ssize_t i, k = 0, nhist = 1
    cdef Py_ssize_t breakdown = 0

    bnorm = sqrt(_dot(r, r))
    if bnorm == 0.0:
        return x_arr, np.zeros(1), 0
    rr = bnorm * bnorm
    hist[0] = 1.0
    with nogil:
        for k in range(1, maxit + 1):
            if hist[nhist - 1] <= tol:
                break
            _spmv(ip, ix, dv, p, ap)
            pap = _dot(p, ap)
            if not pap > 0.0:
                breakdown = k
                break
            alpha = rr / pap
            for i in range(n):
                x[i] += alpha * p[i]
                r[i] -= alpha * ap[i]
            rr_new = _dot(r, r)
            hist[nhist] = sqrt(rr_new) / bnorm
            nhist += 1
            beta = rr_new / rr
            for i in range(n):
                p[i] = r[i] + beta * p[i]
            rr = rr_new
    return x_arr, hist_arr[:nhist].copy(), breakdown


def jacobi_eigenvalues(a, double tol, Py_ssize_t max_sweeps):
    mat = np.array(a, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] m = mat
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t p, q, i, sweeps = 0
    cdef double apq, theta, t, c, s, u, v, total = 0.0, off, target

    for p in range(n):
        for q in range(n):
            total += m[p, q] * m[p, q]
    target = tol * sqrt(total)

    with nogil:
        while True:
            total = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        total += m[p, q] * m[p, q]
            off = sqrt(total)
            if off <= target or sweeps >= max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = m[p, q]
                    if apq == 0.0:
                        continue
                    theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for i in range(n):
                        u = m[i, p]
                        v = m[i, q]
                        m[i, p] = c * u - s * v
                        m[i, q] = s * u + c * v
                    for i in range(n):
                        u = m[p, i]
                        v = m[q, i]
                        m[p, i] = c * u - s * v
                        m[q, i] = s * u + c * v
                    m[p, q] = 0.0
                    m[q, p] = 0.0
            sweeps += 1
    return np.diag(mat).copy(), sweeps, off
