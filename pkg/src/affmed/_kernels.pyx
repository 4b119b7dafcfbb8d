# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled window scan over sorted one-dimensional samples.

Same contract as :func:`affmed._fallback.scan_windows`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY, isnan

cnp.import_array()


cdef void _scan_row(const double* y, Py_ssize_t k, Py_ssize_t m, double p,
                    double tol_eq, double* pre, double* out, Py_ssize_t* iout) noexcept nogil:
    cdef Py_ssize_t s, a, e, j, best_s, best_a
    cdef double c = y[k // 2]
    cdef double mu, sig, t, lo_v, hi_v, hw, ratio, dp
    cdef double lo = -INFINITY
    cdef double hi = INFINITY
    cdef double ms_sig = INFINITY
    cdef double ms_mu = 0.0
    cdef double wr = -1.0
    cdef bint have_p = not isnan(p)
    cdef double tie = 1e-12 * (y[k - 1] - y[0])  # sigma ties within rounding keep the earlier window
    cdef Py_ssize_t lo_a = 0, lo_s = k, hi_a = 0, hi_s = k
    cdef Py_ssize_t ms_a = 0, ms_s = k, wr_a = 0, wr_s = k

    pre[0] = 0.0
    for j in range(k):
        pre[j + 1] = pre[j] + (y[j] - c)
    dp = p - c

    for s in range(m, k + 1):
        j = 0
        for a in range(0, k - s + 1):
            e = a + s
            if y[a] == y[e - 1]:
                mu = y[a] - c
                sig = 0.0
            else:
                mu = (pre[e] - pre[a]) / s
                if j < a:
                    j = a
                while j < e and (y[j] - c) < mu:
                    j += 1
                t = ((j - a) * mu - (pre[j] - pre[a])) + ((pre[e] - pre[j]) - (e - j) * mu)
                sig = t / s
                if sig < 0.0:
                    sig = 0.0
            lo_v = mu - 2.0 * sig
            hi_v = mu + 2.0 * sig
            if lo_v > lo:
                lo = lo_v
                lo_a = a
                lo_s = s
            if hi_v < hi:
                hi = hi_v
                hi_a = a
                hi_s = s
            if sig < ms_sig - tie:
                ms_sig = sig
                ms_mu = mu
                ms_a = a
                ms_s = s
            if have_p:
                hw = 2.0 * sig
                if hw > tol_eq:
                    ratio = fabs(dp - mu) / hw
                elif fabs(dp - mu) <= tol_eq:
                    ratio = 0.0
                else:
                    ratio = INFINITY
                if ratio > wr:
                    wr = ratio
                    wr_a = a
                    wr_s = s

    if lo < y[0] - c:
        lo = y[0] - c
    if hi > y[k - 1] - c:
        hi = y[k - 1] - c
    out[0] = lo + c
    out[1] = hi + c
    out[2] = ms_mu + c
    out[3] = ms_sig
    out[4] = wr
    iout[0] = lo_a
    iout[1] = lo_s
    iout[2] = hi_a
    iout[3] = hi_s
    iout[4] = ms_a
    iout[5] = ms_s
    iout[6] = wr_a
    iout[7] = wr_s


def scan_windows(ys, Py_ssize_t m, p=None, double tol_eq=0.0):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t K = Y.shape[0]
    cdef Py_ssize_t k = Y.shape[1]
    if k < 1:
        raise ValueError("empty sample")
    if m < 1 or m > k:
        raise ValueError(f"window size m={m} outside [1, {k}]")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] P
    if p is None:
        P = np.full(K, np.nan)
    else:
        P = np.ascontiguousarray(p, dtype=np.float64).reshape(K)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] out = np.empty((K, 5))
    cdef cnp.ndarray[cnp.intp_t, ndim=2, mode="c"] iout = np.empty((K, 8), dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pre = np.empty(k + 1)
    cdef double[:, ::1] Yv = Y
    cdef double[::1] Pv = P
    cdef double[:, ::1] Ov = out
    cdef Py_ssize_t[:, ::1] Iv = iout
    cdef double[::1] prev = pre
    cdef Py_ssize_t r
    with nogil:
        for r in range(K):
            _scan_row(&Yv[r, 0], k, m, Pv[r], tol_eq, &prev[0], &Ov[r, 0], &Iv[r, 0])
    if p is None:
        out[:, 4] = np.nan
    return out, iout
