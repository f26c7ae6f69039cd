# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled row-wise pair-sum kernels.

Each function takes a C-contiguous ``(reps, N)`` float64 array and returns
one unnormalised pair sum per row. Inner loops add nonnegative terms, so
plain accumulation is accurate to about ``N`` ulps; partial sums are then
combined with Neumaier compensation.
"""

import numpy as np

from libc.math cimport fabs, pow, sqrt


cdef inline void _neumaier(double t, double* s, double* c) noexcept nogil:
    cdef double y = s[0] + t
    if fabs(s[0]) >= fabs(t):
        c[0] += (s[0] - y) + t
    else:
        c[0] += (t - y) + s[0]
    s[0] = y


cdef inline double _term(double d, int mode, double r) noexcept nogil:
    if mode == 1:
        return d
    if mode == 2:
        return d * d
    if mode == 3:
        return d * sqrt(d)
    if mode == 4:
        return sqrt(d)
    return pow(d, r)


cdef inline double _row_tail(const double* x, Py_ssize_t i, Py_ssize_t n, int mode, double r) noexcept nogil:
    # sum over j > i of |x_i - x_j|**r, four accumulators for instruction-level parallelism
    cdef double xi = x[i], a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0
    cdef Py_ssize_t j = i + 1
    while j + 3 < n:
        a0 += _term(fabs(xi - x[j]), mode, r)
        a1 += _term(fabs(xi - x[j + 1]), mode, r)
        a2 += _term(fabs(xi - x[j + 2]), mode, r)
        a3 += _term(fabs(xi - x[j + 3]), mode, r)
        j += 4
    while j < n:
        a0 += _term(fabs(xi - x[j]), mode, r)
        j += 1
    return (a0 + a1) + (a2 + a3)


def pair_power_sums(const double[:, ::1] x, double r):
    """Sum over i < j of ``|x_i - x_j| ** r`` for every row."""
    cdef Py_ssize_t reps = x.shape[0], n = x.shape[1], b, i
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s, c
    cdef int mode = 0
    if r == 1.0:
        mode = 1
    elif r == 2.0:
        mode = 2
    elif r == 1.5:
        mode = 3
    elif r == 0.5:
        mode = 4
    with nogil:
        for b in range(reps):
            s = 0.0
            c = 0.0
            for i in range(n - 1):
                _neumaier(_row_tail(&x[b, 0], i, n, mode, r), &s, &c)
            o[b] = s + c
    return out


def sq_diff_sums(const double[:, ::1] x):
    """Sum over i < j of ``(x_i - x_j) ** 2``, as ``N * sum((x - mean) ** 2)``."""
    cdef Py_ssize_t reps = x.shape[0], n = x.shape[1], b, i
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef double s, c, mean, d
    with nogil:
        for b in range(reps):
            s = 0.0
            c = 0.0
            for i in range(n):
                _neumaier(x[b, i], &s, &c)
            mean = (s + c) / n
            s = 0.0
            c = 0.0
            for i in range(n):
                d = x[b, i] - mean
                _neumaier(d * d, &s, &c)
            o[b] = n * (s + c)
    return out


def abs_diff_sums_sorted(const double[:, ::1] xs):
    """Sum over i < j of ``|x_i - x_j|`` for rows sorted ascending.

    Uses the gap form ``sum_k k (N - k) (x_(k+1) - x_(k))``: every term is
    nonnegative, so nothing cancels even for nearly constant rows.
    """
    cdef Py_ssize_t reps = xs.shape[0], n = xs.shape[1], b, k
    out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef double a0, a1
    with nogil:
        for b in range(reps):
            a0 = 0.0
            a1 = 0.0
            k = 1
            while k + 1 < n:
                a0 += <double>(k * (n - k)) * (xs[b, k] - xs[b, k - 1])
                a1 += <double>((k + 1) * (n - k - 1)) * (xs[b, k + 1] - xs[b, k])
                k += 2
            if k < n:
                a0 += <double>(k * (n - k)) * (xs[b, k] - xs[b, k - 1])
            o[b] = a0 + a1
    return out
