# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see _kernels_py for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY
from libc.stdlib cimport qsort, malloc, free

cdef struct Keyed:
    double value
    Py_ssize_t index


cdef int _cmp_keyed(const void* pa, const void* pb) noexcept nogil:
    # (value, index) ordering == numpy's stable argsort for non-NaN input
    cdef const Keyed* a = <const Keyed*>pa
    cdef const Keyed* b = <const Keyed*>pb
    if a.value < b.value:
        return -1
    if a.value > b.value:
        return 1
    return (a.index > b.index) - (a.index < b.index)

cnp.import_array()

# above this node size numpy's stable sort beats qsort with a comparator
PRESORT_MIN_ROWS = 128

METRIC_EUCLIDEAN = 0
METRIC_MINKOWSKI3 = 1
METRIC_COSINE = 2


def best_split(X, Y, Py_ssize_t min_leaf=1):
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[:, ::1] y = np.ascontiguousarray(Y, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], m = y.shape[1]
    cdef Py_ssize_t best_j = -1
    cdef double best_lo = 0.0, best_hi = 0.0, best_score = -INFINITY
    cdef double[:, ::1] cum = np.empty((n, m), dtype=np.float64)
    cdef double[::1] xs = np.empty(n, dtype=np.float64)
    cdef Keyed* keyed = NULL
    cdef cnp.intp_t[:, ::1] order
    cdef bint presorted = n >= PRESORT_MIN_ROWS

    if n < 2 * min_leaf:
        return (-1, 0.0, 0.0, -np.inf)

    if presorted:
        order = np.ascontiguousarray(np.argsort(np.asarray(x), axis=0, kind="stable"), dtype=np.intp)
    else:
        order = np.empty((1, 1), dtype=np.intp)
        keyed = <Keyed*>malloc(n * sizeof(Keyed))
        if keyed == NULL:
            raise MemoryError()
    try:
        best_j = _scan(x, y, cum, xs, keyed, order, presorted, min_leaf,
                       &best_lo, &best_hi, &best_score)
    finally:
        free(keyed)
    if best_j < 0:
        return (-1, 0.0, 0.0, -np.inf)
    return (best_j, best_lo, best_hi, best_score)


cdef Py_ssize_t _scan(double[:, ::1] x, double[:, ::1] y, double[:, ::1] cum,
                      double[::1] xs, Keyed* keyed, cnp.intp_t[:, ::1] order,
                      bint presorted, Py_ssize_t min_leaf,
                      double* best_lo, double* best_hi, double* best_score) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], m = y.shape[1]
    cdef Py_ssize_t i, j, c, r, best_j = -1
    cdef double acc_l, acc_r, l, rr, score, nl, nr
    for j in range(d):
        if not presorted:
            for i in range(n):
                keyed[i].value = x[i, j]
                keyed[i].index = i
            qsort(keyed, n, sizeof(Keyed), _cmp_keyed)
        for i in range(n):
            r = order[i, j] if presorted else keyed[i].index
            xs[i] = x[r, j]
            if i == 0:
                for c in range(m):
                    cum[0, c] = y[r, c]
            else:
                for c in range(m):
                    cum[i, c] = cum[i - 1, c] + y[r, c]
        for i in range(n - 1):
            nl = <double>(i + 1)
            nr = <double>n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            if not xs[i] < xs[i + 1]:
                continue
            l = cum[i, 0]
            rr = cum[n - 1, 0] - l
            acc_l = l * l
            acc_r = rr * rr
            for c in range(1, m):
                l = cum[i, c]
                rr = cum[n - 1, c] - l
                acc_l += l * l
                acc_r += rr * rr
            score = acc_l / nl + acc_r / nr
            if score > best_score[0]:
                best_score[0] = score
                best_j = j
                best_lo[0] = xs[i]
                best_hi[0] = xs[i + 1]
    return best_j


def knn_raw(Q, X, Py_ssize_t k, int metric):
    cdef double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t nq = q.shape[0], n = x.shape[0], d = x.shape[1]
    if metric not in (0, 1, 2):
        raise ValueError(f"unknown metric code {metric}")
    if k > n:
        k = n
    if k <= 0:
        return np.empty((nq, 0), dtype=np.int64), np.empty((nq, 0), dtype=np.float64)
    idx_arr = np.empty((nq, k), dtype=np.int64)
    raw_arr = np.empty((nq, k), dtype=np.float64)
    cdef cnp.int64_t[:, ::1] idx = idx_arr
    cdef double[:, ::1] raw = raw_arr
    cdef double[::1] xx = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t a, b, j, p, filled
    cdef double acc, diff, qq, denom

    if metric == 2:
        for b in range(n):
            acc = 0.0
            for j in range(d):
                acc += x[b, j] * x[b, j]
            xx[b] = acc

    with nogil:
        for a in range(nq):
            filled = 0
            qq = 0.0
            if metric == 2:
                for j in range(d):
                    qq += q[a, j] * q[a, j]
            for b in range(n):
                acc = 0.0
                if metric == 0:
                    for j in range(d):
                        diff = q[a, j] - x[b, j]
                        acc += diff * diff
                elif metric == 1:
                    for j in range(d):
                        diff = fabs(q[a, j] - x[b, j])
                        acc += diff * diff * diff
                else:
                    for j in range(d):
                        acc += q[a, j] * x[b, j]
                    denom = sqrt(qq) * sqrt(xx[b])
                    if denom > 0.0:
                        acc = 1.0 - acc / denom
                    else:
                        acc = 1.0
                if filled == k and not acc < raw[a, k - 1]:
                    continue
                # insertion after any equal raw keeps index order stable
                p = filled if filled < k else k - 1
                while p > 0 and raw[a, p - 1] > acc:
                    if p < k:
                        raw[a, p] = raw[a, p - 1]
                        idx[a, p] = idx[a, p - 1]
                    p -= 1
                raw[a, p] = acc
                idx[a, p] = b
                if filled < k:
                    filled += 1
    return idx_arr, raw_arr
