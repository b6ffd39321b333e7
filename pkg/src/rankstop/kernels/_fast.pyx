# Compiled Monte Carlo kernels. Semantics must stay bit-identical to
# kernels/pure.py: same decision walk, same index tie rule.

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef inline long _rank_of(const double[:, ::1] values, Py_ssize_t i,
                          Py_ssize_t idx) noexcept nogil:
    cdef Py_ssize_t j, n = values.shape[1]
    cdef double x = values[i, idx]
    cdef long r = 0
    for j in range(n):
        if values[i, j] < x:
            r += 1
        elif values[i, j] == x and j <= idx:
            r += 1
    return r


def threshold_sim(const double[:, ::1] values, const double[::1] phi):
    """Accept the first value <= phi[k]; returns (accept_idx, final_ranks)."""
    cdef Py_ssize_t rows = values.shape[0]
    cdef Py_ssize_t n = values.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(rows, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ranks = np.empty(rows, dtype=np.int64)
    cdef long[::1] idx_v = idx
    cdef long[::1] ranks_v = ranks
    cdef Py_ssize_t i, k, acc
    with nogil:
        for i in range(rows):
            acc = n - 1
            for k in range(n):
                if values[i, k] <= phi[k]:
                    acc = k
                    break
            idx_v[i] = acc
            ranks_v[i] = _rank_of(values, i, acc)
    return idx, ranks


cdef inline Py_ssize_t _cloud_walk(const double[:, ::1] values, Py_ssize_t i,
                                   const double[::1] phi, double d_pc,
                                   long theta_pre, double p_pc,
                                   long theta_post, double margin) noexcept nogil:
    cdef Py_ssize_t n = values.shape[1]
    cdef Py_ssize_t k, j
    cdef double x, fk
    cdef long cnt
    cdef bint pre_on = d_pc > 0.0
    cdef bint post_on = p_pc > 0.0 and margin > 0.0
    for k in range(n - 1):
        x = values[i, k]
        fk = phi[k]
        if x <= fk:
            if pre_on:
                cnt = 0
                for j in range(k):
                    if values[i, j] >= x - d_pc and values[i, j] < x:
                        cnt += 1
                if cnt >= theta_pre:
                    continue
            return k
        if post_on and x <= fk + margin:
            cnt = 0
            for j in range(k):
                if values[i, j] > x and values[i, j] <= x + p_pc:
                    cnt += 1
            if cnt >= theta_post:
                return k
    return n - 1


def cloud_sim(const double[:, ::1] values, const double[::1] phi,
              double d_pc, long theta_pre, double p_pc, long theta_post,
              double margin):
    """Cloud-rule walk over each row. Returns (accept_idx, final_ranks)."""
    cdef Py_ssize_t rows = values.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(rows, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ranks = np.empty(rows, dtype=np.int64)
    cdef long[::1] idx_v = idx
    cdef long[::1] ranks_v = ranks
    cdef Py_ssize_t i, acc
    with nogil:
        for i in range(rows):
            acc = _cloud_walk(values, i, phi, d_pc, theta_pre, p_pc,
                              theta_post, margin)
            idx_v[i] = acc
            ranks_v[i] = _rank_of(values, i, acc)
    return idx, ranks
