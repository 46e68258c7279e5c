# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid matching loop; mirrors mupb._match_py operation for operation."""
import numpy as np


def match_products(const double[:, ::1] L, const double[:, ::1] R, double target, double tau, Py_ssize_t max_hits):
    cdef Py_ssize_t nL = L.shape[0]
    cdef Py_ssize_t nR = R.shape[0]
    cdef Py_ssize_t n = L.shape[1]
    if R.shape[1] != n:
        raise ValueError("left and right tables disagree on the number of target states")
    out_a = np.empty(max_hits, dtype=np.int64)
    out_b = np.empty(max_hits, dtype=np.int64)
    out_r = np.empty(max_hits, dtype=np.float64)
    cdef long long[::1] oa = out_a
    cdef long long[::1] ob = out_b
    cdef double[::1] orr = out_r
    cdef Py_ssize_t a, b, i
    cdef Py_ssize_t k = 0
    cdef double r, worst
    cdef bint ok
    cdef bint overflow = False
    for a in range(nL):
        for b in range(nR):
            worst = 0.0
            ok = True
            for i in range(n):
                r = L[a, i] * R[b, i] - target
                if r < 0:
                    r = -r
                if not (r <= tau):
                    ok = False
                    break
                if r > worst:
                    worst = r
            if ok:
                if k == max_hits:
                    overflow = True
                    break
                oa[k] = a
                ob[k] = b
                orr[k] = worst
                k += 1
        if overflow:
            break
    return out_a[:k], out_b[:k], out_r[:k], overflow
