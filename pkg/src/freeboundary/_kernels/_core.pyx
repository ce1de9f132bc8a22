# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_fallback`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport expm1, fabs

cnp.import_array()


def pair_exponent_buckets(adj, lengths, cells, weights, Py_ssize_t nbuckets):
    cdef const cnp.int64_t[:] a = np.ascontiguousarray(adj, dtype=np.int64)
    cdef const cnp.int64_t[:] ln = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef const cnp.int64_t[:] cl = np.ascontiguousarray(cells, dtype=np.int64)
    cdef const cnp.int64_t[:, :] W = np.ascontiguousarray(weights, dtype=np.int64)
    out_arr = np.zeros(nbuckets, dtype=np.int64)
    cdef cnp.int64_t[:] out = out_arr
    cdef Py_ssize_t t = ln.shape[0], i, j
    cdef cnp.int64_t lcp, ci, cj, li
    for i in range(t - 1):
        lcp = a[i]
        ci = cl[i]
        li = ln[i]
        for j in range(i + 1, t):
            if a[j - 1] < lcp:
                lcp = a[j - 1]
            cj = cl[j]
            out[li + ln[j] - 2 * lcp] += W[ci, cj] + W[cj, ci]
    return out_arr


def quad_mismatch(E, img, quads):
    cdef const cnp.int64_t[:, :, :] M = np.ascontiguousarray(E, dtype=np.int64)
    cdef const cnp.int64_t[:] g = np.ascontiguousarray(img, dtype=np.int64)
    cdef const cnp.int64_t[:, :] Q = np.ascontiguousarray(quads, dtype=np.int64).reshape(-1, 4)
    out_arr = np.zeros(Q.shape[0], dtype=np.uint8)
    cdef cnp.uint8_t[:] out = out_arr
    cdef Py_ssize_t s, r, k = M.shape[2]
    cdef Py_ssize_t a, b, c, d, A, B, C, D
    cdef cnp.int64_t x1, x2, y1, y2
    for s in range(Q.shape[0]):
        a = Q[s, 0]; b = Q[s, 1]; c = Q[s, 2]; d = Q[s, 3]
        A = g[a]; B = g[b]; C = g[c]; D = g[d]
        for r in range(k):
            x1 = M[a, b, r] + M[c, d, r] - M[a, d, r] - M[b, c, r]
            y1 = M[A, B, r] + M[C, D, r] - M[A, D, r] - M[B, C, r]
            x2 = M[a, c, r] + M[b, d, r] - M[a, d, r] - M[b, c, r]
            y2 = M[A, C, r] + M[B, D, r] - M[A, D, r] - M[B, C, r]
            if x1 != y1 or x2 != y2:
                out[s] = 1
                break
    return out_arr


def quad_log_deviation(logd, img, quads):
    cdef const double[:, :] L = np.ascontiguousarray(logd, dtype=np.float64)
    cdef const cnp.int64_t[:] g = np.ascontiguousarray(img, dtype=np.int64)
    cdef const cnp.int64_t[:, :] Q = np.ascontiguousarray(quads, dtype=np.int64).reshape(-1, 4)
    out_arr = np.zeros(Q.shape[0], dtype=np.float64)
    cdef double[:] out = out_arr
    cdef Py_ssize_t s, a, b, c, d, A, B, C, D
    cdef double x1, x2, y1, y2, e1, e2
    for s in range(Q.shape[0]):
        a = Q[s, 0]; b = Q[s, 1]; c = Q[s, 2]; d = Q[s, 3]
        A = g[a]; B = g[b]; C = g[c]; D = g[d]
        x1 = L[a, b] + L[c, d] - L[a, d] - L[b, c]
        x2 = L[a, c] + L[b, d] - L[a, d] - L[b, c]
        y1 = L[A, B] + L[C, D] - L[A, D] - L[B, C]
        y2 = L[A, C] + L[B, D] - L[A, D] - L[B, C]
        e1 = fabs(expm1(y1 - x1))
        e2 = fabs(expm1(y2 - x2))
        out[s] = e1 if e1 > e2 else e2
    return out_arr


def triangle_candidates(D, double rtol):
    cdef const double[:, :] M = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i, j, k
    cdef double f = 1.0 - rtol
    found = []
    for j in range(n):
        for i in range(n):
            if i == j:
                continue
            for k in range(n):
                if k != j and M[i, k] > (M[i, j] + M[j, k]) * f:
                    found.append((i, j, k))
    return np.array(found, dtype=np.int64).reshape(-1, 3)
