# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels.

Each function mirrors its twin in ``_pure`` bit for bit: the walk kernels
consume pre-generated uniforms and pick the smallest j with u < cum[j],
clamped to the last state, which matches numpy right-bisection exactly.
"""

import numpy as np

BACKEND = "native"


def categorical_draws(const double[::1] cum, const double[::1] u):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k = cum.shape[0]
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t t, lo, hi, mid
    cdef double x
    for t in range(n):
        x = u[t]
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) >> 1
            if x < cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        if lo >= k:
            lo = k - 1
        out[t] = lo
    return out_arr


def chain_walk(const double[:, ::1] cum_rows, long long s0, const double[::1] u):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k = cum_rows.shape[1]
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t t, lo, hi, mid
    cdef Py_ssize_t s = <Py_ssize_t> s0
    cdef double x
    for t in range(n):
        x = u[t]
        lo = 0
        hi = k
        while lo < hi:
            mid = (lo + hi) >> 1
            if x < cum_rows[s, mid]:
                hi = mid
            else:
                lo = mid + 1
        if lo >= k:
            lo = k - 1
        s = lo
        out[t] = s
    return out_arr


def encode_ids(const long long[::1] path, const long long[::1] cw_flat,
               const long long[::1] cw_off, const long long[::1] cw_len):
    cdef Py_ssize_t n = path.shape[0]
    cdef Py_ssize_t total = 0
    cdef Py_ssize_t i, j, o, L
    for i in range(n):
        total += cw_len[path[i]]
    out_arr = np.empty(total, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t pos = 0
    for i in range(n):
        o = cw_off[path[i]]
        L = cw_len[path[i]]
        for j in range(L):
            out[pos] = cw_flat[o + j]
            pos += 1
    return out_arr


def find_word(const long long[::1] path, const long long[::1] word):
    cdef Py_ssize_t n = path.shape[0]
    cdef Py_ssize_t m = word.shape[0]
    if n < m:
        return np.empty(0, dtype=np.int64)
    hits_arr = np.empty(n - m + 1, dtype=np.int64)
    cdef long long[::1] hits = hits_arr
    cdef Py_ssize_t i, k, cnt = 0
    cdef bint ok
    for i in range(n - m + 1):
        ok = True
        for k in range(m):
            if path[i + k] != word[k]:
                ok = False
                break
        if ok:
            hits[cnt] = i
            cnt += 1
    return hits_arr[:cnt].copy()


def count_word(const long long[::1] path, const long long[::1] word,
               long long start, long long n):
    cdef Py_ssize_t m = word.shape[0]
    cdef Py_ssize_t i, k
    cdef Py_ssize_t cnt = 0
    cdef bint ok
    for i in range(start, start + n):
        ok = True
        for k in range(m):
            if path[i + k] != word[k]:
                ok = False
                break
        if ok:
            cnt += 1
    return cnt
