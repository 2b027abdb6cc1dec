# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same signatures and semantics as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline int _popcount(unsigned long long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef inline int _sign(unsigned long long a, unsigned long long b) nogil:
    cdef int swaps = 0
    cdef unsigned long long s = a >> 1
    while s:
        swaps += _popcount(s & b)
        s >>= 1
    swaps += _popcount(a & b)
    return -1 if (swaps & 1) else 1


def blade_sign(a, b):
    return _sign(<unsigned long long>a, <unsigned long long>b)


def materialize(masks, blocks, int m, int n):
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << m
    out_arr = np.zeros((dim * n, dim * n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef long long[::1] mk = np.ascontiguousarray(masks, dtype=np.int64)
    cdef double complex[:, :, ::1] blk = np.ascontiguousarray(blocks, dtype=np.complex128).reshape(-1, n, n)
    cdef Py_ssize_t idx, T, R, i, j, r0, c0
    cdef int sign
    cdef unsigned long long S
    with nogil:
        for idx in range(mk.shape[0]):
            S = <unsigned long long>mk[idx]
            for T in range(dim):
                R = <Py_ssize_t>(S ^ <unsigned long long>T)
                sign = _sign(S, <unsigned long long>T)
                r0 = R * n
                c0 = T * n
                for i in range(n):
                    for j in range(n):
                        out[r0 + i, c0 + j] = out[r0 + i, c0 + j] + sign * blk[idx, i, j]
    return out_arr


def lap_solve(cost):
    cdef double[:, ::1] C = np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = C.shape[0]
    cdef double *u = <double *>malloc((n + 1) * sizeof(double))
    cdef double *v = <double *>malloc((n + 1) * sizeof(double))
    cdef double *minv = <double *>malloc((n + 1) * sizeof(double))
    cdef Py_ssize_t *p = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t *way = <Py_ssize_t *>malloc((n + 1) * sizeof(Py_ssize_t))
    cdef char *used = <char *>malloc((n + 1) * sizeof(char))
    cdef Py_ssize_t i, j, i0, j0, j1
    cdef double delta, cur
    perm_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] perm = perm_arr
    try:
        with nogil:
            for j in range(n + 1):
                u[j] = 0.0
                v[j] = 0.0
                p[j] = 0
                way[j] = 0
            for i in range(1, n + 1):
                p[0] = i
                j0 = 0
                for j in range(n + 1):
                    minv[j] = INFINITY
                    used[j] = 0
                while True:
                    used[j0] = 1
                    i0 = p[j0]
                    delta = INFINITY
                    j1 = 0
                    for j in range(1, n + 1):
                        if not used[j]:
                            cur = C[i0 - 1, j - 1] - u[i0] - v[j]
                            if cur < minv[j]:
                                minv[j] = cur
                                way[j] = j0
                            if minv[j] < delta:
                                delta = minv[j]
                                j1 = j
                    for j in range(n + 1):
                        if used[j]:
                            u[p[j]] += delta
                            v[j] -= delta
                        else:
                            minv[j] -= delta
                    j0 = j1
                    if p[j0] == 0:
                        break
                while True:
                    j1 = way[j0]
                    p[j0] = p[j1]
                    j0 = j1
                    if j0 == 0:
                        break
            for j in range(1, n + 1):
                perm[p[j] - 1] = j - 1
    finally:
        free(u)
        free(v)
        free(minv)
        free(p)
        free(way)
        free(used)
    return perm_arr


cdef bint _augment(Py_ssize_t i, Py_ssize_t n, long long[:, ::1] order,
                   long long[::1] deg, long long *match_col, char *seen) nogil:
    cdef Py_ssize_t t, j
    for t in range(deg[i]):
        j = order[i, t]
        if not seen[j]:
            seen[j] = 1
            if match_col[j] < 0 or _augment(match_col[j], n, order, deg, match_col, seen):
                match_col[j] = i
                return True
    return False


def perfect_matching(weights, double cutoff):
    W = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = W.shape[0]
    order_arr = np.ascontiguousarray(np.argsort(-W, axis=1, kind="stable"), dtype=np.int64)
    deg_arr = np.zeros(n, dtype=np.int64)
    cdef long long[:, ::1] order = order_arr
    cdef long long[::1] deg = deg_arr
    cdef double[:, ::1] w = W
    cdef Py_ssize_t i, j, t, k
    for i in range(n):
        k = 0
        for t in range(n):
            j = order[i, t]
            if w[i, j] > cutoff:
                order[i, k] = j
                k += 1
        deg[i] = k
    cdef long long *match_col = <long long *>malloc(n * sizeof(long long))
    cdef char *seen = <char *>malloc(n * sizeof(char))
    cdef bint ok = True
    try:
        for j in range(n):
            match_col[j] = -1
        for i in range(n):
            for j in range(n):
                seen[j] = 0
            if not _augment(i, n, order, deg, match_col, seen):
                ok = False
                break
        if not ok:
            return None
        perm = np.empty(n, dtype=np.int64)
        for j in range(n):
            perm[match_col[j]] = j
        return perm
    finally:
        free(match_col)
        free(seen)
