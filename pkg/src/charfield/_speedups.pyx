# Compiled versions of the four hot kernels.  Semantics match
# charfield._kernels_py exactly; integer outputs are bit-identical, float
# outputs agree to rounding.  The inner loops run without the GIL so callers
# can fan out over thread pools.

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

IMPL = "compiled"


def pow_table(int p, long long N, mul_mat):
    """Successive powers of a fixed element as handles, sequentially."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2] mat = np.ascontiguousarray(mul_mat, dtype=np.int64)
    cdef int n = mat.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(N, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] w = p ** np.arange(n, dtype=np.int64)
    cdef long long[:, ::1] M = mat
    cdef long long[::1] weights = w
    cdef long long[::1] exp = out
    cdef long long k, h, acc
    cdef int i, j
    cdef long long* d = <long long*> malloc(n * sizeof(long long))
    cdef long long* nd = <long long*> malloc(n * sizeof(long long))
    if d == NULL or nd == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                d[i] = 0
            d[0] = 1
            exp[0] = 1
            for k in range(1, N):
                for j in range(n):
                    acc = 0
                    for i in range(n):
                        acc += M[j, i] * d[i]
                    nd[j] = acc % p
                h = 0
                for j in range(n):
                    d[j] = nd[j]
                    h += nd[j] * weights[j]
                exp[k] = h
    finally:
        free(d)
        free(nd)
    return out


def scan_found(L, offsets, flag):
    """Per (offset, line): 1 if any shifted point log is flagged, else 0."""
    cdef long long[:, ::1] Lv = np.ascontiguousarray(L, dtype=np.int64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef unsigned char[::1] fl = np.ascontiguousarray(flag, dtype=np.uint8)
    cdef long long N = fl.shape[0]
    cdef Py_ssize_t D = off.shape[0], C = Lv.shape[0], q = Lv.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((D, C), dtype=np.uint8)
    cdef unsigned char[:, ::1] ov = out
    cdef Py_ssize_t di, ci, xi
    cdef long long o
    with nogil:
        for di in range(D):
            o = off[di]
            for ci in range(C):
                for xi in range(q):
                    if fl[(o + Lv[ci, xi]) % N]:
                        ov[di, ci] = 1
                        break
    return out


def line_counts(L, offsets, flag):
    """Number of flagged points per (offset, line)."""
    cdef long long[:, ::1] Lv = np.ascontiguousarray(L, dtype=np.int64)
    cdef long long[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef unsigned char[::1] fl = np.ascontiguousarray(flag, dtype=np.uint8)
    cdef long long N = fl.shape[0]
    cdef Py_ssize_t D = off.shape[0], C = Lv.shape[0], q = Lv.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((D, C), dtype=np.int64)
    cdef long long[:, ::1] ov = out
    cdef Py_ssize_t di, ci, xi
    cdef long long o, cnt
    with nogil:
        for di in range(D):
            o = off[di]
            for ci in range(C):
                cnt = 0
                for xi in range(q):
                    cnt += fl[(o + Lv[ci, xi]) % N]
                ov[di, ci] = cnt
    return out


@cython.cdivision(True)
def sweep_stats(L, W2, Z):
    """Largest character-sum modulus per theta, split by additive class.

    Direct evaluation: for each multiplicative index j the row of values
    Z[j * log mod N] is built once and dotted against every additive
    character row of W2.
    """
    cdef long long[:, ::1] Lv = np.ascontiguousarray(L, dtype=np.int64)
    cdef double complex[:, ::1] W = np.ascontiguousarray(W2, dtype=np.complex128)
    cdef double complex[::1] Zv = np.ascontiguousarray(Z, dtype=np.complex128)
    cdef long long N = Zv.shape[0]
    cdef Py_ssize_t G = Lv.shape[0], q = Lv.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] max_main = np.zeros(G)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arg_main_j = np.zeros(G, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arg_main_b = np.zeros(G, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] max_katz = np.zeros(G)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arg_katz_j = np.zeros(G, dtype=np.int64)
    cdef double[::1] mm = max_main
    cdef long long[::1] amj = arg_main_j
    cdef long long[::1] amb = arg_main_b
    cdef double[::1] mk = max_katz
    cdef long long[::1] akj = arg_katz_j
    cdef Py_ssize_t g, b, x
    cdef long long j
    cdef double complex acc
    cdef double best_m, best_k, mod2
    cdef double complex* v = <double complex*> malloc(q * sizeof(double complex))
    if v == NULL:
        raise MemoryError()
    try:
        with nogil:
            for g in range(G):
                best_m = -1.0
                best_k = -1.0
                for j in range(N):
                    for x in range(q):
                        v[x] = Zv[(j * Lv[g, x]) % N]
                    for b in range(q):
                        acc = 0
                        for x in range(q):
                            acc = acc + W[b, x] * v[x]
                        mod2 = acc.real * acc.real + acc.imag * acc.imag
                        if b == 0:
                            if j > 0 and mod2 > best_k:
                                best_k = mod2
                                akj[g] = j
                        elif mod2 > best_m:
                            best_m = mod2
                            amj[g] = j
                            amb[g] = b
                mm[g] = sqrt(best_m)
                mk[g] = sqrt(best_k)
    finally:
        free(v)
    return max_main, arg_main_j, arg_main_b, max_katz, arg_katz_j
