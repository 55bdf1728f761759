# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernel for bit-sliced matrices over GF(2^e).

A row is stored as e bit-planes of 64-bit words: bit c of word c // 64 in
plane k is coefficient k of the entry in column c.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef inline Py_ssize_t _entry(uint64_t[:, :, ::1] P, Py_ssize_t i, int e,
                              Py_ssize_t w, int b) noexcept nogil:
    cdef Py_ssize_t v = 0
    cdef int k
    for k in range(e):
        v |= <Py_ssize_t>((P[i, k, w] >> b) & 1) << k
    return v


def rank_planes(uint64_t[:, :, ::1] planes, int e, uint64_t red, Py_ssize_t ncols,
                const int64_t[::1] exp, const int64_t[::1] log):
    """Forward-eliminate ``planes`` in place and return the rank.

    ``red`` holds the low coefficients of the field modulus (z^e = red),
    ``exp``/``log`` are the antilog/log tables of GF(2^e).
    """
    cdef Py_ssize_t R = planes.shape[0]
    cdef Py_ssize_t W = planes.shape[2]
    cdef Py_ssize_t nmul = (<Py_ssize_t>1) << e
    cdef Py_ssize_t order1 = nmul - 1
    table = np.zeros((nmul, e, W), dtype=np.uint64)
    cdef uint64_t[:, :, ::1] T = table
    cdef Py_ssize_t rank = 0, col, w, i, j, v, piv, f, lowbit, lp
    cdef int b, k
    cdef uint64_t acc, t, top
    with nogil:
        for col in range(ncols):
            if rank == R:
                break
            w = col >> 6
            b = col & 63
            piv = -1
            for i in range(rank, R):
                acc = 0
                for k in range(e):
                    acc |= planes[i, k, w]
                if (acc >> b) & 1:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(e):
                    for j in range(w, W):
                        t = planes[piv, k, j]
                        planes[piv, k, j] = planes[rank, k, j]
                        planes[rank, k, j] = t
            # T[2^k] = z^k * pivot row
            for k in range(e):
                for j in range(w, W):
                    T[1, k, j] = planes[rank, k, j]
            for f in range(1, e):
                lowbit = (<Py_ssize_t>1) << f
                for j in range(w, W):
                    top = T[lowbit >> 1, e - 1, j]
                    for k in range(e - 1, 0, -1):
                        T[lowbit, k, j] = T[lowbit >> 1, k - 1, j] ^ (top if (red >> k) & 1 else 0)
                    T[lowbit, 0, j] = top if red & 1 else 0
            for v in range(3, nmul):
                if v & (v - 1) == 0:
                    continue
                lowbit = v & (-v)
                for k in range(e):
                    for j in range(w, W):
                        T[v, k, j] = T[v ^ lowbit, k, j] ^ T[lowbit, k, j]
            lp = log[_entry(planes, rank, e, w, b)]
            for i in range(rank + 1, R):
                v = _entry(planes, i, e, w, b)
                if v == 0:
                    continue
                f = exp[(log[v] - lp + order1) % order1]
                for k in range(e):
                    for j in range(w, W):
                        planes[i, k, j] ^= T[f, k, j]
            rank += 1
    return rank
