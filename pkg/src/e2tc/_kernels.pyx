# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for round-robin episodes."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def absorb_round_robin(double[::1] s, const double[::1] means, const double[::1] noise, Py_ssize_t offset):
    """Add rewards ``means[j] + noise[k]`` into ``s[j]`` for ``j = (offset + k) mod d``."""
    cdef Py_ssize_t d = s.shape[0]
    cdef Py_ssize_t n = noise.shape[0]
    cdef Py_ssize_t k
    cdef Py_ssize_t j = offset % d
    with nogil:
        for k in range(n):
            s[j] += means[j] + noise[k]
            j += 1
            if j == d:
                j = 0


def round_robin_sums(const double[:, ::1] noise, Py_ssize_t d):
    """Per-coordinate sums of each row of ``noise`` under round-robin assignment."""
    cdef Py_ssize_t m = noise.shape[0]
    cdef Py_ssize_t n = noise.shape[1]
    cdef Py_ssize_t r, k, j
    out_arr = np.zeros((m, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for r in range(m):
            j = 0
            for k in range(n):
                out[r, j] += noise[r, k]
                j += 1
                if j == d:
                    j = 0
    return out_arr
