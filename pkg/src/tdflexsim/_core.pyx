# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled scheduling kernels; same contracts as ``_core_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF S_U = 0
DEF S_D = 1
DEF U = 2
DEF D = 3


cdef inline int _popcount(unsigned long long x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def icr_count(macro_row, small_row, int training):
    cdef const signed char[:] m = np.ascontiguousarray(macro_row, dtype=np.int8)
    cdef const signed char[:] s = np.ascontiguousarray(small_row, dtype=np.int8)
    if m.shape[0] != s.shape[0]:
        raise ValueError("rows must have equal length")
    cdef Py_ssize_t j
    cdef int count = 0
    for j in range(m.shape[0]):
        if training == S_D:
            if m[j] != s[j]:
                count += 1
        else:
            if m[j] == s[j]:
                count += 1
    return count


def bruteforce_min_icr(int nd_macro, int nd_small, int n_data, int training):
    if n_data > 20:
        raise ValueError("n_data too large for exhaustive enumeration")
    cdef unsigned long long full = (1ULL << n_data) - 1
    cdef unsigned long long mm, ms
    cdef int best = n_data + 1
    cdef int c, differ
    with nogil:
        for mm in range(full + 1):
            if _popcount(mm) != nd_macro:
                continue
            for ms in range(full + 1):
                if _popcount(ms) != nd_small:
                    continue
                differ = _popcount(mm ^ ms)
                if training == S_D:
                    c = differ
                else:
                    c = n_data - differ
                if c < best:
                    best = c
    return best


def tdflex_fill(nd, int n_data):
    cdef const long long[:] nd_v = np.ascontiguousarray(nd, dtype=np.int64)
    cdef Py_ssize_t n_cells = nd_v.shape[0]
    modes_a = np.empty((n_cells, n_data + 1), dtype=np.int8)
    boosts_a = np.zeros((n_cells, n_data + 1), dtype=np.bool_)
    chosen_a = np.zeros(n_cells, dtype=np.int8)
    cd_a = np.zeros(n_cells, dtype=np.int64)
    cu_a = np.zeros(n_cells, dtype=np.int64)
    cdef signed char[:, :] modes = modes_a
    cdef cnp.npy_bool[:, :] boosts = boosts_a
    cdef signed char[:] chosen = chosen_a
    cdef long long[:] c_pcrd = cd_a
    cdef long long[:] c_pcru = cu_a

    cdef long long ndm = nd_v[0]
    cdef long long num = n_data - ndm
    cdef long long nds, nus, cd, cu
    cdef Py_ssize_t b, j
    cdef bint discard
    with nogil:
        modes[0, 0] = S_U
        for j in range(1, n_data + 1):
            modes[0, j] = D if j <= ndm else U
        for b in range(1, n_cells):
            nds = nd_v[b]
            nus = n_data - nds
            cd = n_data - (min(ndm, nds) + min(num, nus))
            cu = n_data - (min(ndm, nus) + min(num, nds))
            discard = ndm > nds
            c_pcrd[b] = -1 if discard else cd
            c_pcru[b] = cu
            if not discard and cd <= cu:
                chosen[b] = 0
                modes[b, 0] = S_D
                for j in range(1, n_data + 1):
                    modes[b, j] = D if j <= nds else U
            else:
                chosen[b] = 1
                modes[b, 0] = S_U
                for j in range(1, n_data + 1):
                    if j <= nus:
                        modes[b, j] = U
                        boosts[b, j] = modes[0, j] == D
                    else:
                        modes[b, j] = D
    return modes_a, boosts_a, chosen_a, cd_a, cu_a
