# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory stepper; mirrors ``_reference.run_steps`` exactly.

Both backends consume the same (T, d) float array and apply the same
partial Fisher-Yates index arithmetic, so trajectories are bit-identical
across the two implementations.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def run_steps(values, int d, int variant, int g, cnp.ndarray[cnp.float64_t, ndim=2] u):
    cdef int m = len(values)
    cdef Py_ssize_t T = u.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] vals = np.asarray(values, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] gap_trace = np.empty(T, dtype=np.int64)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] pool = np.empty(m, dtype=np.int32)

    cdef long vmin = vals[0]
    cdef long vmax = vals[0]
    cdef long nmin
    cdef long sel_min, x, n_inc
    cdef Py_ssize_t t
    cdef int i, j, r, tmp
    cdef bint at_cap

    for i in range(1, m):
        if vals[i] < vmin:
            vmin = vals[i]
        if vals[i] > vmax:
            vmax = vals[i]
    nmin = 0
    for i in range(m):
        if vals[i] == vmin:
            nmin += 1

    for t in range(T):
        for j in range(m):
            pool[j] = j
        for j in range(d):
            r = <int>(u[t, j] * (m - j))
            if r > m - j - 1:
                r = m - j - 1
            r += j
            tmp = pool[j]
            pool[j] = pool[r]
            pool[r] = tmp

        sel_min = vals[pool[0]]
        for j in range(1, d):
            x = vals[pool[j]]
            if x < sel_min:
                sel_min = x

        at_cap = (vmax - vmin) == g and sel_min == vmax
        if variant == 1 and at_cap:
            gap_trace[t] = vmax - vmin
            continue

        n_inc = 0
        for j in range(d):
            i = pool[j]
            if vals[i] == sel_min:
                vals[i] += 1
                n_inc += 1
        if sel_min + 1 > vmax:
            vmax = sel_min + 1
        if sel_min == vmin:
            nmin -= n_inc
            if nmin == 0:
                vmin = vals[0]
                for i in range(1, m):
                    if vals[i] < vmin:
                        vmin = vals[i]
                nmin = 0
                for i in range(m):
                    if vals[i] == vmin:
                        nmin += 1

        if variant == 2 and at_cap:
            for i in range(m):
                if vals[i] == vmin:
                    vals[i] += 1
            vmin = vals[0]
            for i in range(1, m):
                if vals[i] < vmin:
                    vmin = vals[i]
            nmin = 0
            for i in range(m):
                if vals[i] == vmin:
                    nmin += 1

        gap_trace[t] = vmax - vmin

    for i in range(m):
        values[i] = vals[i]
    return gap_trace
