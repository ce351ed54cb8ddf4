# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the sketch builder's inner loops.

Must stay arithmetically identical to ``_pykernels``: same expressions, same
strict comparisons, same tie rules, so both paths produce bit-equal sketches.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

_EMPTY = np.empty(0, dtype=np.int64)


def scan_point(double zb, double zd,
               cnp.int64_t[::1] ids,
               cnp.float64_t[::1] xb, cnp.float64_t[::1] xd,
               cnp.float64_t[::1] key, cnp.float64_t[::1] rv,
               cnp.int64_t[::1] cell_of, long new_cell):
    """Reassign members strictly closer to the point center (zb, zd)."""
    cdef Py_ssize_t n = ids.shape[0]
    if n == 0:
        return _EMPTY, _EMPTY, 0.0, -1
    moved_arr = np.empty(n, dtype=np.int64)
    kept_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] moved = moved_arr
    cdef cnp.int64_t[::1] kept = kept_arr
    cdef Py_ssize_t nm = 0, nk = 0, t
    cdef cnp.int64_t i, far = -1
    cdef double db, dd, d, radius = 0.0
    for t in range(n):
        i = ids[t]
        db = xb[i] - zb
        if db < 0:
            db = -db
        dd = xd[i] - zd
        if dd < 0:
            dd = -dd
        d = db if db > dd else dd
        if d < key[i]:
            key[i] = d
            rv[i] = d
            cell_of[i] = new_cell
            moved[nm] = i
            nm += 1
        else:
            kept[nk] = i
            nk += 1
            if rv[i] > radius or (rv[i] == radius and (far < 0 or i < far)):
                radius = rv[i]
                far = i
    return moved_arr[:nm], kept_arr[:nk], radius, (-1 if nk == 0 else far)


def scan_segment(double lo, double hi, double t_new, long n_real,
                 cnp.int64_t[::1] ids,
                 cnp.float64_t[::1] xb, cnp.float64_t[::1] xd,
                 cnp.float64_t[::1] rv,
                 cnp.int64_t[::1] cell_of, long new_cell):
    """Reassign members whose diagonal projection falls strictly inside (lo, hi)."""
    cdef Py_ssize_t n = ids.shape[0]
    if n == 0:
        return _EMPTY, _EMPTY, 0.0, -1
    moved_arr = np.empty(n, dtype=np.int64)
    kept_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] moved = moved_arr
    cdef cnp.int64_t[::1] kept = kept_arr
    cdef Py_ssize_t nm = 0, nk = 0, t
    cdef cnp.int64_t i, far = -1
    cdef double tmid, r, radius = 0.0
    for t in range(n):
        i = ids[t]
        tmid = (xb[i] + xd[i]) / 2.0
        if lo < tmid and tmid < hi:
            cell_of[i] = new_cell
            if i >= n_real:
                r = t_new - xb[i]
                if r < 0:
                    r = -r
                rv[i] = r
            else:
                rv[i] = (xd[i] - xb[i]) / 2.0
            moved[nm] = i
            nm += 1
        else:
            kept[nk] = i
            nk += 1
            if rv[i] > radius or (rv[i] == radius and (far < 0 or i < far)):
                radius = rv[i]
                far = i
    return moved_arr[:nm], kept_arr[:nk], radius, (-1 if nk == 0 else far)


def cell_stats(cnp.int64_t[::1] ids, cnp.float64_t[::1] rv):
    """Max member priority and its owner; ties to the smallest id. Empty: (0, -1)."""
    cdef Py_ssize_t n = ids.shape[0]
    if n == 0:
        return 0.0, -1
    cdef Py_ssize_t t
    cdef cnp.int64_t i, far = -1
    cdef double radius = 0.0
    for t in range(n):
        i = ids[t]
        if rv[i] > radius or (rv[i] == radius and (far < 0 or i < far)):
            radius = rv[i]
            far = i
    return radius, far
