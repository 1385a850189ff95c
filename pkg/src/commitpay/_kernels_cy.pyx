# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer pivoting kernels.

Same contract as ``_kernels_py``.  Entries that fit in 64 bits are combined
with overflow-checked C arithmetic; anything larger goes through Python ints.
"""

from cpython.long cimport PyLong_AsLongLongAndOverflow, PyLong_FromLongLong


cdef extern from *:
    bint __builtin_smulll_overflow(long long, long long, long long *)
    bint __builtin_ssubll_overflow(long long, long long, long long *)


cdef inline bint _small(object x, long long *out):
    cdef int ov = 0
    out[0] = PyLong_AsLongLongAndOverflow(x, &ov)
    return ov == 0


def pivot(list T, Py_ssize_t r, Py_ssize_t q, object det):
    cdef list prow = <list>T[r]
    cdef object p = prow[q]
    cdef Py_ssize_t i, j, n = len(prow), m = len(T)
    cdef long long pl = 0, dl = 0, fl = 0, al = 0, bl = 0, x = 0, y = 0, z = 0
    cdef bint head_small = _small(p, &pl) and _small(det, &dl)
    cdef bint row_small, same = p == det
    cdef list row, out
    cdef object f, a, b
    for i in range(m):
        if i == r:
            continue
        row = <list>T[i]
        f = row[q]
        if not f and same:
            continue
        row_small = head_small and _small(f, &fl)
        out = [None] * n
        for j in range(n):
            a = row[j]
            b = prow[j]
            if row_small and _small(a, &al) and _small(b, &bl):
                if not (__builtin_smulll_overflow(al, pl, &x)
                        or __builtin_smulll_overflow(fl, bl, &y)
                        or __builtin_ssubll_overflow(x, y, &z)):
                    out[j] = PyLong_FromLongLong(z / dl)
                    continue
            out[j] = (a * p - f * b) // det
        T[i] = out
    if p < 0:
        for i in range(m):
            T[i] = [-a for a in <list>T[i]]
        p = -p
    return p


def solve_square(list M, list rhs):
    cdef Py_ssize_t n = len(M), k, s, i
    cdef list T = [list(row) + [b] for row, b in zip(M, rhs)]
    cdef object det = 1
    for k in range(n):
        s = k
        while s < n and not (<list>T[s])[k]:
            s += 1
        if s == n:
            return None
        if s != k:
            T[k], T[s] = T[s], T[k]
        det = pivot(T, k, k, det)
    return [(<list>T[i])[n] for i in range(n)], det
