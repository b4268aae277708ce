# cython: language_level=3
"""Compiled exact kernels; mirrors ``oscspec._pykernels`` line for line.

Arithmetic stays on Python integers (values exceed 64 bits routinely);
the gain comes from C-level loops and indexing.
"""
from math import gcd


def interp_sorted(list X, list Yn, list Yd, list Q):
    cdef Py_ssize_t last = len(X) - 2
    cdef Py_ssize_t j = 0
    cdef Py_ssize_t k, nq = len(Q)
    cdef list out_n = [None] * nq
    cdef list out_d = [None] * nq
    cdef object q, x0, x1, a, b, num, den, g
    for k in range(nq):
        q = Q[k]
        while j < last and X[j + 1] < q:
            j += 1
        x0 = X[j]
        x1 = X[j + 1]
        if q == x0:
            out_n[k] = Yn[j]
            out_d[k] = Yd[j]
            continue
        if q == x1:
            out_n[k] = Yn[j + 1]
            out_d[k] = Yd[j + 1]
            continue
        a = Yd[j]
        b = Yd[j + 1]
        num = Yn[j] * b * (x1 - q) + Yn[j + 1] * a * (q - x0)
        den = a * b * (x1 - x0)
        g = gcd(num, den)
        out_n[k] = num // g
        out_d[k] = den // g
    return out_n, out_d


def dot_rows(list weights, list rows):
    cdef Py_ssize_t m, i
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t ncols = len(rows[0]) if nrows else 0
    cdef list out = [0] * ncols
    cdef list row
    cdef object w, acc
    for m in range(nrows):
        w = weights[m]
        if w == 0:
            continue
        row = rows[m]
        for i in range(ncols):
            acc = out[i]
            out[i] = acc + w * row[i]
    return out


def argextrema(list nums, list dens):
    cdef Py_ssize_t i, imax = 0, imin = 0
    cdef Py_ssize_t n_items = len(nums)
    cdef object n, d
    cdef object max_n = nums[0], max_d = dens[0]
    cdef object min_n = max_n, min_d = max_d
    for i in range(1, n_items):
        n = nums[i]
        d = dens[i]
        if n * max_d > max_n * d:
            imax = i
            max_n = n
            max_d = d
        elif n * min_d < min_n * d:
            imin = i
            min_n = n
            min_d = d
    return imax, imin
