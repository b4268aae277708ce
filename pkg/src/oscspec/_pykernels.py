"""Pure-Python exact kernels over scaled integers.

Same contract as the compiled ``_ckernels`` module; ``oscspec.kernels``
selects one of the two at import time.
"""
from math import gcd
from operator import mul


def interp_sorted(X, Yn, Yd, Q):
    """Evaluate the linear interpolant of ``(X[i], Yn[i]/Yd[i])`` at ``Q``.

    ``X`` is strictly increasing and ``Q`` is sorted inside ``[X[0], X[-1]]``;
    both are integers over one shared denominator. Returns reduced
    ``(numerators, denominators)`` with positive denominators.
    """
    out_n = []
    out_d = []
    last = len(X) - 2
    j = 0
    for q in Q:
        while j < last and X[j + 1] < q:
            j += 1
        x0 = X[j]
        x1 = X[j + 1]
        if q == x0:
            out_n.append(Yn[j])
            out_d.append(Yd[j])
            continue
        if q == x1:
            out_n.append(Yn[j + 1])
            out_d.append(Yd[j + 1])
            continue
        a = Yd[j]
        b = Yd[j + 1]
        num = Yn[j] * b * (x1 - q) + Yn[j + 1] * a * (q - x0)
        den = a * b * (x1 - x0)
        g = gcd(num, den)
        out_n.append(num // g)
        out_d.append(den // g)
    return out_n, out_d


def dot_rows(weights, rows):
    """Column sums ``S[i] = sum_m weights[m] * rows[m][i]``."""
    return [sum(map(mul, weights, col)) for col in zip(*rows)]


def argextrema(nums, dens):
    """Indices of the first maximum and first minimum of ``nums[i]/dens[i]``."""
    imax = imin = 0
    max_n, max_d = nums[0], dens[0]
    min_n, min_d = max_n, max_d
    for i in range(1, len(nums)):
        n = nums[i]
        d = dens[i]
        if n * max_d > max_n * d:
            imax, max_n, max_d = i, n, d
        elif n * min_d < min_n * d:
            imin, min_n, min_d = i, n, d
    return imax, imin
