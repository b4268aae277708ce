"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``OSCSPEC_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

if os.environ.get("OSCSPEC_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = "cython" if _impl.__name__.endswith("_ckernels") else "python"

interp_sorted = _impl.interp_sorted
dot_rows = _impl.dot_rows
argextrema = _impl.argextrema


# Kernel outputs are already reduced; skip the second gcd.
if hasattr(Fraction, "_from_coprime_ints"):
    coprime_fraction = Fraction._from_coprime_ints
else:

    def coprime_fraction(n: int, d: int) -> Fraction:
        return Fraction(n, d, _normalize=False)


def common_scale(values: Iterable[Fraction]) -> int:
    """Least common denominator of ``values``."""
    den = 1
    for v in values:
        den = lcm(den, v.denominator)
    return den


def scaled(values: Sequence[Fraction], den: int) -> list[int]:
    return [v.numerator * (den // v.denominator) for v in values]


def eval_sorted(
    xs: Sequence[Fraction], ys: Sequence[Fraction], points: Sequence[Fraction]
) -> list[Fraction]:
    """Exact values of the interpolant through ``(xs, ys)`` at sorted points."""
    if not points:
        return []
    den = lcm(common_scale(xs), common_scale(points))
    nums, dens = interp_sorted(
        scaled(xs, den),
        [y.numerator for y in ys],
        [y.denominator for y in ys],
        scaled(points, den),
    )
    return [coprime_fraction(n, d) for n, d in zip(nums, dens)]
