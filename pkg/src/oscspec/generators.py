"""Piecewise-linear functions on [0, 1] and the generators phi_m.

``phi_m`` realizes the sign pattern of the level-``m`` block tree:

* baseline ``-1`` on ``[0, 1]``;
* for ``2 <= n <= m`` a bump inside ``U_(n,m)``: up on the first third,
  ``+1`` on the middle third, down on the last third;
* ``sigma_m`` on each level-``m`` block ``J_sigma``, joined across every
  gap between consecutive blocks by one affine splice;
* ``+1`` after the last block until the terminal ramp, which falls to
  ``-1`` at ``t = 1`` inside ``U_(1,m)``.

Consecutive words in lexicographic order always differ in their last sign,
so every inter-block splice is a genuine sign change.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import kernels
from .arith import UNIT, DomainError, Interval, as_rational, fmt
from .lattice import (
    BlockTree,
    Lattice,
    ScaleParams,
    anchor,
    build_tree,
    consecutive_gaps,
    external_window,
)
from .report import DISCREPANCY, VerificationReport

ONE = Fraction(1)
MINUS_ONE = Fraction(-1)

# Full generators at deeper levels have more than a million breakpoints.
FULL_TREE_LIMIT = 16


@dataclass(frozen=True, eq=True)
class PiecewiseLinear:
    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        xs, ys = self.xs, self.ys
        if len(xs) != len(ys) or len(xs) < 2:
            raise DomainError("need at least two breakpoints and one value per breakpoint")
        if xs[0] != 0 or xs[-1] != 1:
            raise DomainError(f"domain must be [0, 1], got [{xs[0]}, {xs[-1]}]")
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise DomainError("breakpoints must be strictly increasing")

    @classmethod
    def from_points(cls, xs: Sequence, ys: Sequence) -> "PiecewiseLinear":
        return cls(tuple(map(as_rational, xs)), tuple(map(as_rational, ys)))

    @classmethod
    def constant(cls, value=0) -> "PiecewiseLinear":
        v = as_rational(value)
        return cls((Fraction(0), ONE), (v, v))

    def evaluate(self, t: Fraction) -> Fraction:
        if t < 0 or t > 1:
            raise DomainError(f"t = {t} outside [0, 1]")
        xs, ys = self.xs, self.ys
        j = bisect.bisect_left(xs, t)
        if xs[j] == t:
            return ys[j]
        x0, x1, y0, y1 = xs[j - 1], xs[j], ys[j - 1], ys[j]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    __call__ = evaluate

    def values_at(self, points: Sequence[Fraction]) -> list[Fraction]:
        """Exact values at sorted points inside [0, 1]."""
        return kernels.eval_sorted(self.xs, self.ys, points)

    def extrema_on(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        """``(min, max)`` over ``[lo, hi] ∩ [0, 1]``."""
        lo, hi = max(lo, Fraction(0)), min(hi, ONE)
        if lo > hi:
            raise DomainError(f"[{lo}, {hi}] does not meet [0, 1]")
        i = bisect.bisect_right(self.xs, lo)
        j = bisect.bisect_left(self.xs, hi)
        vals = [self.evaluate(lo), self.evaluate(hi), *self.ys[i:j]]
        return min(vals), max(vals)

    def is_zero(self) -> bool:
        return not any(self.ys)

    def simplified(self) -> "PiecewiseLinear":
        """Drop breakpoints where the slope does not change."""
        xs, ys = self.xs, self.ys
        keep_x, keep_y = [xs[0]], [ys[0]]
        for i in range(1, len(xs) - 1):
            x0, y0 = keep_x[-1], keep_y[-1]
            if (ys[i] - y0) * (xs[i + 1] - xs[i]) != (ys[i + 1] - ys[i]) * (xs[i] - x0):
                keep_x.append(xs[i])
                keep_y.append(ys[i])
        keep_x.append(xs[-1])
        keep_y.append(ys[-1])
        return PiecewiseLinear(tuple(keep_x), tuple(keep_y))

    def same_function(self, other: "PiecewiseLinear") -> bool:
        return self.simplified() == other.simplified()

    def to_json(self) -> dict:
        return {"xs": [fmt(x) for x in self.xs], "ys": [fmt(y) for y in self.ys]}

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseLinear":
        return cls.from_points(data["xs"], data["ys"])


def evaluate(f: PiecewiseLinear, t: Fraction) -> Fraction:
    return f.evaluate(as_rational(t))


def sup_norm(f: PiecewiseLinear) -> Fraction:
    # extrema of a piecewise-linear function sit at breakpoints
    return max(abs(y) for y in f.ys)


def oscillation(f: PiecewiseLinear, interval: Interval) -> Fraction:
    """``max - min`` of ``f`` over the closure of ``interval ∩ [0, 1]``.

    Continuity makes the supremum over an open interval equal to the
    maximum over its closure.
    """
    meet = interval.intersection(UNIT)
    if meet is None:
        raise DomainError(f"{interval} does not meet [0, 1]")
    lo, hi = f.extrema_on(meet.lo, meet.hi)
    return hi - lo


def variation_support(f: PiecewiseLinear) -> list[Interval]:
    """Maximal open intervals made of consecutive non-constant pieces."""
    out = []
    xs, ys = f.xs, f.ys
    start = None
    for i in range(len(xs) - 1):
        moving = ys[i] != ys[i + 1]
        if moving and start is None:
            start = xs[i]
        elif not moving and start is not None:
            out.append(Interval(start, xs[i], False, False))
            start = None
    if start is not None:
        out.append(Interval(start, xs[-1], False, False))
    return out


def merged_breakpoints(fs: Sequence[PiecewiseLinear]) -> list[Fraction]:
    return sorted(set().union(*(f.xs for f in fs)))


def linear_combine(coeffs: Sequence, fs: Sequence[PiecewiseLinear]) -> PiecewiseLinear:
    if len(coeffs) != len(fs):
        raise DomainError(f"{len(coeffs)} coefficients for {len(fs)} functions")
    if not fs:
        return PiecewiseLinear.constant(0)
    coeffs = [as_rational(a) for a in coeffs]
    grid = merged_breakpoints(fs)
    total = [Fraction(0)] * len(grid)
    for a, f in zip(coeffs, fs):
        if a:
            total = [s + a * v for s, v in zip(total, f.values_at(grid))]
    return PiecewiseLinear(tuple(grid), tuple(total))


# -- generators -------------------------------------------------------------------


def _bump_points(m: int, lo: Fraction, hi: Fraction) -> tuple[list[Fraction], list[Fraction]]:
    """Breakpoints of the bumps of level ``m`` whose window meets ``[lo, hi]``."""
    eta = ScaleParams.eta(m)
    half, sixth = eta / 2, eta / 6
    n_min = max(2, math.ceil(1 / (hi + half)))
    n_max = m if lo <= half else min(m, math.floor(1 / (lo - half)))
    xs: list[Fraction] = []
    ys: list[Fraction] = []
    for n in range(n_max, n_min - 1, -1):
        t = anchor(n)
        xs += [t - half, t - sixth, t + sixth, t + half]
        ys += [MINUS_ONE, ONE, ONE, MINUS_ONE]
    return xs, ys


def _assemble(
    lattice: Lattice,
    m: int,
    bumps: tuple[list[Fraction], list[Fraction]],
    middle: list[tuple[Fraction, Fraction]],
) -> PiecewiseLinear:
    xs = [Fraction(0)] + bumps[0]
    ys = [MINUS_ONE] + bumps[1]
    for x, y in middle:
        xs.append(x)
        ys.append(y)
    xs += [lattice.ramp_start(m), ONE]
    ys += [ONE, MINUS_ONE]
    return PiecewiseLinear(tuple(xs), tuple(ys))


def _block_points(blocks) -> list[tuple[Fraction, Fraction]]:
    out = []
    for i, lo, hi in blocks:
        v = ONE if i & 1 else MINUS_ONE
        out += [(lo, v), (hi, v)]
    return out


def build_generator(tree: BlockTree, m: int) -> PiecewiseLinear:
    if not 1 <= m <= tree.max_level:
        raise DomainError(f"generator level {m} outside 1..{tree.max_level}")
    blocks = [(i, lo, hi) for i, (lo, hi) in enumerate(tree.levels[m])]
    return _assemble(tree.lattice, m, _bump_points(m, Fraction(0), ONE), _block_points(blocks))


def generator_on(lattice: Lattice, m: int, lo: Fraction, hi: Fraction) -> PiecewiseLinear:
    """A function on [0, 1] that coincides with ``phi_m`` on ``[lo, hi]``.

    Only the features of ``phi_m`` that meet ``[lo, hi]`` are generated.
    Every omitted feature is bounded by breakpoints of equal value, so
    interpolating across it is exact on the requested window. Windows
    away from B cost nothing in ``2^m``, which makes very deep levels
    reachable.
    """
    if m < 1:
        raise DomainError(f"generator level must be >= 1, got {m}")
    lo, hi = max(lo, Fraction(0)), min(hi, ONE)
    base = lattice.base
    if hi < base.lo or lo > base.hi:
        # phi_m is -1 at B.lo and +1 from the last block up to the ramp
        middle = [(base.lo, MINUS_ONE)]
        if base.hi < lattice.ramp_start(m):
            middle.append((base.hi, ONE))
    else:
        last = 2**m - 1
        start = max(lattice.count_hi_below(m, lo) - 1, 0)
        stop = min(lattice.count_lo_at_most(m, hi), last)
        wanted = sorted({0, last, *range(start, stop + 1)})
        middle = _block_points((i, *lattice.block(m, i)) for i in wanted)
    return _assemble(lattice, m, _bump_points(m, lo, hi), middle)


class GeneratorSet:
    """The generators ``phi_1 .. phi_max_level`` over one block tree.

    Full generators are materialized on demand from ``tree``; levels
    beyond the tree are reachable only through local queries
    (:meth:`local`, :meth:`oscillation`).
    """

    def __init__(
        self,
        tree: BlockTree,
        max_level: Optional[int] = None,
        functions: Optional[Sequence[PiecewiseLinear]] = None,
    ):
        self.tree = tree
        self.max_level = tree.max_level if max_level is None else max_level
        if self.max_level < 1:
            raise DomainError("a generator set needs at least one level")
        self._full: dict[int, PiecewiseLinear] = {}
        if functions is not None:
            if len(functions) != tree.max_level:
                raise DomainError("one stored function per tree level is required")
            self._full.update(enumerate(functions, start=1))
        self._tables: dict[int, tuple] = {}

    @classmethod
    def build(
        cls,
        max_level: int = 12,
        params: Optional[ScaleParams] = None,
        base: Optional[Interval] = None,
    ) -> "GeneratorSet":
        tree = build_tree(min(max_level, FULL_TREE_LIMIT), params, base)
        return cls(tree, max_level)

    def with_max_level(self, max_level: int) -> "GeneratorSet":
        """Same construction, more (locally reachable) levels; caches shared."""
        other = GeneratorSet(self.tree, max(max_level, 1))
        other._full = self._full
        other._tables = self._tables
        return other

    @property
    def params(self) -> ScaleParams:
        return self.tree.params

    @property
    def lattice(self) -> Lattice:
        return self.tree.lattice

    def _check(self, m: int) -> None:
        if not 1 <= m <= self.max_level:
            raise DomainError(f"generator level {m} outside 1..{self.max_level}")

    def phi(self, m: int) -> PiecewiseLinear:
        self._check(m)
        f = self._full.get(m)
        if f is None:
            if m > self.tree.max_level:
                raise DomainError(
                    f"phi_{m} is beyond the materialized tree (depth {self.tree.max_level}); "
                    "use local queries"
                )
            f = self._full[m] = build_generator(self.tree, m)
        return f

    __getitem__ = phi

    @property
    def functions(self) -> list[PiecewiseLinear]:
        return [self.phi(m) for m in range(1, min(self.max_level, self.tree.max_level) + 1)]

    def local(self, m: int, interval: Interval) -> PiecewiseLinear:
        self._check(m)
        if m <= self.tree.max_level:
            return self.phi(m)
        return generator_on(self.lattice, m, interval.lo, interval.hi)

    def oscillation(self, m: int, interval: Interval) -> Fraction:
        return oscillation(self.local(m, interval), interval)

    # -- batched combinations ---------------------------------------------

    def table(self, levels: int) -> tuple:
        """Values of ``phi_1 .. phi_levels`` on their merged breakpoints.

        Returns ``(grid, dens, rows)`` with ``phi_m(grid[i]) =
        rows[m-1][i] / dens[i]``.
        """
        cached = self._tables.get(levels)
        if cached is not None:
            return cached
        fs = [self.phi(m) for m in range(1, levels + 1)]
        grid = merged_breakpoints(fs)
        den = math.lcm(kernels.common_scale(grid), *(kernels.common_scale(f.xs) for f in fs))
        q = kernels.scaled(grid, den)
        cols = []
        for f in fs:
            cols.append(
                kernels.interp_sorted(
                    kernels.scaled(f.xs, den),
                    [y.numerator for y in f.ys],
                    [y.denominator for y in f.ys],
                    q,
                )
            )
        dens = [math.lcm(*(c[1][i] for c in cols)) for i in range(len(grid))]
        rows = [[n * (d // dd) for n, dd, d in zip(c[0], c[1], dens)] for c in cols]
        out = (tuple(grid), dens, rows)
        self._tables[levels] = out
        return out

    def _weights(self, coeffs: Sequence[Fraction]) -> tuple[int, list[int]]:
        q = kernels.common_scale(coeffs)
        return q, [a.numerator * (q // a.denominator) for a in coeffs]

    def combine(self, coeffs: Sequence) -> PiecewiseLinear:
        """``sum_m coeffs[m-1] * phi_m`` on the merged breakpoint grid."""
        coeffs = [as_rational(a) for a in coeffs]
        if len(coeffs) > self.max_level:
            raise DomainError(f"{len(coeffs)} coefficients but only {self.max_level} generators")
        if not coeffs:
            return PiecewiseLinear.constant(0)
        grid, dens, rows = self.table(len(coeffs))
        q, w = self._weights(coeffs)
        sums = kernels.dot_rows(w, rows)
        return PiecewiseLinear(grid, tuple(Fraction(s, q * d) for s, d in zip(sums, dens)))

    def combination_extrema(self, coeffs: Sequence) -> tuple[Fraction, Fraction]:
        """``(min, max)`` of ``sum_m coeffs[m-1] * phi_m`` without building it."""
        coeffs = [as_rational(a) for a in coeffs]
        if not coeffs:
            return Fraction(0), Fraction(0)
        grid, dens, rows = self.table(len(coeffs))
        q, w = self._weights(coeffs)
        sums = kernels.dot_rows(w, rows)
        imax, imin = kernels.argextrema(sums, dens)
        return Fraction(sums[imin], q * dens[imin]), Fraction(sums[imax], q * dens[imax])

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "max_level": self.tree.max_level,
            "functions": [{"m": m, **f.to_json()} for m, f in enumerate(self.functions, start=1)],
        }

    @classmethod
    def from_json(cls, data: dict, tree: BlockTree) -> "GeneratorSet":
        fs = [PiecewiseLinear.from_json(entry) for entry in data["functions"]]
        return cls(tree, int(data["max_level"]), fs)


def designated_regions(tree: BlockTree, m: int) -> list[Interval]:
    """Where ``phi_m`` is allowed to vary: bump windows, the window at 1, level-m gaps."""
    regions = [external_window(n, m) for n in range(2, m + 1)]
    regions.append(external_window(1, m))
    regions += consecutive_gaps(tree, m)
    return regions


# -- verification -------------------------------------------------------------------

SIGN_DEPTH = 8


def _uncovered(regions: Sequence[Interval], allowed: Sequence[Interval]) -> list[Interval]:
    """Regions not inside any allowed interval; ``allowed`` must be pairwise disjoint."""
    allowed = sorted(allowed, key=lambda a: a.lo)
    los = [a.lo for a in allowed]
    out = []
    for r in regions:
        j = bisect.bisect_right(los, r.lo)
        if not any(r.issubset(a) for a in allowed[max(j - 2, 0):j]):
            out.append(r)
    return out


def _values_match(f: PiecewiseLinear, pairs: list[tuple[Fraction, Fraction]]) -> int:
    """Number of ``(t, value)`` pairs where ``f(t) != value``."""
    pairs.sort()
    got = f.values_at([t for t, _ in pairs])
    return sum(g != v for g, (_, v) in zip(got, pairs))


def verify_generators(gens: GeneratorSet, sign_depth: int = SIGN_DEPTH) -> VerificationReport:
    tree = gens.tree
    top = min(gens.max_level, tree.max_level)
    report = VerificationReport("generators", {"max_level": top, "sign_depth": sign_depth})
    for m in range(1, top + 1):
        f = gens.phi(m)
        report.add("generators.norm", "sup norm equals 1", sup_norm(f) == 1, level=m,
                   measured=sup_norm(f))
        report.add("generators.range", "every breakpoint value lies in [-1, 1]",
                   all(-1 <= y <= 1 for y in f.ys), level=m)
        stray = _uncovered(variation_support(f), designated_regions(tree, m))
        report.add("generators.localization",
                   "every non-constant region sits in a designated window or gap",
                   not stray, level=m, measured={"uncovered": [str(r) for r in stray]})
        # phi_m is sigma_m on its own blocks
        pairs = []
        for i, (lo, hi) in enumerate(tree.levels[m]):
            v = ONE if i & 1 else MINUS_ONE
            pairs += [(lo, v), ((lo + hi) / 2, v), (hi, v)]
        bad = _values_match(f, pairs)
        report.add("generators.block_values", "phi_m equals sigma_m on every level-m block",
                   bad == 0, level=m, measured={"points": len(pairs), "mismatches": bad})

    # phi_k equals sigma_k on J_sigma for every word of length <= sign_depth and k <= |sigma|
    depth = min(sign_depth, top)
    for k in range(1, depth + 1):
        f = gens.phi(k)
        pairs = []
        for length in range(k, depth + 1):
            for i, (lo, hi) in enumerate(tree.levels[length]):
                # the k-th sign of word i at this length
                v = ONE if (i >> (length - k)) & 1 else MINUS_ONE
                pairs += [(lo, v), ((lo + hi) / 2, v), (hi, v)]
        bad = _values_match(f, pairs)
        report.add("generators.sign_alignment",
                   f"phi_{k} equals sigma_{k} on every block of length {k}..{depth}",
                   bad == 0, level=k, measured={"points": len(pairs), "mismatches": bad})

    f = gens.phi(top)
    near_zero = oscillation(f, external_window(0, top))
    report.add("generators.window_at_zero",
               "a sign change across the window at 0",
               near_zero == 2, level=top, measured=near_zero, expected=Fraction(2),
               detail="the construction has no transition at 0; 0 is reached through "
                      "windows accumulating at 0", on_failure=DISCREPANCY)
    return report
