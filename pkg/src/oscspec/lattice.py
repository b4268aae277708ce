"""Static geometry: anchors 1/n, window scales, the base interval B and the
nested binary block tree.

Blocks of level ``m`` are stored in lexicographic order of their sign
words, so the block of a word is found by reading the word as a binary
number with ``-1 -> 0`` and ``+1 -> 1``. The children of block ``i`` are
``2i`` (minus, left) and ``2i + 1`` (plus, right).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Optional, Sequence

from .arith import (
    ConstructionError,
    DomainError,
    Interval,
    as_rational,
    fmt,
)
from .report import DISCREPANCY, VerificationReport

Word = tuple[int, ...]

MAX_C = Fraction(1, 4)


# -- sign words ---------------------------------------------------------------


def parse_word(text: str) -> Word:
    """``"-+-"`` -> ``(-1, 1, -1)``."""
    try:
        return tuple({"-": -1, "+": 1}[ch] for ch in text.strip())
    except KeyError:
        raise DomainError(f"sign words use only '-' and '+': {text!r}") from None


def word_str(word: Sequence[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in word)


def words(m: int) -> Iterator[Word]:
    """All words of length ``m`` in lexicographic order (-1 before +1)."""
    return itertools.product((-1, 1), repeat=m)


def word_index(word: Sequence[int]) -> int:
    i = 0
    for s in word:
        i = 2 * i + (s > 0)
    return i


def index_word(i: int, m: int) -> Word:
    return tuple(1 if (i >> (m - 1 - k)) & 1 else -1 for k in range(m))


def truncate(word: Sequence[int], k: int) -> Word:
    if not 0 <= k <= len(word):
        raise DomainError(f"cannot truncate a word of length {len(word)} to {k}")
    return tuple(word[:k])


# -- scales -------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleParams:
    c: Fraction = MAX_C

    def __post_init__(self) -> None:
        c = as_rational(self.c)
        object.__setattr__(self, "c", c)
        if not 0 < c <= MAX_C:
            raise DomainError(f"c must lie in (0, 1/4], got {c}")

    @staticmethod
    @lru_cache(maxsize=None)
    def eta(m: int) -> Fraction:
        if m < 1:
            raise DomainError(f"eta is defined for m >= 1, got {m}")
        return Fraction(1, 2 ** (3 * m + 5))

    def ell(self, m: int) -> Fraction:
        return self.c / 2**m * self.eta(m)

    def theta(self, m: int) -> Fraction:
        return self.ell(m) / 8

    def delta(self, m: int) -> Fraction:
        """Sibling gap at level ``m >= 2``: ``ell(m-1) - 2 ell(m) - 2 theta(m-1)``."""
        if m < 2:
            raise DomainError(f"sibling gaps are defined from level 2, got {m}")
        return self.ell(m - 1) - 2 * self.ell(m) - 2 * self.theta(m - 1)

    def delta_simplified(self, m: int) -> Fraction:
        """The closed form ``(5/8) ell(m-1) - (c / 2^(m-1)) eta(m) / 2``.

        Kept only to record that it disagrees with :meth:`delta`.
        """
        return Fraction(5, 8) * self.ell(m - 1) - self.c / 2 ** (m - 1) * self.eta(m) / 2

    def margin(self, parent_level: int) -> Fraction:
        # children of B (level 0) use the level-1 margin
        return self.theta(max(parent_level, 1))


def anchor(n: int) -> Fraction:
    if n < 0:
        raise DomainError(f"anchor index must be >= 0, got {n}")
    return Fraction(0) if n == 0 else Fraction(1, n)


def delta_min(m: int) -> Fraction:
    """Smallest distance between two of ``0, 1, 1/2, ..., 1/m``."""
    if m < 1:
        raise DomainError(f"delta_min needs m >= 1, got {m}")
    pts = sorted(anchor(n) for n in range(m + 1))
    return min(b - a for a, b in zip(pts, pts[1:]))


def external_window(n: int, m: int, params: Optional[ScaleParams] = None) -> Interval:
    """Open window of length ``eta(m)`` around ``1/n``, clipped to ``[0, 1]``."""
    if not 0 <= n <= m:
        raise DomainError(f"window U_(n,m) needs 0 <= n <= m, got n={n}, m={m}")
    half = ScaleParams.eta(m) / 2
    t = anchor(n)
    if n == 0:
        return Interval(Fraction(0), half, True, False)
    if n == 1:
        return Interval(1 - half, Fraction(1), False, True)
    return Interval(t - half, t + half, False, False)


def auxiliary_window(m: int) -> Interval:
    """``V_m``: the window at 1, already clipped to ``[0, 1]``."""
    return external_window(1, m)


def default_base(params: ScaleParams) -> Interval:
    eta1 = params.eta(1)
    return Interval.closed(1 - Fraction(15, 32) * eta1, 1 - Fraction(3, 32) * eta1)


def base_interval(
    params: ScaleParams, candidate: Optional[Interval] = None
) -> Interval:
    """The base interval B, validated against the construction's needs.

    ``candidate`` overrides the default placement. B must sit inside
    ``V_1``, be long enough for two level-1 blocks with their margins and a
    positive gap, and stay left of the level-2 window at 1 so the
    terminal ramps of levels >= 2 never touch the block tree.
    """
    b = default_base(params) if candidate is None else candidate
    ell1, theta1 = params.ell(1), params.theta(1)
    if not (b.lo_closed and b.hi_closed):
        raise ConstructionError(f"B must be closed, got {b}")
    if not b.issubset(auxiliary_window(1)):
        raise ConstructionError(f"B = {b} is not contained in V_1 = {auxiliary_window(1)}")
    if not b.length > ell1 + 2 * theta1:
        raise ConstructionError(f"|B| = {b.length} must exceed ell_1 + 2 theta_1 = {ell1 + 2 * theta1}")
    if not b.length > 2 * ell1 + 2 * theta1:
        raise ConstructionError(
            f"|B| = {b.length} leaves no gap between two level-1 blocks "
            f"(needs > 2 ell_1 + 2 theta_1 = {2 * ell1 + 2 * theta1})"
        )
    if b.hi > 1 - params.eta(2) / 2:
        raise ConstructionError(f"B = {b} meets the level-2 window at 1")
    return b


# -- block geometry -------------------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    """Block coordinates by closed formula, usable at any depth.

    Nothing is materialized; a block of level ``m`` costs ``O(m)``.
    """

    params: ScaleParams
    base: Interval

    @lru_cache(maxsize=None)
    def _steps(self, k: int) -> tuple[Fraction, Fraction]:
        """Left-end offsets of the minus and plus child when descending to level k."""
        parent_len = self.base.length if k == 1 else self.params.ell(k - 1)
        margin = self.params.margin(k - 1)
        return margin, parent_len - margin - self.params.ell(k)

    def block_lo(self, m: int, i: int) -> Fraction:
        lo = self.base.lo
        for k in range(1, m + 1):
            minus, plus = self._steps(k)
            lo += plus if (i >> (m - k)) & 1 else minus
        return lo

    def block(self, m: int, i: int) -> tuple[Fraction, Fraction]:
        if m == 0:
            return self.base.lo, self.base.hi
        lo = self.block_lo(m, i)
        return lo, lo + self.params.ell(m)

    def block_of(self, word: Sequence[int]) -> Interval:
        lo, hi = self.block(len(word), word_index(word))
        return Interval(lo, hi)

    def count_hi_below(self, m: int, x: Fraction) -> int:
        """Number of level-``m`` blocks lying entirely left of ``x``."""
        ell = self.params.ell(m)
        lo_, hi_ = 0, 2**m
        while lo_ < hi_:
            mid = (lo_ + hi_) // 2
            if self.block_lo(m, mid) + ell < x:
                lo_ = mid + 1
            else:
                hi_ = mid
        return lo_

    def count_lo_at_most(self, m: int, x: Fraction) -> int:
        """Number of level-``m`` blocks whose left end is ``<= x``."""
        lo_, hi_ = 0, 2**m
        while lo_ < hi_:
            mid = (lo_ + hi_) // 2
            if self.block_lo(m, mid) <= x:
                lo_ = mid + 1
            else:
                hi_ = mid
        return lo_

    def ramp_start(self, m: int) -> Fraction:
        """Left end of the terminal ramp of level ``m`` inside ``U_(1,m)``."""
        return max(1 - self.params.eta(m) / 2, self.base.hi)

    def branch_point(self, prefix: Sequence[int]) -> Fraction:
        """The point common to ``J_prefix``, ``J_prefix+``, ``J_prefix++``, ...

        Descending along plus-children moves the right end left by one
        margin per level; margins shrink by 16 per level, so the right ends
        converge to ``hi(J_prefix) - (16/15) * margin(len(prefix))``.
        """
        m = len(prefix)
        _, hi = self.block(m, word_index(prefix))
        if m == 0:
            # the level-1 margin is used twice: below B and below level 1
            return hi - self.params.theta(1) - Fraction(16, 15) * self.params.theta(1)
        return hi - Fraction(16, 15) * self.params.theta(m)


@dataclass(frozen=True)
class BlockTree:
    params: ScaleParams
    base: Interval
    max_level: int
    levels: tuple[tuple[tuple[Fraction, Fraction], ...], ...] = field(repr=False)

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice(self.params, self.base)

    def _check_level(self, m: int) -> None:
        if not 0 <= m <= self.max_level:
            raise DomainError(f"level {m} outside 0..{self.max_level}")

    def spans(self, m: int) -> tuple[tuple[Fraction, Fraction], ...]:
        self._check_level(m)
        return self.levels[m]

    def blocks(self, m: int) -> list[Interval]:
        return [Interval(lo, hi) for lo, hi in self.spans(m)]

    def block(self, word: Sequence[int]) -> Interval:
        lo, hi = self.spans(len(word))[word_index(word)]
        return Interval(lo, hi)

    def external_windows(self, m: int) -> list[Interval]:
        return [external_window(n, m) for n in range(m + 1)]

    def internal_windows(self, m: int) -> list[Interval]:
        """Central open windows between the two children of each level-``m`` block."""
        ell_next = self.params.ell(m + 1)
        margin = self.params.margin(m)
        return [
            Interval(lo + margin + ell_next, hi - margin - ell_next, False, False)
            for lo, hi in self.spans(m)
        ]

    def to_json(self) -> dict:
        levels = []
        for m in range(1, self.max_level + 1):
            levels.append(
                {
                    "m": m,
                    "blocks": [
                        {"word": word_str(index_word(i, m)), "interval": Interval(lo, hi).to_json()}
                        for i, (lo, hi) in enumerate(self.levels[m])
                    ],
                    "external_windows": [w.to_json() for w in self.external_windows(m)],
                    "gaps": [g.to_json() for g in consecutive_gaps(self, m)],
                }
            )
        return {
            "c": fmt(self.params.c),
            "max_level": self.max_level,
            "base": self.base.to_json(),
            "levels": levels,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BlockTree":
        params = ScaleParams(as_rational(data["c"]))
        base = Interval.from_json(data["base"])
        max_level = int(data["max_level"])
        levels: list[tuple[tuple[Fraction, Fraction], ...]] = [((base.lo, base.hi),)]
        for m, entry in enumerate(data["levels"], start=1):
            if int(entry["m"]) != m:
                raise ConstructionError(f"levels out of order at position {m}")
            spans = []
            for i, blk in enumerate(entry["blocks"]):
                if parse_word(blk["word"]) != index_word(i, m):
                    raise ConstructionError(f"block {blk['word']} stored at position {i}")
                iv = Interval.from_json(blk["interval"])
                spans.append((iv.lo, iv.hi))
            levels.append(tuple(spans))
        if len(levels) != max_level + 1:
            raise ConstructionError("level count does not match max_level")
        return cls(params, base, max_level, tuple(levels))


def build_tree(
    max_level: int,
    params: Optional[ScaleParams] = None,
    base: Optional[Interval] = None,
) -> BlockTree:
    if max_level < 1:
        raise DomainError(f"max_level must be >= 1, got {max_level}")
    params = params or ScaleParams()
    base = base_interval(params, base)
    levels = [((base.lo, base.hi),)]
    for m in range(1, max_level + 1):
        ell = params.ell(m)
        margin = params.margin(m - 1)
        children = []
        for i, (lo, hi) in enumerate(levels[-1]):
            left = (lo + margin, lo + margin + ell)
            right = (hi - margin - ell, hi - margin)
            if not (lo < left[0] and right[1] < hi and left[1] < right[0]):
                raise ConstructionError(
                    f"children of block {word_str(index_word(i, m - 1)) or '(root)'} "
                    "violate strict nesting or sibling disjointness"
                )
            children.append(left)
            children.append(right)
        levels.append(tuple(children))
    return BlockTree(params, base, max_level, tuple(levels))


def consecutive_gaps(tree: BlockTree, m: int) -> list[Interval]:
    """Open intervals strictly between consecutive level-``m`` blocks."""
    if not 1 <= m <= tree.max_level:
        raise DomainError(f"level {m} outside 1..{tree.max_level}")
    spans = tree.levels[m]
    return [Interval(a[1], b[0], False, False) for a, b in zip(spans, spans[1:])]


# -- verification ---------------------------------------------------------------


def verify_geometry(tree: BlockTree) -> VerificationReport:
    p = tree.params
    report = VerificationReport(
        "geometry",
        {"c": p.c, "max_level": tree.max_level, "base": tree.base},
    )
    v1 = auxiliary_window(1)
    report.add(
        "geometry.base",
        "B is a closed subinterval of V_1 longer than ell_1 + 2 theta_1",
        tree.base.issubset(v1) and tree.base.length > p.ell(1) + 2 * p.theta(1),
        measured={"B": tree.base, "length": tree.base.length},
        expected={"V_1": v1, "min_length": p.ell(1) + 2 * p.theta(1)},
    )
    for m in range(1, tree.max_level + 1):
        spans = tree.levels[m]
        parents = tree.levels[m - 1]
        ell = p.ell(m)
        margin = p.margin(m - 1)

        ok = True
        for i, (plo, phi) in enumerate(parents):
            (alo, ahi), (blo, bhi) = spans[2 * i], spans[2 * i + 1]
            ok &= plo < alo and bhi < phi and ahi < blo
        report.add("geometry.nesting", "children lie in the parent's interior and are disjoint", ok, level=m)

        ordered = sorted(spans)
        ok = all(a[1] < b[0] for a, b in zip(ordered, ordered[1:]))
        report.add("geometry.level_disjoint", "distinct words of equal length have disjoint blocks", ok, level=m)

        lengths_ok = all(hi - lo == ell for lo, hi in spans)
        margins_ok = all(
            spans[2 * i][0] - plo == margin and phi - spans[2 * i + 1][1] == margin
            for i, (plo, phi) in enumerate(parents)
        )
        sibling_gaps = {spans[2 * i + 1][0] - spans[2 * i][1] for i in range(len(parents))}
        if m == 1:
            expected_gap = tree.base.length - 2 * margin - 2 * ell
        else:
            expected_gap = p.delta(m)
        report.add(
            "geometry.lengths",
            "block length ell_m, sibling gap, lateral margins",
            lengths_ok and margins_ok and sibling_gaps == {expected_gap},
            level=m,
            measured={"lengths_ok": lengths_ok, "margins_ok": margins_ok, "sibling_gaps": sorted(sibling_gaps)},
            expected={"ell": ell, "margin": margin, "sibling_gap": expected_gap},
        )

        lex_ok = all(a[1] < b[0] for a, b in zip(spans, spans[1:]))
        lex_ok &= all(
            tree.lattice.block_of(w) == Interval(*spans[word_index(w)])
            for w in ([(-1,) * m, (1,) * m] + [index_word(len(spans) // 2, m)])
        )
        report.add("geometry.lex_order", "blocks appear left to right in lexicographic order", lex_ok, level=m)

        report.add(
            "geometry.cardinality",
            "2^m blocks",
            len(spans) == 2**m,
            level=m,
            measured=len(spans),
            expected=2**m,
        )

        dm = delta_min(m)
        report.add(
            "geometry.window_scale",
            "eta_m <= Delta_m and Delta_m >= 1/(m(m+1))",
            p.eta(m) <= dm and dm >= Fraction(1, m * (m + 1)),
            level=m,
            measured={"eta": p.eta(m), "Delta": dm},
        )

        ell_next, delta_next = p.ell(m + 1), p.delta(m + 1)
        report.add(
            "geometry.budget_identity",
            "2 ell_(m+1) + delta_(m+1) + 2 theta_m = ell_m",
            2 * ell_next + delta_next + 2 * p.theta(m) == ell and delta_next > 0,
            level=m,
            measured=2 * ell_next + delta_next + 2 * p.theta(m),
            expected=ell,
        )

        windows = tree.external_windows(m)
        ok = all(a.disjoint(b) for a, b in itertools.combinations(windows, 2))
        ok &= all(w.length == p.eta(m) for w in windows[2:])
        report.add("geometry.windows_disjoint", "external windows U_(n,m), n <= m, pairwise disjoint", ok, level=m)

        report.add(
            "geometry.within_base",
            "all blocks lie in B",
            spans[0][0] >= tree.base.lo and spans[-1][1] <= tree.base.hi,
            level=m,
        )

        gaps = [b[0] - a[1] for a, b in zip(spans, spans[1:])]
        sib = set(gaps[0::2])
        non_sib = gaps[1::2]
        report.add(
            "geometry.gap_ordering",
            "non-sibling gaps are strictly longer than sibling gaps",
            all(g > max(sib) for g in non_sib),
            level=m,
            measured={"sibling": max(sib), "shortest_non_sibling": min(non_sib) if non_sib else None},
        )

        if m >= 2:
            report.add(
                "geometry.terminal_clearance",
                "B is disjoint from the terminal window U_(1,m)",
                tree.base.disjoint(external_window(1, m)),
                level=m,
            )

        defined, simplified = p.delta(m + 1), p.delta_simplified(m + 1)
        report.add(
            "geometry.delta_closed_form",
            "closed form of delta_(m+1) agrees with its defining identity",
            defined == simplified,
            level=m,
            measured={"closed_form": simplified},
            expected={"definition": defined},
            detail="the defining identity is used throughout; the closed form is only evaluated",
            on_failure=DISCREPANCY,
        )

        vm = auxiliary_window(m)
        report.add(
            "geometry.internal_windows_in_V",
            "internal windows W_(sigma,m) lie in V_m",
            all(w.issubset(vm) for w in tree.internal_windows(m)),
            level=m,
            measured={"V_m": vm, "B": tree.base},
            detail="V_m shrinks below |B| from level 2 on; the constancy certificates do not rely on this containment",
            on_failure=DISCREPANCY,
        )
    return report
