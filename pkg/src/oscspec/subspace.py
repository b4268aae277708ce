"""Finitely supported coefficient vectors and the l1 isometry.

Only finite sums are represented. For an infinite l1 vector the gap
between its truncation and the full sum is bounded in sup norm by the
tail sum ``sum_{m > M} |a_m|``; results here always carry a zero tail.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .arith import DomainError, as_rational, fmt
from .generators import GeneratorSet, PiecewiseLinear, linear_combine
from .lattice import BlockTree, Lattice, Word
from .report import VerificationReport


@dataclass(frozen=True)
class CoeffVector:
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(as_rational(a) for a in self.entries))

    @classmethod
    def of(cls, *entries) -> "CoeffVector":
        return cls(tuple(entries))

    @property
    def support_bound(self) -> int:
        return len(self.entries)

    @property
    def l1(self) -> Fraction:
        return sum((abs(a) for a in self.entries), Fraction(0))

    @property
    def signs(self) -> Word:
        # sign(0) = +1
        return tuple(-1 if a < 0 else 1 for a in self.entries)

    def truncated(self, k: int) -> "CoeffVector":
        return CoeffVector(self.entries[:k])

    @classmethod
    def parse(cls, text: str) -> "CoeffVector":
        """One ``p/q`` per line; blank lines and ``#`` comments are ignored."""
        entries = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                entries.append(as_rational(line))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(tuple(entries))

    def dumps(self) -> str:
        return "".join(fmt(a) + "\n" for a in self.entries)

    @classmethod
    def random(
        cls,
        rng: random.Random,
        max_support: int = 10,
        scale: int = 2**10,
    ) -> "CoeffVector":
        """Dyadic entries ``k / scale`` with ``k`` uniform in ``[-scale, scale]``."""
        size = rng.randint(1, max_support)
        return cls(tuple(Fraction(rng.randint(-scale, scale), scale) for _ in range(size)))


def _require(a: CoeffVector, available: int) -> None:
    if a.support_bound > available:
        raise DomainError(
            f"support {a.support_bound} exceeds the {available} available generator levels"
        )


def synthesize(a: CoeffVector, gens: GeneratorSet) -> PiecewiseLinear:
    _require(a, min(gens.max_level, gens.tree.max_level))
    return gens.combine(a.entries)


def synthesize_reference(a: CoeffVector, gens: GeneratorSet) -> PiecewiseLinear:
    """Same sum through :func:`linear_combine`, without the cached table."""
    _require(a, min(gens.max_level, gens.tree.max_level))
    return linear_combine(list(a.entries), [gens.phi(m) for m in range(1, a.support_bound + 1)])


def witness_point(a: CoeffVector, tree: "BlockTree | Lattice") -> Fraction:
    """Midpoint of the block whose word is the sign pattern of ``a``."""
    lattice = tree.lattice if isinstance(tree, BlockTree) else tree
    return lattice.block_of(a.signs).midpoint


@dataclass(frozen=True)
class IsometryCheck:
    norm_sup: Fraction
    norm_l1: Fraction
    witness: Fraction
    witness_value: Fraction
    tail: Fraction = Fraction(0)

    @property
    def equal(self) -> bool:
        return self.norm_sup == self.norm_l1

    @property
    def witness_attains(self) -> bool:
        return abs(self.witness_value) == self.norm_l1

    def to_json(self) -> dict:
        return {
            "l1": fmt(self.norm_l1),
            "sup": fmt(self.norm_sup),
            "equal": self.equal,
            "witness": fmt(self.witness),
            "witness_value": fmt(self.witness_value),
            "tail_bound": fmt(self.tail),
        }


def check_isometry(a: CoeffVector, gens: GeneratorSet) -> IsometryCheck:
    _require(a, min(gens.max_level, gens.tree.max_level))
    lo, hi = gens.combination_extrema(a.entries)
    w = witness_point(a, gens.tree)
    value = sum(
        (coef * gens.phi(m).evaluate(w) for m, coef in enumerate(a.entries, start=1)),
        Fraction(0),
    )
    return IsometryCheck(max(abs(lo), abs(hi)), a.l1, w, value)


def random_vectors(seed: int, count: int, max_support: int = 10) -> list[CoeffVector]:
    rng = random.Random(seed)
    return [CoeffVector.random(rng, max_support) for _ in range(count)]


def verify_isometry(
    gens: GeneratorSet,
    count: int = 200,
    seed: int = 0,
    max_support: int = 10,
    vectors: Optional[Iterable[CoeffVector]] = None,
) -> VerificationReport:
    report = VerificationReport(
        "isometry", {"count": count, "seed": seed, "max_support": max_support}
    )
    vectors = list(vectors) if vectors is not None else random_vectors(seed, count, max_support)
    bad_equal, bad_witness = [], []
    for k, a in enumerate(vectors):
        res = check_isometry(a, gens)
        if not res.equal:
            bad_equal.append(k)
        if not res.witness_attains:
            bad_witness.append(k)
    report.add(
        "isometry.l1",
        "sup norm of the combination equals the l1 norm of its coefficients",
        not bad_equal,
        measured={"vectors": len(vectors), "mismatches": bad_equal},
    )
    report.add(
        "isometry.witness",
        "the block midpoint of the sign word attains the norm",
        not bad_witness,
        measured={"vectors": len(vectors), "mismatches": bad_witness},
    )
    for m in range(1, min(gens.max_level, gens.tree.max_level) + 1):
        e = [Fraction(0)] * (m - 1) + [Fraction(1)]
        report.add(
            "isometry.unit_vectors",
            "unit vector e_m has norm 1",
            check_isometry(CoeffVector(tuple(e)), gens).norm_sup == 1,
            level=m,
        )
    return report

