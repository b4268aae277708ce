"""Exact rationals and intervals with open/closed endpoints.

Every coordinate, length and function value in the package is a
:class:`fractions.Fraction`; floats never enter a computation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class ConstructionError(ValueError):
    """A geometric object could not be built with the required properties."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def normalize(num: int, den: int) -> Fraction:
    if den == 0:
        raise ConstructionError("zero denominator")
    return Fraction(num, den)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, a Fraction or a ``"p/q"`` string to a Fraction.

    Decimal strings and floats are refused so that exactness is never lost
    silently.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        num, sep, den = text.partition("/")
        try:
            return normalize(int(num), int(den) if sep else 1)
        except ValueError as exc:
            if isinstance(exc, ConstructionError):
                raise
            raise ValueError(f"not an exact rational: {value!r}") from None
    raise TypeError(f"cannot convert {type(value).__name__} to Rational")


def fmt(q: Fraction) -> str:
    """Canonical ``"num/den"`` string, always with an explicit denominator."""
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ConstructionError(f"interval with lo > hi: {self}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ConstructionError("a degenerate interval must be closed")

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(as_rational(lo), as_rational(hi), True, True)

    @classmethod
    def open(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(as_rational(lo), as_rational(hi), False, False)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains_point(self, t: Fraction) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    __contains__ = contains_point

    def issubset(self, other: "Interval") -> bool:
        left_ok = other.lo < self.lo or (
            other.lo == self.lo and (other.lo_closed or not self.lo_closed)
        )
        right_ok = self.hi < other.hi or (
            other.hi == self.hi and (other.hi_closed or not self.hi_closed)
        )
        return left_ok and right_ok

    def interior(self) -> Optional["Interval"]:
        if self.lo == self.hi:
            return None
        return Interval(self.lo, self.hi, False, False)

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi, True, True)

    def intersection(self, other: "Interval") -> Optional["Interval"]:
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return None
        return Interval(lo, hi, lo_closed, hi_closed)

    def disjoint(self, other: "Interval") -> bool:
        return self.intersection(other) is None

    def distance_to(self, t: Fraction) -> Fraction:
        if t < self.lo:
            return self.lo - t
        if t > self.hi:
            return t - self.hi
        return Fraction(0)

    def to_json(self) -> dict:
        return {
            "lo": fmt(self.lo),
            "hi": fmt(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Interval":
        return cls(
            as_rational(data["lo"]),
            as_rational(data["hi"]),
            bool(data["lo_closed"]),
            bool(data["hi_closed"]),
        )

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


class IntervalRelation(NamedTuple):
    intersection: Optional[Interval]
    disjoint: bool


def interval_ops(a: Interval, b: Interval) -> IntervalRelation:
    meet = a.intersection(b)
    return IntervalRelation(meet, meet is None)


UNIT = Interval.closed(0, 1)
