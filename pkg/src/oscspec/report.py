"""Machine-readable verification records.

A check has one of three statuses. ``pass`` and ``fail`` are verdicts on a
claim the construction is supposed to satisfy. ``discrepancy`` marks an
expected property that the exact computation contradicts, or a place
where the implemented design knowingly departs from it; it never
fails a run but is always emitted.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional

from .arith import Interval, fmt

PASS = "pass"
FAIL = "fail"
DISCREPANCY = "discrepancy"


def jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, Interval):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


@dataclass
class Check:
    anchor: str
    name: str
    status: str
    level: Optional[int] = None
    measured: Any = None
    expected: Any = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {k: jsonable(v) for k, v in asdict(self).items()}
        return {k: v for k, v in out.items() if v not in (None, "")}

    @classmethod
    def from_json(cls, data: dict) -> "Check":
        return cls(**data)


@dataclass
class VerificationReport:
    title: str
    params: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def add(
        self,
        anchor: str,
        name: str,
        ok: bool,
        *,
        level: Optional[int] = None,
        measured: Any = None,
        expected: Any = None,
        detail: str = "",
        on_failure: str = FAIL,
    ) -> Check:
        # on_failure=DISCREPANCY records a contradicted expectation without failing the run
        check = Check(
            anchor,
            name,
            PASS if ok else on_failure,
            level,
            measured,
            expected,
            detail,
        )
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def discrepancies(self) -> list[Check]:
        return [c for c in self.checks if c.status == DISCREPANCY]

    @property
    def passed(self) -> bool:
        return not self.failures

    def by_anchor(self, anchor: str) -> list[Check]:
        return [c for c in self.checks if c.anchor == anchor]

    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, DISCREPANCY: 0}
        for c in self.checks:
            counts[c.status] += 1
        return counts

    def lines(self) -> Iterable[str]:
        for c in self.checks:
            where = f" m={c.level}" if c.level is not None else ""
            yield f"{c.status.upper():12s} {c.anchor}{where}: {c.name}"

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "params": jsonable(self.params),
            "summary": self.summary(),
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)
