"""Oscillation certificates near and away from M = {1/n} ∪ {0}.

Nothing here computes the oscillating spectrum as a true supremum over
the unit ball. Two one-sided certificates are produced instead:

* a lower bound, the oscillation of a single unit-norm generator on
  ``I(t, d)``;
* a constancy certificate, a radius on which every generator up to the
  built depth oscillates at most ``eps``, with an analytic argument for
  all deeper levels when the geometry allows it.

Points inside the hull of B get neither: generator probes there keep
measuring oscillation 2 at every tested radius, which is recorded as a
discrepancy against the claim that the spectrum equals M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import DomainError, Interval, as_rational, fmt
from .generators import GeneratorSet
from .lattice import ScaleParams, Word, anchor, external_window, word_str
from .report import DISCREPANCY, VerificationReport, jsonable

OSCILLATION_CERTIFIED = "OSCILLATION_CERTIFIED"
CONSTANCY_CERTIFIED = "CONSTANCY_CERTIFIED"
UNDETERMINED_B_REGION = "UNDETERMINED_B_REGION"
UNDETERMINED = "UNDETERMINED"

SPECTRUM_CLAIM = "spectrum.equals_M"
TWO = Fraction(2)


def neighborhood(t: Fraction, d: Fraction) -> Interval:
    """``I(t, d) = [0, 1] ∩ [t - d, t + d]``."""
    if d <= 0:
        raise DomainError(f"radius must be positive, got {d}")
    if not 0 <= t <= 1:
        raise DomainError(f"t = {t} outside [0, 1]")
    return Interval(max(t - d, Fraction(0)), min(t + d, Fraction(1)))


def in_M(t: Fraction) -> bool:
    return t == 0 or (0 < t <= 1 and t.numerator == 1)


def nearest_anchors(t: Fraction) -> list[Fraction]:
    """Candidates for the point of M closest to ``t``."""
    cands = {Fraction(0), Fraction(1)}
    if 0 < t < 1:
        inv = 1 / t
        cands.add(Fraction(1, math.floor(inv)))
        cands.add(Fraction(1, math.ceil(inv)))
    return sorted(cands)


def dist_to_M(t: Fraction) -> Fraction:
    return min(abs(t - c) for c in nearest_anchors(t))


def ramp_level(n: int, d: Fraction) -> int:
    """Smallest level whose window at ``t_n`` fits inside ``I(t_n, d)``.

    For ``n = 0`` there is no transition at 0 itself; the answer is the
    smallest ``k >= 2`` whose bump window ``U_(k,k)`` fits in ``[0, d]``.
    """
    if n < 0:
        raise DomainError(f"anchor index must be >= 0, got {n}")
    if d <= 0:
        raise DomainError(f"radius must be positive, got {d}")
    eta = ScaleParams.eta
    if n == 0:
        # 1/k + eta_k/2 decreases in k and exceeds d while k < 1/d
        k = max(2, math.floor(1 / d))
        while anchor(k) + eta(k) / 2 > d:
            k += 1
        return k
    m = n if n >= 2 else 1
    while eta(m) / 2 > d:
        m += 1
    return m


def oscillation_profile(t: Fraction, d: Fraction, gens: GeneratorSet) -> list[Fraction]:
    """Oscillation of ``phi_1 .. phi_max_level`` on ``I(t, d)``."""
    I = neighborhood(t, d)
    return [gens.oscillation(m, I) for m in range(1, gens.max_level + 1)]


def gamma_lower(t: Fraction, d: Fraction, gens: GeneratorSet) -> Fraction:
    return max(oscillation_profile(as_rational(t), as_rational(d), gens))


@dataclass(frozen=True)
class Evidence:
    d: Fraction
    level: int
    interval: Interval
    oscillation: Fraction

    def to_json(self) -> dict:
        return {
            "d": fmt(self.d),
            "level": self.level,
            "interval": self.interval.to_json(),
            "oscillation": fmt(self.oscillation),
        }


def best_evidence(t: Fraction, d: Fraction, gens: GeneratorSet) -> Evidence:
    """Largest generator oscillation on ``I(t, d)``, at the smallest level reaching it."""
    profile = oscillation_profile(t, d, gens)
    top = max(profile)
    return Evidence(d, profile.index(top) + 1, neighborhood(t, d), top)


@dataclass(frozen=True)
class ConstancyCertificate:
    t: Fraction
    eps: Fraction
    d: Fraction
    sup_osc: Fraction
    tail_covered: bool
    dist_M: Fraction
    d0: Fraction
    kappa: Optional[Fraction]
    levels: int

    @property
    def ok(self) -> bool:
        return self.d > 0 and self.sup_osc <= self.eps and self.tail_covered

    def to_json(self) -> dict:
        return jsonable(
            {
                "t": self.t,
                "eps": self.eps,
                "d": self.d,
                "sup_osc": self.sup_osc,
                "tail_covered": self.tail_covered,
                "dist_M": self.dist_M,
                "d0": self.d0,
                "kappa": self.kappa,
                "levels": self.levels,
            }
        )


def constancy_radius(t: Fraction, eps: Fraction, gens: GeneratorSet) -> ConstancyCertificate:
    """Radius ``d`` with every generator oscillating at most ``eps`` on ``I(t, d)``.

    Levels with ``eta_m`` comparable to the distances from ``t`` to M or
    to 1 form a finite set A; ``d`` is shrunk by ``min_A eta_m * eps / 12``
    since bump slopes reach ``6 / eta_m``. The returned ``sup_osc`` is the
    exact maximum over all built levels. ``tail_covered`` holds when
    ``I(t, d)`` provably misses every transition region of every deeper
    level.
    """
    t, eps = as_rational(t), as_rational(eps)
    if in_M(t):
        raise DomainError(f"t = {t} lies in M")
    if eps <= 0:
        raise DomainError("eps must be positive")
    delta = dist_to_M(t)
    to_one = 1 - t
    d0 = min(delta, to_one) / 4
    eta = ScaleParams.eta
    kappa = None
    m = 1
    while eta(m) >= delta / 2 or eta(m) >= to_one / 2:
        kappa = eta(m)
        m += 1
    d = d0 if kappa is None else min(d0, kappa * eps / 12)
    I = neighborhood(t, d)
    sup_osc = max(gens.oscillation(k, I) for k in range(1, gens.max_level + 1))
    deepest = eta(gens.max_level)
    base = gens.tree.base
    tail = (
        min(base.distance_to(t), to_one) > d + deepest
        and delta > d + deepest / 2
    )
    return ConstancyCertificate(t, eps, d, sup_osc, tail, delta, d0, kappa, gens.max_level)


@dataclass
class PointClass:
    point: Fraction
    verdict: str
    evidence: list[Evidence] = field(default_factory=list)
    certificate: Optional[ConstancyCertificate] = None
    tail_note: str = ""
    label: str = ""

    def to_json(self) -> dict:
        out = {"t": fmt(self.point), "verdict": self.verdict}
        if self.label:
            out["label"] = self.label
        if self.certificate is not None:
            out.update(
                d=fmt(self.certificate.d),
                sup_osc=fmt(self.certificate.sup_osc),
                tail_covered=self.certificate.tail_covered,
            )
        out["evidence"] = [e.to_json() for e in self.evidence]
        if self.tail_note:
            out["tail_note"] = self.tail_note
        return out


def _anchor_index(t: Fraction) -> int:
    return 0 if t == 0 else t.denominator


def in_base_hull(t: Fraction, gens: GeneratorSet) -> bool:
    return gens.tree.base.contains_point(t)


def classify_point(
    t: Fraction,
    d_grid: Sequence[Fraction],
    gens: GeneratorSet,
    eps: Fraction = Fraction(1, 100),
) -> PointClass:
    t = as_rational(t)
    if not 0 <= t <= 1:
        raise DomainError(f"t = {t} outside [0, 1]")
    if not d_grid:
        raise DomainError("empty radius grid")
    evidence = []
    for d in d_grid:
        d = as_rational(d)
        probe = gens
        if in_M(t):
            # reach the level whose window at t fits in I(t, d); local queries only
            probe = gens.with_max_level(max(gens.max_level, ramp_level(_anchor_index(t), d)))
        evidence.append(best_evidence(t, d, probe))
    all_two = all(e.oscillation >= TWO for e in evidence)

    if in_base_hull(t, gens):
        return PointClass(
            t,
            UNDETERMINED_B_REGION,
            evidence,
            tail_note=(
                "inside B every radius contains whole blocks of deep levels; "
                "no constancy certificate exists at the built depth"
            ),
        )
    cert = None
    if not in_M(t):
        # a constancy certificate is a proof; a finite radius grid is only evidence
        cert = constancy_radius(t, eps, gens)
        if cert.ok:
            return PointClass(
                t,
                CONSTANCY_CERTIFIED,
                evidence,
                cert,
                tail_note=(
                    f"levels above {gens.max_level} are constant on I(t, d): "
                    "I(t, d) misses B and every window of radius eta_m/2 around M"
                ),
            )
    if all_two:
        return PointClass(t, OSCILLATION_CERTIFIED, evidence)
    return PointClass(t, UNDETERMINED, evidence, cert)


def probe_point(prefix: Word, gens: GeneratorSet, anchor_kind: str = "midpoint") -> Fraction:
    if anchor_kind == "midpoint":
        return gens.lattice.block_of(prefix).midpoint
    if anchor_kind == "branch":
        return gens.lattice.branch_point(prefix)
    raise DomainError(f"unknown probe anchor {anchor_kind!r}")


def cantor_probe(
    prefix: Word,
    d_grid: Sequence[Fraction],
    gens: GeneratorSet,
    anchor_kind: str = "midpoint",
) -> PointClass:
    """Probe generator oscillation around a block of the tree.

    ``anchor_kind="midpoint"`` probes the midpoint of ``J_prefix``, which
    lies in the central gap between its two children. ``"branch"`` probes
    the point shared by ``J_prefix ⊃ J_prefix+ ⊃ J_prefix++ ⊃ ...``, so
    every radius eventually contains a whole block together with both of
    its children.
    """
    prefix = tuple(prefix)
    if len(prefix) > gens.max_level:
        raise DomainError(f"prefix of length {len(prefix)} exceeds max_level {gens.max_level}")
    t = probe_point(prefix, gens, anchor_kind)
    evidence = [best_evidence(t, as_rational(d), gens) for d in d_grid]
    return PointClass(
        t,
        UNDETERMINED_B_REGION,
        evidence,
        label=f"{anchor_kind}:{word_str(prefix) or '(root)'}",
    )


@dataclass
class SpectrumReport:
    params: dict
    points: list[PointClass]
    discrepancies: list[dict]

    @property
    def summary(self) -> dict:
        counts: dict[str, int] = {}
        for p in self.points:
            counts[p.verdict] = counts.get(p.verdict, 0) + 1
        counts["in_M"] = sum(in_M(p.point) for p in self.points)
        return counts

    def to_json(self) -> dict:
        return {
            "params": jsonable(self.params),
            "summary": self.summary,
            "points": [p.to_json() for p in self.points],
            "discrepancies": self.discrepancies,
        }


def _discrepancy(p: PointClass) -> dict:
    tops = [e.oscillation for e in p.evidence]
    all_two = bool(tops) and all(o >= TWO for o in tops)
    if p.verdict == OSCILLATION_CERTIFIED:
        finding = "oscillation 2 certified at every tested radius, yet the point is outside M"
    elif all_two:
        finding = (
            "generator oscillation 2 at every tested radius at a point outside M "
            "inside the block tree; the argument for constancy away from M does not cover it"
        )
    else:
        finding = "point inside the block tree left undetermined at the built depth"
    return {
        "anchor": SPECTRUM_CLAIM,
        "claim": "the oscillating spectrum equals M",
        "t": fmt(p.point),
        "label": p.label,
        "verdict": p.verdict,
        "finding": finding,
        "oscillations": [fmt(o) for o in tops],
    }


def scan(
    points: Sequence[Fraction],
    d_grid: Sequence[Fraction],
    gens: GeneratorSet,
    eps: Fraction = Fraction(1, 100),
    extra: Sequence[PointClass] = (),
) -> SpectrumReport:
    if not points and not extra:
        raise DomainError("nothing to scan")
    records = [classify_point(as_rational(t), d_grid, gens, eps) for t in points]
    records += list(extra)
    discrepancies = [
        _discrepancy(p)
        for p in records
        if p.verdict == UNDETERMINED_B_REGION
        or (p.verdict == OSCILLATION_CERTIFIED and not in_M(p.point))
    ]
    params = {
        "c": gens.params.c,
        "max_level": gens.max_level,
        "d_grid": [as_rational(d) for d in d_grid],
        "eps": eps,
    }
    return SpectrumReport(params, records, discrepancies)


# -- verification suites ------------------------------------------------------------

RAMP_RADII = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))
CONSTANCY_POINTS = (Fraction(7, 10), Fraction(9, 100), Fraction(2, 5) + Fraction(1, 1000))
CONSTANCY_EPS = (Fraction(1, 10), Fraction(1, 100))


def verify_ramps(
    gens: GeneratorSet, n_max: int = 8, radii: Sequence[Fraction] = RAMP_RADII
) -> VerificationReport:
    report = VerificationReport("ramps", {"n_max": n_max, "radii": list(radii), "max_level": gens.max_level})
    for n in range(n_max + 1):
        for d in radii:
            k = ramp_level(n, d)
            probe = gens.with_max_level(max(gens.max_level, k))
            ev = best_evidence(anchor(n), d, probe)
            report.add(
                "ramps.oscillation_near_M",
                f"a unit generator oscillates by 2 on I(t_{n}, {d})",
                ev.oscillation == TWO,
                measured={"oscillation": ev.oscillation, "level": ev.level, "levels_searched": probe.max_level},
                expected={"oscillation": TWO, "ramp_level": k},
            )
    top = min(gens.max_level, gens.tree.max_level)
    f = gens.phi(top)
    same = []
    for n in range(2, top + 1):
        w = external_window(n, top)
        if f.evaluate(w.lo) == f.evaluate(w.hi):
            same.append(n)
    report.add(
        "ramps.lateral_values",
        "generators change sign across each window at an interior anchor",
        not same,
        level=top,
        measured={"equal_sides": same},
        detail=(
            "each window holds an up-plateau-down bump, so both sides read -1; "
            "oscillation 2 inside the window is unaffected"
        ),
        on_failure=DISCREPANCY,
    )
    return report


def verify_constancy(
    gens: GeneratorSet,
    points: Sequence[Fraction] = CONSTANCY_POINTS,
    eps_grid: Sequence[Fraction] = CONSTANCY_EPS,
) -> VerificationReport:
    report = VerificationReport("constancy", {"max_level": gens.max_level})
    for t in points:
        for eps in eps_grid:
            cert = constancy_radius(t, eps, gens)
            report.add(
                "constancy.away_from_M",
                f"all generators oscillate at most {eps} near {t}",
                cert.ok,
                measured=cert.to_json(),
            )
    return report


def verify_cantor(
    gens: GeneratorSet,
    depth: int = 6,
    radii_levels: Sequence[int] = (6, 8, 10),
) -> tuple[VerificationReport, SpectrumReport]:
    """Branch-point probes across one level of the tree plus the M scan."""
    from .lattice import words

    radii = [gens.params.ell(k) for k in radii_levels]
    report = VerificationReport(
        "cantor", {"depth": depth, "radii": radii, "max_level": gens.max_level}
    )
    probes = [cantor_probe(w, radii, gens, "branch") for w in words(depth)]
    worst = min(e.oscillation for p in probes for e in p.evidence)
    report.add(
        "spectrum.cantor_persistence",
        f"oscillation 2 at every branch point below level {depth} and every radius",
        worst == TWO,
        measured={"probes": len(probes), "min_oscillation": worst},
    )
    m_points = [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)]
    spectrum = scan(m_points, [Fraction(1, 10)], gens, extra=probes)
    report.add(
        SPECTRUM_CLAIM,
        "no point outside M keeps oscillation 2 at every tested radius",
        not spectrum.discrepancies,
        measured={"discrepancies": len(spectrum.discrepancies)},
        detail="finite-scale evidence only; recorded, not resolved",
        on_failure=DISCREPANCY,
    )
    return report, spectrum
