"""Acceptance criteria at desk scale: c = 1/4, max_level = 12, exact equality.

Each test prints one ``criterion N: PASS|FAIL`` line; the lines are
repeated in the terminal summary. Run this file directly to get just the
lines.
"""
import bisect
import json
import random
import sys
import time
from fractions import Fraction as F

import pytest

from oscspec.arith import Interval
from oscspec.generators import GeneratorSet, PiecewiseLinear, oscillation, sup_norm, verify_generators
from oscspec.lattice import BlockTree, ScaleParams, anchor, build_tree, delta_min, verify_geometry, words
from oscspec.spectrum import (
    SPECTRUM_CLAIM,
    cantor_probe,
    constancy_radius,
    gamma_lower,
    ramp_level,
    scan,
)
from oscspec.subspace import random_vectors, verify_isometry

P = ScaleParams()
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, what: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {what}"
    RESULTS[n] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def gens12():
    return GeneratorSet.build(12)


def test_criterion_1_geometry():
    start = time.perf_counter()
    tree = build_tree(12)
    rep = verify_geometry(tree)
    elapsed = time.perf_counter() - start
    counts = all(len(tree.spans(m)) == 2**m for m in range(1, 13))
    eta_ok = all(P.eta(m) <= delta_min(m) for m in range(1, 13))
    budget = all(
        2 * P.ell(m + 1) + P.delta(m + 1) + 2 * P.theta(m) == P.ell(m) for m in range(1, 12)
    )
    closed_form = rep.by_anchor("geometry.delta_closed_form")
    flagged = bool(closed_form) and all(c.status == "discrepancy" for c in closed_form)
    ok = rep.passed and counts and eta_ok and budget and flagged and elapsed < 10
    record(1, ok, f"geometry suite exact, closed-form gap flagged, {elapsed:.2f} s")


def test_criterion_2_generators(gens12):
    rep = verify_generators(gens12, sign_depth=8)
    aligned = rep.by_anchor("generators.sign_alignment")
    ok = rep.passed and len(aligned) == 8 and all(c.status == "pass" for c in aligned)
    record(2, ok, f"{rep.summary()['pass']} generator checks, sign alignment to depth 8")


def test_criterion_3_isometry(gens12):
    start = time.perf_counter()
    rep = verify_isometry(gens12, count=200, seed=0, max_support=10)
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 60
    record(3, ok, f"200 seeded vectors, exact norm and witness, {elapsed:.2f} s")


def test_criterion_4_ramps(gens12):
    bad = []
    for n in range(0, 9):
        for d in (F(1, 10), F(1, 100), F(1, 1000)):
            k = ramp_level(n, d)
            if n == 0:
                fits = anchor(k) + P.eta(k) / 2 <= d
                minimal = k == 2 or anchor(k - 1) + P.eta(k - 1) / 2 > d
                if not (fits and minimal):
                    bad.append((n, d, "ramp_level"))
            levels = 12 if k <= 12 else k
            if gamma_lower(anchor(n), d, gens12.with_max_level(levels)) != 2:
                bad.append((n, d, levels))
    record(4, not bad, f"oscillation 2 at t_0..t_8 for three radii; failures {bad}")


def test_criterion_5_constancy(gens12):
    bad = []
    for t in (F(7, 10), F(9, 100), F(2, 5) + F(1, 1000)):
        for eps in (F(1, 10), F(1, 100)):
            c = constancy_radius(t, eps, gens12)
            if not (c.d > 0 and c.sup_osc <= eps and c.tail_covered):
                bad.append((t, eps))
    record(5, not bad, f"six constancy certificates; failures {bad}")


def test_criterion_6_midpoint_probes(gens12):
    radii = [P.ell(6), P.ell(8), P.ell(10)]
    probes = [cantor_probe(w, radii, gens12) for w in words(6)]
    seen = sorted({e.oscillation for p in probes for e in p.evidence})
    all_two = seen == [F(2)]
    report = scan([F(1, 2)], [F(1, 10)], gens12, extra=probes)
    flagged = bool(report.discrepancies) and all(
        d["anchor"] == SPECTRUM_CLAIM for d in report.discrepancies
    )
    record(
        6,
        all_two and flagged,
        f"64 level-6 midpoints, radii ell_6/8/10: oscillations seen {[str(s) for s in seen]}, "
        f"discrepancies listed {flagged}",
    )


def test_criterion_6_branch_points(gens12):
    # companion reading: probe the branch point of each level-6 block instead of its midpoint
    radii = [P.ell(6), P.ell(8), P.ell(10)]
    probes = [cantor_probe(w, radii, gens12, "branch") for w in words(6)]
    ok = all(e.oscillation == 2 for p in probes for e in p.evidence)
    report = scan([F(1, 2)], [F(1, 10)], gens12, extra=probes)
    ok &= len(report.discrepancies) == 64
    print(f"criterion 6 (branch points): {'PASS' if ok else 'FAIL'}")
    assert ok


def test_criterion_7_oracle(gens12):
    rng = random.Random(7)
    grid = [F(j, 10**5) for j in range(10**5 + 1)]
    # every combination of phi_1..phi_10 has its breakpoints on this grid
    merged = sorted(set(grid).union(gens12.table(10)[0]))
    bad = 0
    for a in random_vectors(2024, 20, 10):
        f = gens12.combine(a.entries)
        exact = sup_norm(f)
        on_grid = max(abs(v) for v in f.values_at(grid))
        values = f.values_at(merged)
        augmented = max(abs(v) for v in values)
        bad += not (on_grid <= exact and augmented == exact == a.l1)
        # oscillation on a window near B and one elsewhere
        for lo in (1 - F(rng.randint(1, 2**20), 2**28), F(rng.randint(0, 10**4), 10**4)):
            hi = min(F(1), lo + F(rng.randint(1, 2**14), 2**28))
            i, j = bisect.bisect_left(merged, lo), bisect.bisect_right(merged, hi)
            vals = [f(lo), f(hi), *values[i:j]]
            bad += oscillation(f, Interval.closed(lo, hi)) != max(vals) - min(vals)
    record(7, bad == 0, f"20 combinations against a 10^5-point grid; mismatches {bad}")


def test_criterion_8_round_trip(gens12):
    gens12.functions
    blob = json.dumps({"tree": gens12.tree.to_json(), "generators": gens12.to_json()})
    data = json.loads(blob)
    tree = BlockTree.from_json(data["tree"])
    loaded = GeneratorSet.from_json(data["generators"], tree)
    ok = tree == gens12.tree and loaded.functions == gens12.functions
    ok &= all(isinstance(f, PiecewiseLinear) for f in loaded.functions)
    record(8, ok, f"tree and 12 generators identical after JSON ({len(blob)} bytes)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
