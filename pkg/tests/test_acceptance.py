"""Acceptance gate: seven end-to-end criteria with stated tolerances and
runtime budgets.  Each criterion prints a single PASS/FAIL line (visible
with ``pytest -s`` and in failure reports) and then asserts."""

import random
import time
from fractions import Fraction

from cubicdefect.defect import compute_defect, hodge_numbers
from cubicdefect.fixtures import (
    ALL_NAMED,
    CONE,
    EXPECTED_SIGMA,
    F1,
    F2,
    FERMAT,
    SEGRE,
    SIGMA2,
)
from cubicdefect.forms import Form, LinearChange, substitute
from cubicdefect.geometry import (
    sample_good_lines,
    surfaces_from_record,
    very_good_test,
)
from cubicdefect.singular import (
    analyze_singularities,
    local_invariants,
    project,
)
from cubicdefect.tracker import solve_all
from cubicdefect.witness import monodromy_partition, witness_points

from test_forms import random_cubic
from test_tracker import random_system


def report(num, ok, elapsed, detail):
    line = "criterion %d: %s (%.1fs) -- %s" % (
        num, "PASS" if ok else "FAIL", elapsed, detail)
    print(line)
    assert ok, line


def test_criterion_1_defects_f1_f2():
    # sigma(f1) = 0 and sigma(f2) = 1, certified, with f2 recomputed from
    # its other rational singular points in agreement; < 30 s per cubic
    t0 = time.monotonic()
    r1 = compute_defect(F1, seed=0)
    t1 = time.monotonic() - t0
    t0 = time.monotonic()
    r2 = compute_defect(F2, seed=0)
    t2 = time.monotonic() - t0
    ok = (r1.sigma == 0 and r1.primary.certified
          and r2.sigma == 1 and r2.primary.certified
          and len(r2.recomputations) >= 2
          and all(r.sigma == 1 for r in r2.recomputations)
          and t1 < 30 and t2 < 30)
    report(1, ok, t1 + t2,
           "f1 sigma=%d (%.1fs), f2 sigma=%d from %d points (%.1fs)"
           % (r1.sigma, t1, r2.sigma, 1 + len(r2.recomputations), t2))


def test_criterion_2_segre():
    # the Segre cubic: 10 A1 nodes, k = 6 from every node, sigma = 5; < 2 min
    t0 = time.monotonic()
    points = analyze_singularities(SEGRE, seed=0)
    r = compute_defect(SEGRE, seed=0, points=points)
    dt = time.monotonic() - t0
    ok = (len(points) == 10
          and all(p.label == "A1" and p.milnor == 1 for p in points)
          and r.sigma == 5 and r.k == 6
          and all(rec.k == 6 for rec in [r.primary] + r.recomputations)
          and dt < 120)
    report(2, ok, dt, "%d nodes, k=%s, sigma=%d"
           % (len(points), r.k, r.sigma))


def test_criterion_3_cone():
    # the cone fixture: flagged as a cone, sigma = 6, vertex mu = 16,
    # h3 = 0; < 1 min
    t0 = time.monotonic()
    points = analyze_singularities(CONE, seed=0)
    r = compute_defect(CONE, seed=0)
    h = hodge_numbers(points, r.sigma)
    dt = time.monotonic() - t0
    ok = (r.cone and r.sigma == 6
          and len(points) == 1 and points[0].milnor == 16
          and points[0].label == "cone vertex"
          and h.h3 == 0 and dt < 60)
    report(3, ok, dt, "cone=%s sigma=%d mu=%d h3=%d"
           % (r.cone, r.sigma, points[0].milnor, h.h3))


def test_criterion_4_fermat_smooth():
    # the Fermat cubic is smooth: h3 = 10, h12 = h21 = 5; < 30 s
    t0 = time.monotonic()
    points = analyze_singularities(FERMAT, seed=0)
    h = hodge_numbers(points, None)
    dt = time.monotonic() - t0
    ok = (points == [] and h.h3 == 10 and h.h12 == 5 and h.h21 == 5
          and dt < 30)
    report(4, ok, dt, "%d singular points, h3=%d h12=%d h21=%d"
           % (len(points), h.h3, h.h12, h.h21))


def test_criterion_5_surface_equivalence():
    # a plane or rational normal scroll is detected exactly when sigma > 0,
    # across all non-cone singular fixtures; zero tolerance on the verdicts
    t0 = time.monotonic()
    rows = []
    ok = True
    for name, sigma in EXPECTED_SIGMA.items():
        if name == "cone":
            continue
        r = compute_defect(ALL_NAMED[name], seed=0, recompute_all=False)
        v = surfaces_from_record(r.primary, sigma=r.sigma, seed=0)
        good = (r.sigma == sigma and v.fired == (sigma > 0)
                and v.sigma_consistent)
        ok = ok and good
        rows.append("%s:%s" % (name, "ok" if good else "BAD"))
    dt = time.monotonic() - t0
    report(5, ok, dt, ", ".join(rows))


def test_criterion_6_very_good_lines():
    # sigma = 0 (f1): a very good line among at most 10 sampled good lines,
    # with both checks certified; sigma > 0 (f2, sigma2): no sampled good
    # line is very good, probabilistic flags allowed on this negative side
    t0 = time.monotonic()
    found = False
    for x0, v, cb, rep in sample_good_lines(F1, 10, seed=0):
        verdict = very_good_test(cb, seed=0)
        if verdict.very_good:
            found = ("probabilistic" not in verdict.irreducible
                     and verdict.cover_connected == "yes")
            break
    negatives_ok = True
    for f in (F2, SIGMA2):
        for x0, v, cb, rep in sample_good_lines(f, 3, seed=0):
            verdict = very_good_test(cb, seed=0)
            negatives_ok = negatives_ok and not verdict.very_good
    dt = time.monotonic() - t0
    ok = found and negatives_ok
    report(6, ok, dt, "f1 very good line found=%s; f2/sigma2 negatives=%s"
           % (found, negatives_ok))


def test_criterion_7_property_suite():
    # structural properties re-run end to end; < 10 min total
    t0 = time.monotonic()
    failures = []

    # Euler identity on random cubics
    rng = random.Random(42)
    x = [Form.variable(i, 5) for i in range(5)]
    for _ in range(10):
        f = random_cubic(rng)
        total = Form.zero(5, 3)
        for xi, gi in zip(x, f.gradient()):
            total = total + xi * gi
        if total != f.scale(3):
            failures.append("euler")
            break

    # substitution round trip
    for _ in range(5):
        f = random_cubic(rng)
        M = [[Fraction(rng.randint(-3, 3)) for _ in range(5)]
             for _ in range(5)]
        for i in range(5):
            M[i][i] += 7
        T = LinearChange(M)
        if substitute(substitute(f, T), T.inverse()) != f:
            failures.append("substitution")
            break

    # Bezout path accounting via solve_all (multiplicities count)
    for _ in range(10):
        sysm = random_system(rng, 2)
        bezout = 1
        for d in sysm.degrees():
            bezout *= d
        sols, fails = solve_all(sysm, seed=rng.randrange(2 ** 30))
        if fails != 0 or sum(s.multiplicity for s in sols) > bezout:
            failures.append("bezout")
            break

    # witness degrees of C_q sum to 6
    g2, g3 = project(F2, [0, 1, 0, 0, 0])
    w = witness_points([g2, g3], seed=1)
    part = monodromy_partition(w, seed=2)
    if sum(part.degrees) != 6:
        failures.append("witness-degree")

    # sigma seed independence
    if any(compute_defect(F2, seed=s, recompute_all=False).sigma != 1
           for s in (1, 23)):
        failures.append("seed-independence")

    # local invariants: 2*b11 + l11 = mu, and the A1/A2 spectra
    for label, mu in [("A1", 1), ("A2", 2), ("A3", 3), ("D4", 4),
                      ("D5", 5), ("E6", 6), ("Q10", 10), ("T333", 8)]:
        b11, l11 = local_invariants(label, mu)
        if 2 * b11 + l11 != mu:
            failures.append("invariants")
            break
    if local_invariants("A1", 1) != (0, 1) or \
            local_invariants("A2", 2) != (1, 0):
        failures.append("spectrum")

    dt = time.monotonic() - t0
    ok = not failures and dt < 600
    report(7, ok, dt, "failures: %s" % (failures or "none"))
