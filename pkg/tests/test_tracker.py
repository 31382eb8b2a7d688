"""Homotopy continuation: solve_all oracles, path accounting, reconstruction."""

import cmath
import math
import random
from fractions import Fraction

from cubicdefect.forms import parse_form
from cubicdefect.tracker import (
    Homotopy,
    Poly,
    PolySystem,
    TrackerSettings,
    rational_reconstruct,
    solve_all,
    total_degree_start,
    track,
)


def poly(nvars, d):
    return Poly.from_dict(nvars, d)


def test_solve_all_two_circles():
    # {x^2 - 1, y^2 - 4}: four simple solutions (+-1, +-2)
    sysm = PolySystem([
        poly(2, {(2, 0): 1, (0, 0): -1}),
        poly(2, {(0, 2): 1, (0, 0): -4}),
    ])
    sols, failures = solve_all(sysm, seed=0)
    assert failures == 0
    assert len(sols) == 4
    assert all(s.multiplicity == 1 and s.residual < 1e-8 for s in sols)
    got = sorted((round(s.point[0].real), round(s.point[1].real))
                 for s in sols)
    assert got == [(-1, -2), (-1, 2), (1, -2), (1, 2)]


def test_solve_all_double_root():
    sols, _ = solve_all(PolySystem([poly(1, {(2,): 1})]), seed=0)
    assert len(sols) == 1
    assert sols[0].multiplicity == 2
    assert sols[0].singular
    assert abs(sols[0].point[0]) < 1e-4


def test_solve_all_sqrt2():
    sols, _ = solve_all(PolySystem([poly(1, {(2,): 1, (0,): -2})]), seed=1)
    vals = sorted(s.point[0].real for s in sols)
    assert abs(vals[0] + math.sqrt(2)) < 1e-10
    assert abs(vals[1] - math.sqrt(2)) < 1e-10


def random_system(rng, n, dmax=3):
    eqs = []
    for _ in range(n):
        d = rng.randint(1, dmax)
        exps = [(0,) * n]
        for _ in range(d):
            exps = [e[:i] + (e[i] + 1,) + e[i + 1:]
                    for e in exps for i in range(n)] + exps
        terms = {}
        for e in set(exps):
            terms[e] = complex(rng.gauss(0, 1), rng.gauss(0, 1))
        eqs.append(poly(n, terms))
    return PolySystem(eqs)


def test_bezout_accounting_property():
    # every total-degree path ends finite or diverges; none may fail.
    # (50 random dense systems; dense generic systems have exactly the
    # Bezout number of simple finite solutions)
    rng = random.Random(7)
    settings = TrackerSettings()
    for _ in range(50):
        n = rng.randint(1, 3)
        sysm = random_system(rng, n)
        bezout = 1
        for d in sysm.degrees():
            bezout *= d
        start, starts = total_degree_start(sysm)
        gamma = cmath.exp(2j * math.pi * rng.random())
        h = Homotopy(start, sysm, gamma)
        finite = diverged = failed = 0
        for s0 in starts:
            r = track(h, s0, settings)
            if r.status in ("converged", "singular"):
                finite += 1
            elif r.status == "diverged":
                diverged += 1
            else:
                failed += 1
        assert failed == 0
        assert finite + diverged == bezout


def test_converged_residuals():
    rng = random.Random(11)
    for _ in range(5):
        sysm = random_system(rng, 2)
        sols, failures = solve_all(sysm, seed=rng.randrange(2 ** 30))
        assert failures == 0
        for s in sols:
            if not s.singular:
                assert s.residual < 1e-8


def test_rational_reconstruct():
    assert rational_reconstruct([0.9999999999, 2.0000000001], 100) == \
        [Fraction(1), Fraction(2)]
    assert rational_reconstruct([0.70710678, 1.0], 10) is None


def test_rational_reconstruct_verifies_on_system():
    f = parse_form("x0^2 - 2*x1^2", nvars=2)
    # sqrt(2) is not rational: reconstruction against the system must fail
    assert rational_reconstruct([1.41421356237, 1.0], 10 ** 6,
                                system=[f]) is None
    g = parse_form("x0 - 2*x1", nvars=2)
    assert rational_reconstruct([2.0000000001, 1.0], 10 ** 6,
                                system=[g]) == [Fraction(2), Fraction(1)]
