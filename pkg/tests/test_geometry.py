"""Plane/scroll detection, conic bundles, good and very good lines."""

import random

import pytest

from cubicdefect.defect import compute_defect
from cubicdefect.fixtures import (
    ALL_NAMED,
    EXPECTED_SIGMA,
    F1,
    F2,
    FERMAT,
    RANK1_FIBER,
    SIGMA2,
)
from cubicdefect.forms import parse_form
from cubicdefect.geometry import (
    LineError,
    conic_bundle,
    good_line_test,
    line_in_cubic,
    line_meets_singular,
    sample_good_lines,
    surfaces_from_record,
    very_good_test,
)
from cubicdefect.tracker import TrackerSettings, solve_projective

# per-fixture surface oracle: (plane, scroll, pattern)
EXPECTED_SURFACES = {
    "f1": ("no", "no",
           "two irreducible plane cubics (forced by the rank-2 quadric)"),
    "f2": ("yes", "undetermined", "line component of C_q"),
    "segre": ("yes", "undetermined", "line component of C_q"),
    "one_node": ("no", "no", "irreducible C_q"),
    "corank1": ("no", "no", "irreducible C_q"),
    "sigma2": ("yes", "undetermined", "line component of C_q"),
    "determinantal": ("no", "yes", "two twisted cubics spanning P^3"),
}

# a cubic containing the line {x2 = x3 = x4 = 0} whose (A, B, C) pencil is
# degenerate (A = x2, B = x3, C = x2 + x3) while the line misses Sing(X)
DEGENERATE_PENCIL = parse_form(
    "x0^2*x2 + x0*x1*x3 + x1^2*x2 + x1^2*x3"
    " + x2^3 + x3^3 + x4^3 + x2*x3*x4")

L0 = [1, 0, 0, 0, 0]
L1 = [0, 1, 0, 0, 0]


# -- plane / scroll detection ---------------------------------------------------

def test_surface_verdicts():
    for name, (plane, scroll, pattern) in EXPECTED_SURFACES.items():
        report = compute_defect(ALL_NAMED[name], seed=0, recompute_all=False)
        v = surfaces_from_record(report.primary, sigma=report.sigma, seed=0)
        assert v.contains_plane == plane, name
        assert v.contains_scroll == scroll, name
        assert v.pattern == pattern, name
        # the theorem: a plane or scroll is present exactly when sigma > 0
        assert v.fired == (EXPECTED_SIGMA[name] > 0), name
        assert v.sigma_consistent, name


# -- lines and conic bundles ----------------------------------------------------

def test_line_predicates():
    p0 = [1, -1, 0, 0, 0]
    p1 = [0, 0, 1, -1, 0]
    assert line_in_cubic(FERMAT, p0, p1)
    assert not line_in_cubic(FERMAT, p0, [0, 0, 1, 0, 0])
    assert not line_meets_singular(FERMAT, p0, p1)
    # every line through the cone vertex hits the singular locus
    assert line_meets_singular(ALL_NAMED["cone"], [0, 0, 0, 0, 1],
                               [1, -1, 0, 0, 0])


def test_fermat_conic_bundle():
    cb = conic_bundle(FERMAT, [1, -1, 0, 0, 0], [0, 0, 1, -1, 0])
    assert cb.exact
    assert cb.discriminant.degree == 5
    # det of the conic matrix agrees with the discriminant form pointwise
    rng = random.Random(0)
    for _ in range(20):
        y = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)]
        det = (cb.M[0][0].evaluate(y)
               * (cb.M[1][1].evaluate(y) * cb.M[2][2].evaluate(y)
                  - cb.M[1][2].evaluate(y) * cb.M[2][1].evaluate(y))
               - cb.M[0][1].evaluate(y)
               * (cb.M[1][0].evaluate(y) * cb.M[2][2].evaluate(y)
                  - cb.M[1][2].evaluate(y) * cb.M[2][0].evaluate(y))
               + cb.M[0][2].evaluate(y)
               * (cb.M[1][0].evaluate(y) * cb.M[2][1].evaluate(y)
                  - cb.M[1][1].evaluate(y) * cb.M[2][0].evaluate(y)))
        want = cb.discriminant.evaluate(y)
        assert abs(det - want) < 1e-8 * max(1.0, abs(want))


def test_conic_bundle_rejects_bad_lines():
    with pytest.raises(LineError):
        conic_bundle(FERMAT, [1, -1, 0, 0, 0], [0, 0, 1, 0, 0])
    with pytest.raises(LineError):
        conic_bundle(F2, L0, [0, 0, 0, 1, 0])  # not contained in X


# -- good lines -------------------------------------------------------------------

def test_fermat_line_not_good():
    # the plane through l and e4 cuts Fermat in the triple line 3l, so a
    # fiber conic contains l (B vanishes identically)
    cb = conic_bundle(FERMAT, [1, -1, 0, 0, 0], [0, 0, 1, -1, 0])
    rep = good_line_test(cb, seed=0)
    assert rep.good == "no"
    assert "degenerate" in rep.reason


def test_degenerate_pencil_not_good():
    cb = conic_bundle(DEGENERATE_PENCIL, L0, L1)
    rep = good_line_test(cb, seed=0)
    assert rep.good == "no"
    assert "degenerate" in rep.reason


def test_rank1_fiber_not_good():
    cb = conic_bundle(RANK1_FIBER, L0, L1)
    rep = good_line_test(cb, seed=0)
    assert rep.good == "no"
    assert "rank-1" in rep.reason
    # the witness degeneration point is the designed fiber y = (1, 0, 0)
    y = rep.witness_y
    assert abs(y[0]) > 0.9
    assert abs(y[1]) < 1e-6 and abs(y[2]) < 1e-6


def test_sample_good_lines_f2():
    lines = sample_good_lines(F2, 2, seed=0)
    assert len(lines) == 2
    for x0, v, cb, rep in lines:
        assert rep.good == "yes"
        assert line_in_cubic(F2, x0, v)
        assert not line_meets_singular(F2, x0, v)


def test_discriminant_singularities_count_f2():
    # Sing(D_l) for a good line is in bijection with Sing(X): 3 points on F2
    lines = sample_good_lines(F2, 1, seed=0)
    cb = lines[0][2]
    sols = solve_projective(cb.discriminant.gradient(), TrackerSettings(),
                            seed=0, npatches=2, randomize_to=2)
    assert len(sols) == 3


# -- very good lines ---------------------------------------------------------------

def test_f1_line_very_good():
    # sigma = 0: D_l irreducible and the double cover connected
    lines = sample_good_lines(F1, 1, seed=0)
    verdict = very_good_test(lines[0][2], seed=0)
    assert verdict.good == "yes"
    assert verdict.irreducible == "yes"
    assert verdict.cover_connected == "yes"
    assert verdict.very_good
    assert verdict.components == 1


def test_sigma2_line_not_very_good():
    # sigma > 0: no very good line; D_l splits, certified
    lines = sample_good_lines(SIGMA2, 1, seed=0)
    verdict = very_good_test(lines[0][2], seed=0)
    assert verdict.good == "yes"
    assert verdict.irreducible == "no"
    assert not verdict.very_good
    assert verdict.components == 2
