"""Defect sigma(X) and Hodge-Du Bois numbers on the fixture corpus."""

import pytest

from cubicdefect.defect import (
    DegenerateConeError,
    SmoothCubicError,
    compute_defect,
    hodge_numbers,
)
from cubicdefect.fixtures import (
    ALL_NAMED,
    CONE,
    EXPECTED_SIGMA,
    F1,
    F2,
    FERMAT,
)
from cubicdefect.forms import parse_form
from cubicdefect.singular import analyze_singularities

# (mu_tot, h3, h12, h21) frozen per fixture; None marks an incomplete report
EXPECTED_HODGE = {
    "f1": (6, 4, 4, 0),
    "f2": (6, 5, 4, 1),
    "segre": (10, 5, 5, 0),
    "cone": (16, 0, None, None),
    "one_node": (1, 9, 5, 4),
    "corank1": (2, 8, 4, 4),
}


def test_expected_sigma():
    for name, sigma in EXPECTED_SIGMA.items():
        report = compute_defect(ALL_NAMED[name], seed=0, recompute_all=False)
        assert report.sigma == sigma, name
        assert report.cone == (name == "cone"), name


def test_cone_short_circuit():
    report = compute_defect(CONE, seed=0)
    assert report.sigma == 6
    assert report.cone
    assert report.certification == "exact"
    assert report.primary is None
    assert report.cone_detail == "cone over a smooth cubic surface"


def test_f2_recomputations_agree():
    report = compute_defect(F2, seed=0)
    assert report.sigma == 1
    # recomputed from the two other rational singular points
    assert len(report.recomputations) == 2
    assert all(r.sigma == 1 for r in report.recomputations)
    assert report.primary.corank == 2
    assert report.primary.certified


def test_f2_primary_from_highest_corank():
    report = compute_defect(F2, seed=0, recompute_all=False)
    # the D4 point wins over the two nodes, so the corank-2 branch applies
    assert report.corank == 2
    assert report.k == 3
    assert report.sigma == report.k - 2


def test_sigma_seed_independent():
    for seed in (0, 17, 99):
        report = compute_defect(F2, seed=seed, recompute_all=False)
        assert report.sigma == 1


def test_smooth_cubic_raises():
    with pytest.raises(SmoothCubicError):
        compute_defect(FERMAT, seed=0)


def test_degenerate_cone_raises():
    with pytest.raises(DegenerateConeError):
        compute_defect(parse_form("x0^3 + x1^3 + x2^3"), seed=0)


# -- Hodge-Du Bois numbers -----------------------------------------------------

def test_hodge_smooth():
    report = hodge_numbers([], None)
    assert (report.mu_tot, report.h3) == (0, 10)
    assert report.complete
    assert (report.h12, report.h21) == (5, 5)


def test_hodge_fixtures():
    for name, (mu_tot, h3, h12, h21) in EXPECTED_HODGE.items():
        f = ALL_NAMED[name]
        points = analyze_singularities(f, seed=0)
        sigma = EXPECTED_SIGMA[name]
        report = hodge_numbers(points, sigma)
        assert report.mu_tot == mu_tot, name
        assert report.h3 == h3, name
        if h12 is None:
            assert not report.complete, name
        else:
            assert report.complete, name
            assert report.h12 == h12, name
            assert report.h21 == h21, name
            assert report.h12 + report.h21 == report.h3, name


def test_hodge_f1_values():
    points = analyze_singularities(F1, seed=0)
    report = hodge_numbers(points, 0)
    assert (report.B, report.L) == (1, 4)
    assert (report.h3, report.h12, report.h21) == (4, 4, 0)
