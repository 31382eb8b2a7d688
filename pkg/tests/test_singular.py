"""Singular point location, corank, Milnor numbers, type labels, spectra."""

import random
from fractions import Fraction

import pytest

from cubicdefect.fixtures import CONE, F1, F2, FERMAT, SEGRE
from cubicdefect.forms import LinearChange, parse_form, substitute
from cubicdefect.singular import (
    SingularityError,
    analyze_singularities,
    classify,
    corank,
    find_singular_points,
    local_invariants,
    milnor_number,
    project,
)

Q_LAST = [0, 0, 0, 0, 1]

# local models realized as cubic threefolds with the singularity at
# [0:0:0:0:1]; each was cross-checked against its normal form
LOCAL_MODELS = [
    # (form text, corank, mu, label)
    ("x0^2*x4 + x1^2*x4 + x2^2*x4 + x0^3 + x1^3 + x2^3 + x3^3",
     1, 2, "A2"),
    ("x0^2*x4 + x1^2*x4 + x2^2*x4 + x0*x3^2 + x1^3 + x2^3",
     1, 3, "A3"),
    ("x0^2*x4 + x1^2*x4 + x2^3 + x3^3 + x0^3 + x1^3",
     2, 4, "D4"),
    ("x0^2*x4 + x1^2*x4 + x2^2*x3 + x0*x3^2 + x0^3 + x1^3",
     2, 5, "D5"),
    ("x0^2*x4 + x1^2*x4 + x2^3 + x0*x3^2 + x0^3 + x1^3",
     2, 6, "E6"),
    ("x0^2*x4 + x1^3 + x2^3 + x3^3 + x1*x2*x3",
     3, 8, "T333"),
    ("x0^2*x4 + x1^3 + x2^2*x3 + x0*x3^2",
     3, 10, "Q10|T344"),
    ("x0^2*x4 + x1^3 + x2^3 + x0*x3^2",
     3, 12, "U12"),
]


# -- locating singular points -------------------------------------------------

def test_fermat_is_smooth():
    assert find_singular_points(FERMAT, seed=0) == []


def test_f2_singular_points():
    pts = find_singular_points(F2, seed=0)
    assert len(pts) == 3
    assert all(p.exact for p in pts)
    locs = [[Fraction(c) for c in p.location] for p in pts]
    assert [1, 0, 0, 0, 0] in locs
    assert [0, 1, 0, 0, 0] in locs


def test_segre_ten_nodes():
    pts = find_singular_points(SEGRE, seed=0)
    assert len(pts) == 10
    assert all(p.exact and p.multiplicity == 1 for p in pts)


# -- corank and Milnor number -------------------------------------------------

def test_corank_examples():
    assert corank(F2, [0, 1, 0, 0, 0]) == 0
    assert corank(F2, [1, 0, 0, 0, 0]) == 2
    f = parse_form("x0^2*x4 + x1^2*x4 + x2^2*x4 + x3^3 + x0^3 + x1^3 + x2^3")
    assert corank(f, Q_LAST) == 1


def test_corank_rejects_nonsingular_point():
    with pytest.raises(SingularityError):
        corank(F2, [0, 0, 1, 0, 0])


def test_corank_invariant_under_coordinate_change():
    rng = random.Random(5)
    for _ in range(5):
        M = [[Fraction(rng.randint(-3, 3)) for _ in range(5)]
             for _ in range(5)]
        for i in range(5):
            M[i][i] += 7
        T = LinearChange(M)
        g = substitute(F2, T)
        Tinv = T.inverse()
        # the D4 point [1:0:0:0:0] of F2 moves to T^{-1} e0
        q = [Tinv.matrix[i][0] for i in range(5)]
        assert corank(g, q) == 2


def test_milnor_examples():
    assert milnor_number(F2, [0, 1, 0, 0, 0]) == 1       # A1
    assert milnor_number(F1, [1, 0, 0, 0, 0]) == 4       # D4
    assert milnor_number(CONE, Q_LAST) == 16             # cone vertex


def test_local_models():
    for text, crk, mu, label in LOCAL_MODELS:
        f = parse_form(text)
        assert corank(f, Q_LAST) == crk, text
        assert milnor_number(f, Q_LAST) == mu, text
        assert classify(f, Q_LAST, crk, mu) == label, text


def test_classify_corank3_table():
    f = parse_form(LOCAL_MODELS[6][0])    # the mu = 10 model
    assert classify(f, Q_LAST, 3, 10, cq_irreducible=True) == "Q10"
    assert classify(f, Q_LAST, 3, 10, cq_irreducible=False) == "T344"
    assert classify(f, Q_LAST, 3, 9) == "T334"
    assert classify(f, Q_LAST, 3, 11) == "S11|T444"


def test_corank0_iff_mu1():
    # a corank-0 (node) singularity has mu = 1 and conversely
    assert classify(F2, [0, 1, 0, 0, 0], 0, 1) == "A1"
    with pytest.raises(SingularityError):
        classify(F2, [0, 1, 0, 0, 0], 0, 2)


# -- spectra and local invariants ----------------------------------------------

def test_local_invariants_examples():
    assert local_invariants("A1", 1) == (0, 1)
    assert local_invariants("A2", 2) == (1, 0)
    assert local_invariants("D4", 4) == (1, 2)


def test_local_invariants_identity():
    cases = [("A%d" % n, n) for n in range(1, 9)]
    cases += [("D%d" % n, n) for n in range(4, 9)]
    cases += [("E6", 6), ("E7", 7), ("E8", 8),
              ("Q10", 10), ("S11", 11), ("U12", 12), ("T333", 8)]
    for label, mu in cases:
        b11, l11 = local_invariants(label, mu)
        assert b11 is not None and l11 is not None, label
        assert 2 * b11 + l11 == mu, label


def test_local_invariants_unknown_label():
    assert local_invariants("T344", 10) == (None, None)


# -- full analysis -------------------------------------------------------------

def test_analyze_f1():
    pts = analyze_singularities(F1, seed=0)
    labels = sorted(p.label for p in pts)
    assert labels == ["A1", "A1", "D4"]
    assert sum(p.milnor for p in pts) == 6
    assert all(p.b11 is not None for p in pts)


def test_analyze_cone_vertex():
    pts = analyze_singularities(CONE, seed=0)
    assert len(pts) == 1
    p = pts[0]
    assert p.corank == 4
    assert p.milnor == 16
    assert p.label == "cone vertex"


def test_project_shape():
    g2, g3 = project(F2, [0, 1, 0, 0, 0])
    assert g2.nvars == 4 and g2.degree == 2
    assert g3.nvars == 4 and g3.degree == 3
    with pytest.raises(SingularityError):
        project(F2, [0, 0, 1, 0, 0])
