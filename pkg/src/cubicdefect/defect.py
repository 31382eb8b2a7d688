"""Defect sigma(X) and Hodge-Du Bois numbers of a cubic threefold.

sigma is read off the component count k of the projection curve C_q from a
singular point q: sigma = k - 1 when corank(q) != 2 and k - 2 when
corank(q) = 2.  The value is independent of q, which is asserted by
recomputing from every rational singular point.  Cones over smooth cubic
surfaces short-circuit to sigma = 6.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .forms import (
    Form,
    cone_test,
    point_to_last_coordinate,
    substitute,
)
from .singular import (
    SingularityError,
    corank as corank_exact,
    find_singular_points,
    project,
)
from .tracker import TrackerSettings, solve_projective
from .witness import (
    QuadricClass,
    curve_components,
    detect_nonreduced,
)


class DefectError(RuntimeError):
    pass


class SmoothCubicError(DefectError):
    """The cubic has no singular points: sigma is undefined (X is smooth)."""


class DegenerateConeError(DefectError):
    """Cone whose vertex dimension exceeds 0 or whose base cubic surface is
    singular: outside the scope of the defect formula."""


class DefectDisagreement(DefectError):
    """sigma recomputed from different projection points disagreed; this
    violates the projection-point independence of the defect."""


@dataclass
class ProjectionRecord:
    point: list
    exact: bool
    corank: int
    quadric: str
    nonreduced: bool
    k: int
    sigma: int
    block_degrees: list
    certified: bool
    # carried for downstream surface detection, not for serialization
    witness: object = field(default=None, repr=False)
    partition: object = field(default=None, repr=False)
    g2: object = field(default=None, repr=False)


@dataclass
class DefectReport:
    sigma: int
    cone: bool
    certification: str               # exact | numeric, uncertified
    primary: ProjectionRecord = None
    recomputations: list = field(default_factory=list)
    cone_detail: str = None
    seed: int = 0

    @property
    def k(self):
        return self.primary.k if self.primary else None

    @property
    def corank(self):
        return self.primary.corank if self.primary else None


@dataclass
class HodgeReport:
    mu_tot: int
    sigma: int
    h3: int
    complete: bool
    B: int = None
    L: int = None
    h12: int = None
    h21: int = None


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def cone_base(f, verdict):
    """For a cone with 0-dimensional vertex, the base cubic surface as a
    form in 4 variables (restriction to an exact complement of the vertex)."""
    vertex = verdict.vertex_basis[0]
    T = point_to_last_coordinate(vertex, f.nvars)
    g = substitute(f, T)
    base_terms = {}
    for e, c in g.terms.items():
        if e[-1] != 0:
            raise DefectError("cone vertex change left terms in the vertex "
                              "direction")
        base_terms[e[:-1]] = c
    return Form(f.nvars - 1, base_terms, degree=3)


def _is_smooth_projective(forms, settings, seed):
    """No projective common zero of the gradient system (numeric check)."""
    sols = solve_projective(forms, settings, seed=seed, npatches=2,
                            randomize_to=forms[0].nvars - 1)
    return len(sols) == 0


# ---------------------------------------------------------------------------
# sigma from one projection point
# ---------------------------------------------------------------------------

def _numeric_change_to_last(q):
    """Complex basis completion sending q to the last coordinate point."""
    n = len(q)
    piv = max(range(n), key=lambda i: abs(complex(q[i])))
    cols = [[complex(int(i == j)) for i in range(n)]
            for j in range(n) if j != piv]
    cols.append([complex(c) for c in q])
    # row-major matrix with the columns above
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _project_numeric(f, q):
    n = f.nvars
    M = _numeric_change_to_last(q)
    g = substitute(f, M)
    last = n - 1
    g2_terms, g3_terms = {}, {}
    scale = max(abs(complex(c)) for c in g.terms.values())
    for e, c in g.terms.items():
        if abs(complex(c)) < 1e-9 * scale:
            continue
        if e[last] == 0:
            g3_terms[e[:last]] = complex(c)
        elif e[last] == 1:
            g2_terms[e[:last]] = complex(c)
        else:
            raise SingularityError(
                "numeric projection point is not singular enough: "
                "|x%d^%d| coefficient %.2e" % (last, e[last], abs(complex(c))))
    return (Form(n - 1, g2_terms, degree=2),
            Form(n - 1, g3_terms, degree=3))


def _quadric_class_numeric(g2, tol=1e-8):
    n = g2.nvars
    M = np.zeros((n, n), dtype=complex)
    for e, c in g2.terms.items():
        idx = [i for i, ei in enumerate(e) if ei]
        if len(idx) == 1:
            M[idx[0], idx[0]] = complex(c)
        else:
            i, j = idx
            M[i, j] = M[j, i] = complex(c) / 2
    sv = np.linalg.svd(M, compute_uv=False)
    r = int(np.sum(sv > tol * sv[0]))
    labels = {1: "double plane", 2: "two distinct planes", 3: "quadric cone",
              4: "smooth quadric"}
    ell = None
    if r == 1:
        i = int(np.argmax(np.abs(np.diag(M))))
        ell = Form.linear([complex(M[i, j]) for j in range(n)])
    return QuadricClass(r, labels.get(r, "degenerate"), ell)


def sigma_from_point(f, sp, seed=0, settings=None, maxloops=50):
    """ProjectionRecord for one singular point: project, classify Q_q,
    decompose C_q (reduced curve for the double-plane case) and apply the
    defect formula branch for the corank."""
    settings = settings or TrackerSettings()
    if sp.exact:
        g2, g3 = project(f, sp.location)
        qc = detect_nonreduced(g2)
    else:
        g2, g3 = _project_numeric(f, sp.location)
        qc = _quadric_class_numeric(g2)
    crk = 4 - qc.rank
    if qc.nonreduced:
        equations = [qc.line_form, g3]
    else:
        equations = [g2, g3]
    w, part = curve_components(equations, seed=seed, maxloops=maxloops,
                               settings=settings)
    k = part.k
    sigma = k - 2 if crk == 2 else k - 1
    if not (0 <= sigma <= 6):
        raise DefectError("sigma = %d out of the admissible range" % sigma)
    return ProjectionRecord(
        point=sp.location, exact=sp.exact, corank=crk, quadric=qc.label,
        nonreduced=qc.nonreduced, k=k, sigma=sigma,
        block_degrees=part.degrees, certified=part.certified and sp.exact,
        witness=w, partition=part, g2=g2 if sp.exact else None)


# ---------------------------------------------------------------------------
# the defect
# ---------------------------------------------------------------------------

def compute_defect(f, seed=0, settings=None, points=None, recompute_all=True):
    """DefectReport for the cubic threefold V(f).

    Cones over a smooth cubic surface short-circuit to sigma = 6; otherwise
    the projection point of highest corank is used and the result is
    recomputed from every other rational singular point, with disagreement
    a hard error.
    """
    settings = settings or TrackerSettings()
    verdict = cone_test(f)
    if verdict.is_cone:
        if verdict.vertex_dim > 1:
            raise DegenerateConeError(
                "cone with vertex dimension %d: out of scope"
                % (verdict.vertex_dim - 1))
        base = cone_base(f, verdict)
        if not _is_smooth_projective(base.gradient(), settings, seed):
            raise DegenerateConeError(
                "cone over a singular cubic surface: out of scope")
        return DefectReport(sigma=6, cone=True, certification="exact",
                            cone_detail="cone over a smooth cubic surface",
                            seed=seed)
    if points is None:
        points = find_singular_points(f, seed=seed, settings=settings)
    if not points:
        raise SmoothCubicError("no singular points: sigma is undefined")
    exact_pts = [p for p in points if p.exact]
    for p in exact_pts:
        if p.corank is None:
            p.corank = corank_exact(f, p.location)
    if exact_pts:
        ordered = sorted(exact_pts, key=lambda p: (-p.corank,
                                                   p.location_key()))
        records = [sigma_from_point(f, ordered[0], seed=seed,
                                    settings=settings)]
        rest = ordered[1:] if recompute_all else []
        for i, p in enumerate(rest):
            records.append(sigma_from_point(f, p, seed=seed + 13 * (i + 1),
                                            settings=settings))
        sigmas = {r.sigma for r in records}
        if len(sigmas) != 1:
            raise DefectDisagreement(
                "sigma disagrees across projection points: %s"
                % sorted((str(r.point), r.sigma) for r in records))
        return DefectReport(sigma=records[0].sigma, cone=False,
                            certification="exact", primary=records[0],
                            recomputations=records[1:], seed=seed)
    # no rational singular point: numeric, uncertified
    record = sigma_from_point(f, points[0], seed=seed, settings=settings)
    return DefectReport(sigma=record.sigma, cone=False,
                        certification="numeric, uncertified",
                        primary=record, seed=seed)


# ---------------------------------------------------------------------------
# Hodge-Du Bois numbers
# ---------------------------------------------------------------------------

def hodge_numbers(points, sigma):
    """HodgeReport from the singular points and the defect.

    h3 = 10 - mu_tot + sigma always; h12 = 5 - B and h21 = 5 - (L - sigma) - B
    only when every point has known local invariants (B = sum b11,
    L = sum l11)."""
    if sigma is None:
        sigma = 0
    mu_tot = sum(p.milnor for p in points)
    h3 = 10 - mu_tot + sigma
    complete = all(p.b11 is not None and p.l11 is not None for p in points)
    if not complete:
        return HodgeReport(mu_tot, sigma, h3, False)
    B = sum(p.b11 for p in points)
    L = sum(p.l11 for p in points)
    h12 = 5 - B
    h21 = 5 - (L - sigma) - B
    if h12 + h21 != h3:
        raise DefectError(
            "Hodge consistency h12 + h21 = h3 failed: %d + %d != %d"
            % (h12, h21, h3))
    return HodgeReport(mu_tot, sigma, h3, True, B, L, h12, h21)
