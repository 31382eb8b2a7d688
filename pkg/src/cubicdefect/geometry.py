"""Planes, scrolls and conic-bundle line tests on a cubic threefold.

The component pattern of the projection curve C_q decides whether X
contains a plane or a rational normal cubic scroll (the surface verdict is
equivalent to sigma > 0 for non-cones).  Projecting from a line l on X
gives a conic bundle over P^2 with a quintic discriminant D_l; a line is
good when no fiber degenerates to a double line or contains l, and very
good when additionally D_l and its natural double cover are irreducible.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forms import Form, FormError, mat_det, nullspace_exact, quad_matrix
from .tracker import (
    Homotopy,
    PolySystem,
    TrackerSettings,
    TrackingError,
    Poly,
    normalize_projective,
    patch_point_to_projective,
    rational_reconstruct,
    solve_projective,
    track,
)
from .witness import (
    _DSU,
    WitnessError,
    _random_complex_slice,
    _vdist,
    _vnorm,
    dehomogenize_on_patch,
    monodromy_partition,
    track_slice_segment,
    witness_points,
)

# The good-line criterion below is a reconstruction from the geometry of
# "P cap X consists of three distinct lines": no fiber conic of rank <= 1
# and no fiber containing l itself.  Reports carry this flag.
GOOD_CRITERION_NOTE = ("reconstructed criterion: (i) the pencil (A,B,C) is "
                       "nondegenerate, (ii) no fiber conic has rank <= 1")


class GeometryError(RuntimeError):
    pass


class LineError(GeometryError):
    """The proposed line is unusable: not on X, or meeting Sing(X)."""


# ---------------------------------------------------------------------------
# plane / scroll detection from the C_q component pattern
# ---------------------------------------------------------------------------

@dataclass
class SurfaceVerdict:
    contains_plane: str          # yes | no | undetermined
    contains_scroll: str         # yes | no | undetermined
    pattern: str                 # which decision-table row fired
    sigma: int = None

    @property
    def fired(self):
        return self.contains_plane == "yes" or self.contains_scroll == "yes"

    @property
    def sigma_consistent(self):
        if self.sigma is None:
            return None
        return self.fired == (self.sigma > 0)


def _second_slice_points(w, seed=0, settings=None, tries=6):
    """Track the witness points to an independent random slice.

    The endpoints are in component-preserving bijection with w.points, so a
    block collects twice its degree in sample points across the two slices.
    """
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    n = w.equations[0].nvars
    curve_polys = dehomogenize_on_patch(w.equations, w.patch)
    base = dehomogenize_on_patch([w.slice_form], w.patch)[0]
    for _ in range(tries):
        s2 = dehomogenize_on_patch([_random_complex_slice(n, rng)],
                                   w.patch)[0]
        gamma = cmath.exp(2j * math.pi * rng.random())
        seg = track_slice_segment(curve_polys, base, s2, w.points, gamma,
                                  settings)
        if seg is not None:
            return seg[0]
    return None


def _block_rows(w, extra, block):
    rows = []
    for i in block:
        for pt in (w.points[i], extra[i]):
            rows.append(normalize_projective(
                patch_point_to_projective(pt, w.patch)))
    return np.array(rows, dtype=complex)


def block_span(w, extra, block, gap=1e6):
    """(rank, determined, plane_functional) of the span of a block.

    The rank is over the projective coordinates in P^3 (rank 3 = coplanar,
    rank 4 = spans P^3); determined requires a singular-value gap >= gap.
    The functional is the plane through the points when the rank is 3.
    """
    A = _block_rows(w, extra, block)
    u, sv, vh = np.linalg.svd(A)
    r = int(np.sum(sv > sv[0] * 1e-8))
    if r >= len(sv):
        determined = sv[-1] > sv[0] / gap
        return len(sv), determined, None
    determined = sv[r - 1] >= gap * sv[r]
    functional = vh[r].conj() if r == 3 else None
    return r, determined, functional


def detect_plane_scroll(w, partition, corank, g2=None, sigma=None,
                        seed=0, settings=None):
    """SurfaceVerdict from the certified component partition of C_q.

    Decision table: a degree-1 or coplanar degree-2 component means a plane;
    two degree-3 components each spanning P^3 mean a scroll (for corank 1
    the coplanar degree-3 alternative gives a plane when its plane misses
    the cone vertex); an irreducible curve, or exactly the two forced plane
    cubics in the corank-2 case, rules both out.
    """
    settings = settings or TrackerSettings()
    degrees = partition.degrees
    k = partition.k

    if any(d == 1 for d in degrees):
        return SurfaceVerdict("yes", "undetermined",
                              "line component of C_q", sigma)

    needs_span = any(d == 2 for d in degrees) or degrees == [3, 3]
    extra = _second_slice_points(w, seed=seed, settings=settings) \
        if needs_span else None
    if needs_span and extra is None:
        return SurfaceVerdict("undetermined", "undetermined",
                              "span sampling failed", sigma)

    for b, d in zip(partition.blocks, degrees):
        if d != 2:
            continue
        r, det, _ = block_span(w, extra, b)
        if det and r == 3:
            return SurfaceVerdict("yes", "undetermined",
                                  "plane conic component of C_q", sigma)
        return SurfaceVerdict("undetermined", "undetermined",
                              "degree-2 component with marginal span", sigma)

    if corank == 2 and k > 2:
        # the two plane cubics forced by the rank-2 quadric split further
        return SurfaceVerdict("yes", "undetermined",
                              "extra splitting of the two plane cubics",
                              sigma)

    if degrees == [3, 3] and corank <= 1:
        spans = [block_span(w, extra, b) for b in partition.blocks]
        if any(not s[1] for s in spans):
            return SurfaceVerdict("undetermined", "undetermined",
                                  "marginal span on a degree-3 component",
                                  sigma)
        ranks = [s[0] for s in spans]
        if all(r == 4 for r in ranks):
            return SurfaceVerdict("no", "yes",
                                  "two twisted cubics spanning P^3", sigma)
        if corank == 1 and g2 is not None:
            vertex = nullspace_exact(quad_matrix(g2))[0]
            vtx = np.array([complex(c) for c in vertex])
            vtx /= max(abs(c) for c in vtx)
            for (r, det, functional) in spans:
                if r == 3 and abs(np.dot(functional, vtx)) > 1e-6:
                    return SurfaceVerdict(
                        "yes", "undetermined",
                        "coplanar cubic component missing the cone vertex",
                        sigma)
        return SurfaceVerdict("undetermined", "undetermined",
                              "degree-3 components with mixed spans", sigma)

    if k == 1:
        return SurfaceVerdict("no", "no", "irreducible C_q", sigma)
    if corank == 2 and k == 2:
        return SurfaceVerdict("no", "no",
                              "two irreducible plane cubics (forced by "
                              "the rank-2 quadric)", sigma)
    return SurfaceVerdict("undetermined", "undetermined",
                          "component pattern %s outside the decision table"
                          % degrees, sigma)


def surfaces_from_record(record, sigma=None, seed=0, settings=None):
    """SurfaceVerdict from a ProjectionRecord produced by sigma_from_point."""
    if record.witness is None or record.partition is None:
        raise GeometryError("projection record carries no witness data")
    return detect_plane_scroll(record.witness, record.partition,
                               record.corank, g2=record.g2, sigma=sigma,
                               seed=seed, settings=settings)


# ---------------------------------------------------------------------------
# lines on X and their restrictions
# ---------------------------------------------------------------------------

def _is_exact_point(p):
    try:
        [Fraction(c) for c in p]
        return True
    except (TypeError, ValueError):
        return False


def _eval(f, p, exact):
    return f.evaluate_exact(p) if exact else f.evaluate(p)


def line_restriction(f, p0, p1):
    """Coefficients [c30, c21, c12, c03] of the binary form f(s p0 + t p1).

    Exact Fractions when f and both points are rational, complex otherwise.
    """
    exact = f.is_exact() and _is_exact_point(p0) and _is_exact_point(p1)
    if exact:
        p0 = [Fraction(c) for c in p0]
        p1 = [Fraction(c) for c in p1]
    else:
        p0 = [complex(c) for c in p0]
        p1 = [complex(c) for c in p1]
    c0 = _eval(f, p0, exact)
    c3 = _eval(f, p1, exact)
    spp = [a + b for a, b in zip(p0, p1)]
    spm = [a - b for a, b in zip(p0, p1)]
    epp = _eval(f, spp, exact)
    epm = _eval(f, spm, exact)
    two = Fraction(2) if exact else 2.0
    c1 = (epp - epm) / two - c3
    c2 = (epp + epm) / two - c0
    return [c0, c1, c2, c3], exact


def line_in_cubic(f, p0, p1, tol=1e-9):
    coeffs, exact = line_restriction(f, p0, p1)
    if exact:
        return all(c == 0 for c in coeffs)
    scale = max(abs(complex(c)) for c in f.terms.values())
    scale *= max(1.0, max(abs(complex(c)) for c in list(p0) + list(p1))) ** 3
    return all(abs(complex(c)) <= tol * scale for c in coeffs)


def _poly_gcd_frac(a, b):
    """gcd of two univariate polynomials with Fraction coefficients,
    ascending lists; the zero polynomial is []."""
    def trim(p):
        while p and p[-1] == 0:
            p = p[:-1]
        return p
    a, b = trim(list(a)), trim(list(b))
    while b:
        # a mod b
        r = list(a)
        db, lb = len(b) - 1, b[-1]
        while len(r) - 1 >= db and trim(r):
            q = r[-1] / lb
            shift = len(r) - 1 - db
            for i in range(len(b)):
                r[shift + i] -= q * b[i]
            r = trim(r[:-1] + [Fraction(0)])[:len(r) - 1]
            r = trim(r)
        a, b = b, r
    return a


def line_meets_singular(f, p0, p1):
    """Does the line through p0, p1 meet the singular locus of X?

    The five gradient entries restrict to binary quadratics on the line; a
    common projective root is a singular point on the line.  Exact gcd when
    rational, numeric root evaluation otherwise.
    """
    quads = []
    exact_all = True
    for g in f.gradient():
        coeffs, exact = line_restriction(g, p0, p1)  # cubic layout; deg 2
        quads.append(coeffs[:3])                     # [g(p0), mixed, g(p1)]
        exact_all = exact_all and exact
    # root at (0:1) <=> p1 is a singular point
    if exact_all:
        if all(q[2] == 0 for q in quads):
            return True
        g = [Fraction(0)]
        for q in quads:
            g = _poly_gcd_frac(g, q)
        return len(g) >= 2
    scale = max(max(abs(complex(c)) for c in q) for q in quads)
    if all(abs(complex(q[2])) < 1e-8 * scale for q in quads):
        return True
    lead = max(quads, key=lambda q: abs(complex(q[2])))
    roots = np.roots([complex(lead[2]), complex(lead[1]), complex(lead[0])])
    for r in roots:
        w = max(1.0, abs(r)) ** 2
        vals = [abs(complex(q[0]) + complex(q[1]) * r + complex(q[2]) * r * r)
                for q in quads]
        if all(v < 1e-6 * scale * w for v in vals):
            return True
    return False


def _complete_basis(p0, p1, exact):
    """5x5 column matrix [p0 p1 e_a e_b e_c] sending the line to
    {x2 = x3 = x4 = 0}."""
    n = len(p0)
    if exact:
        rows = [[Fraction(c) for c in p0], [Fraction(c) for c in p1]]
        pivots = []
        work = [list(r) for r in rows]
        for r in range(2):
            piv = next((j for j in range(n)
                        if work[r][j] != 0 and j not in pivots), None)
            if piv is None:
                raise LineError("the two points do not span a line")
            pivots.append(piv)
            for rr in range(2):
                if rr != r and work[rr][piv] != 0:
                    fct = work[rr][piv] / work[r][piv]
                    work[rr] = [a - fct * b
                                for a, b in zip(work[rr], work[r])]
        cols = [rows[0], rows[1]]
        for j in range(n):
            if j not in pivots:
                e = [Fraction(0)] * n
                e[j] = Fraction(1)
                cols.append(e)
        return [[cols[j][i] for j in range(n)] for i in range(n)]
    A = np.array([[complex(c) for c in p0], [complex(c) for c in p1]],
                 dtype=complex)
    _u, sv, _vh = np.linalg.svd(A)
    if sv[-1] < 1e-10 * sv[0]:
        raise LineError("the two points do not span a line")
    pivots = []
    work = A.copy()
    for r in range(2):
        piv = max((j for j in range(n) if j not in pivots),
                  key=lambda j: abs(work[r][j]))
        pivots.append(piv)
        for rr in range(2):
            if rr != r:
                work[rr] -= work[rr][piv] / work[r][piv] * work[r]
    cols = [list(p0), list(p1)]
    for j in range(n):
        if j not in pivots:
            e = [0j] * n
            e[j] = 1.0 + 0j
            cols.append(e)
    return [[complex(cols[j][i]) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# the conic bundle of a line
# ---------------------------------------------------------------------------

@dataclass
class ConicBundleData:
    p0: list
    p1: list
    exact: bool
    change: list                 # column matrix of the coordinate move
    A: Form = None               # f = A x0^2 + B x0 x1 + C x1^2 + D x0 +
    B: Form = None               # E x1 + F in the moved coordinates,
    C: Form = None               # with A,B,C linear, D,E quadratic and
    D: Form = None               # F cubic in y = (x2, x3, x4)
    E: Form = None
    F: Form = None
    M: list = None               # 3x3 symmetric matrix of Forms
    discriminant: Form = None    # D_l = det M, a quintic in y
    note: str = GOOD_CRITERION_NOTE


def _form_to_complex(f):
    return Form(f.nvars, {e: complex(c) for e, c in f.terms.items()},
                degree=f.degree)


def conic_bundle(f, p0, p1):
    """ConicBundleData for the line l = span(p0, p1) on X = V(f).

    Requires l inside X (checked via four-point vanishing of the cubic
    restriction) and l disjoint from Sing(X).
    """
    if not line_in_cubic(f, p0, p1):
        raise LineError("the line is not contained in the cubic")
    if line_meets_singular(f, p0, p1):
        raise LineError("the line meets the singular locus")
    exact = f.is_exact() and _is_exact_point(p0) and _is_exact_point(p1)
    T = _complete_basis(p0, p1, exact)
    fc = f if exact else _form_to_complex(f)
    g = substitute_matrix(fc, T)
    half = Fraction(1, 2) if exact else 0.5
    zero = Form.zero(3, 0)
    parts = {key: {} for key in ("A", "B", "C", "D", "E", "F")}
    if not exact:
        cutoff = 1e-9 * max(abs(complex(c)) for c in g.terms.values())
    for e, c in g.terms.items():
        a, b, y = e[0], e[1], e[2:]
        d = a + b
        if d == 3:
            if exact or abs(complex(c)) > cutoff:
                raise LineError("restriction to the line did not vanish")
            continue
        key = {2: ("C", "B", "A"), 1: ("E", "D"), 0: ("F",)}[d][a]
        parts[key][y] = c
    A = Form(3, parts["A"], degree=1)
    B = Form(3, parts["B"], degree=1)
    C = Form(3, parts["C"], degree=1)
    D = Form(3, parts["D"], degree=2)
    E = Form(3, parts["E"], degree=2)
    F = Form(3, parts["F"], degree=3)
    M = [[A, B.scale(half), D.scale(half)],
         [B.scale(half), C, E.scale(half)],
         [D.scale(half), E.scale(half), F]]
    disc = _det3_forms(M)
    if disc.is_zero():
        raise LineError("the discriminant of the conic bundle vanishes "
                        "identically")
    if disc.degree != 5:
        raise GeometryError("discriminant degree %d != 5" % disc.degree)
    return ConicBundleData(list(p0), list(p1), exact, T, A, B, C, D, E, F,
                           M, disc)


def substitute_matrix(f, T):
    from .forms import substitute
    return substitute(f, T)


def _det3_forms(M):
    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))


def _adjugate_minors(M):
    """The six independent 2x2 minors of the symmetric matrix M; they all
    vanish at y exactly when the fiber conic has rank <= 1."""
    out = []
    for i in range(3):
        for j in range(i, 3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            out.append(M[rows[0]][cols[0]] * M[rows[1]][cols[1]]
                       - M[rows[0]][cols[1]] * M[rows[1]][cols[0]])
    return out


# ---------------------------------------------------------------------------
# good lines
# ---------------------------------------------------------------------------

def _random_form(nvars, degree, rng):
    """A dense random form with complex Gaussian coefficients."""
    if degree == 0:
        return Form(nvars, {(0,) * nvars:
                            complex(rng.gauss(0, 1), rng.gauss(0, 1))},
                    degree=0)
    terms = {}

    def rec(prefix, remaining, slots):
        if slots == 1:
            terms[tuple(prefix + [remaining])] = complex(rng.gauss(0, 1),
                                                         rng.gauss(0, 1))
            return
        for d in range(remaining + 1):
            rec(prefix + [d], remaining - d, slots - 1)

    rec([], degree, nvars)
    return Form(nvars, terms, degree=degree)


@dataclass
class GoodLineReport:
    good: str                    # yes | no | undetermined
    reason: str
    witness_y: list = None
    note: str = GOOD_CRITERION_NOTE


def good_line_test(cb, seed=0, settings=None):
    """Is the line good: no fiber conic containing l and no rank-<=1 fiber.

    Condition (i) is the nonsingularity of the coefficient matrix of the
    linear pencil (A, B, C); condition (ii) solves two of the 2x2 minors of
    M and checks the rest at each candidate degeneration point.
    """
    settings = settings or TrackerSettings()
    basis = [tuple(int(i == j) for i in range(3)) for j in range(3)]
    N = [[form.terms.get(e, 0) for e in basis]
         for form in (cb.A, cb.B, cb.C)]
    if cb.exact:
        degenerate = mat_det([[Fraction(c) for c in row] for row in N]) == 0
    else:
        sv = np.linalg.svd(np.array(N, dtype=complex), compute_uv=False)
        degenerate = sv[-1] < 1e-8 * max(sv[0], 1e-30)
    if degenerate:
        return GoodLineReport("no", "a fiber conic contains the line "
                              "(degenerate (A,B,C) pencil)")
    minors = [m for m in _adjugate_minors(cb.M) if not m.is_zero()]
    if not minors:
        return GoodLineReport("no", "the adjugate of M vanishes "
                              "identically")
    # two random homogeneous combinations of the minors cut out a finite
    # superset of the common zero locus; candidates are then checked against
    # every minor.  Two independent draws guard against lost paths.
    rng = random.Random(seed)
    top = max(m.degree for m in minors)
    sols = []
    failures = []
    for draw in range(2):
        combos = []
        for _ in range(2):
            combo = Form.zero(3, top)
            for m in minors:
                pad = _random_form(3, top - m.degree, rng)
                combo = combo + m * pad
            combos.append(combo)
        try:
            sols.extend(solve_projective(combos, settings,
                                         seed=seed + 101 * draw, npatches=2))
        except (TrackingError, WitnessError) as exc:
            failures.append(exc)
    if not sols and failures:
        return GoodLineReport("undetermined",
                              "minor system unsolvable: %s" % failures[0])
    scales = [max(abs(complex(c)) for c in m.terms.values()) for m in minors]
    marginal = None
    for s in sols:
        y = normalize_projective(s.point)
        vals = [abs(m.evaluate(y)) / sc for m, sc in zip(minors, scales)]
        worst = max(vals)
        if worst < 1e-6:
            return GoodLineReport("no", "rank-1 fiber conic (double line)",
                                  witness_y=[complex(c) for c in y])
        if worst < 1e-3:
            marginal = [complex(c) for c in y]
    if marginal is not None:
        return GoodLineReport("undetermined",
                              "numerically marginal rank-1 candidate",
                              witness_y=marginal)
    return GoodLineReport("yes", "nondegenerate pencil and no rank-1 fiber")


# ---------------------------------------------------------------------------
# very good lines: irreducibility of D_l and of its double cover
# ---------------------------------------------------------------------------

@dataclass
class LineVerdict:
    good: str
    irreducible: str             # yes | no | no (probabilistic)
    cover_connected: str         # yes | probabilistic: likely split | n/a
    very_good: bool
    components: int = None
    cover_loops: int = 0
    note: str = GOOD_CRITERION_NOTE


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def _conic_factors(Mv, rng=None):
    """Split the rank-2 complex symmetric conic y^T Mv y into its two lines.

    The line pair is met with a generic probe line far from the kernel; the
    roots of the restricted binary quadratic give one point on each factor
    line, and the factor is the span of that point with the kernel.  (This
    stays accurate near rank-1 matrices, where a basis-dependent quadratic
    would cancel catastrophically.)  Returns a pair of normalized
    coefficient vectors, or None when the matrix is not cleanly rank 2.
    """
    M = np.array(Mv, dtype=complex)
    _u, sv, vh = np.linalg.svd(M)
    if sv[1] < 1e-10 * sv[0]:
        return None                      # rank <= 1: branch point
    k = vh[2].conj()                     # the kernel (node of the line pair)
    # probe lines: the coordinate line avoiding the kernel, plus two
    # complex-tilted fallbacks against tangency
    order = sorted(range(3), key=lambda i: abs(k[i]))
    e = np.eye(3, dtype=complex)
    a0, b0, c0 = e[order[0]], e[order[1]], e[order[2]]
    candidates = [(a0, b0),
                  (a0 + (0.31 + 0.47j) * c0, b0 - (0.23 - 0.61j) * c0),
                  (a0 - (0.52 - 0.18j) * c0, b0 + (0.41 + 0.29j) * c0)]
    best = None
    for a, b in candidates:
        qa = a @ M @ a
        qab = a @ M @ b
        qb = b @ M @ b
        norm = max(abs(qa), abs(qab), abs(qb))
        if norm == 0:
            continue
        disc = qab * qab - qa * qb
        if best is None or abs(disc) / norm ** 2 > best[0]:
            best = (abs(disc) / norm ** 2, a, b, qa, qab, qb, disc)
    if best is None or best[0] < 1e-16:
        return None                      # probe tangent: factors collide
    _q, a, b, qa, qab, qb, disc = best
    sq = cmath.sqrt(disc)
    if abs(-qab + sq) < abs(-qab - sq):
        sq = -sq
    big = -qab + sq                      # q(t) = qb t^2 + 2 qab t + qa
    if abs(qb) >= abs(qa):
        t1 = big / qb
        z1 = a + t1 * b
        z2 = a + (qa / (qb * t1)) * b if big != 0 else np.array(b)
    else:
        s1 = big / qa                    # roots in s = 1/t
        z1 = a * s1 + b
        z2 = a * (qb / (qa * s1)) + b if big != 0 else np.array(a)
    out = []
    for z in (z1, z2):
        fv = _cross(k, z)
        nrm = max(abs(c) for c in fv)
        if nrm == 0:
            return None
        out.append([c / nrm for c in fv])
    return out


def _incidence_system(cb, w):
    """The line-pair cover of D_l as an incidence polynomial system.

    Variables are the affine patch coordinates of y followed by the three
    coefficients u of a line in the fiber plane.  The conic of M(y)
    vanishes on the line {u . x = 0} exactly when v_i^T M(y) v_j = 0 for
    the spanning vectors v_1 = (u1, -u0, 0), v_2 = (0, u2, -u1),
    v_3 = (u2, 0, -u0); the six conditions cut out the double cover of
    D_l swept by the individual lines of the degenerate fibers.
    """
    na = w.equations[0].nvars - 1
    nv = na + 3
    pad = (0, 0, 0)
    m = [[{tuple(e) + pad: c for c, e in
           dehomogenize_on_patch([cb.M[i][j]], w.patch)[0].terms}
          for j in range(3)] for i in range(3)]

    def uvar(i):
        e = [0] * nv
        e[na + i] = 1
        return tuple(e)

    V = [[{uvar(1): 1}, {uvar(0): -1}, {}],
         [{}, {uvar(2): 1}, {uvar(1): -1}],
         [{uvar(2): 1}, {}, {uvar(0): -1}]]

    def pmul(a, b):
        out = {}
        for ea, ca in a.items():
            for eb, cb_ in b.items():
                e = tuple(p + q for p, q in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb_
        return out

    eqs = []
    for i in range(3):
        for j in range(i, 3):
            acc = {}
            for k in range(3):
                if not V[i][k]:
                    continue
                for l in range(3):
                    if not V[j][l]:
                        continue
                    for e, c in pmul(pmul(V[i][k], V[j][l]),
                                     m[k][l]).items():
                        acc[e] = acc.get(e, 0) + c
            eqs.append(acc)
    return eqs, m, na, nv


def _dict_eval(d, z):
    total = 0j
    for e, c in d.items():
        term = complex(c)
        for zi, ei in zip(z, e):
            if ei:
                term *= zi ** ei
        total += term
    return total


def _cover_connected(cb, w, seed=0, settings=None, budget=24):
    """Monodromy connectivity of the 2:1 cover of D_l by fiber-line choices.

    The cover is realized as the incidence curve of (point of D_l, line of
    its fiber conic): pointwise factoring of near-double-line conics is
    hopelessly ill-conditioned, while the incidence curve is tracked by the
    ordinary path tracker.  Its ten witness points (two lines over each of
    the five D_l witness points) go around triangle loops in slice space,
    and the loop permutations merge sheets until a single orbit certifies
    the connected cover.
    """
    settings = settings or TrackerSettings()
    n = w.equations[0].nvars
    eqs, m, na, nv = _incidence_system(cb, w)

    def lift(p):
        return Poly(nv, [(c, tuple(e) + (0, 0, 0)) for c, e in p.terms])

    base = lift(dehomogenize_on_patch([w.slice_form], w.patch)[0])
    pairs = []
    for p in w.points:
        # the entries of M have mixed degrees in y, so the factor lines
        # depend on the chosen representative: evaluate M through the same
        # dehomogenized polynomials the incidence system is built from
        z = list(p) + [0.0, 0.0, 0.0]
        fs = _conic_factors([[_dict_eval(m[i][j], z) for j in range(3)]
                             for i in range(3)])
        if fs is None:
            return "undetermined (rank-1 fiber at a witness point)", 0
        pairs.append(fs)
    m2 = 2 * len(w.points)
    dsu = _DSU(m2)
    rng = random.Random(seed)
    loops = attempts = 0
    while loops < budget and attempts < 3 * budget:
        attempts += 1
        # fresh randomization each loop: three combinations of the six
        # incidence equations (a square subsystem) and an affine chart
        # for the line coefficients
        combos = []
        for _ in range(3):
            acc = {}
            for q in eqs:
                c = complex(rng.gauss(0, 1), rng.gauss(0, 1))
                for e, cc in q.items():
                    acc[e] = acc.get(e, 0) + c * cc
            scale = max(abs(v) for v in acc.values())
            combos.append(Poly.from_dict(
                nv, {e: v / scale for e, v in acc.items()}))
        lam = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(3)]
        chart_terms = [(-1.0, (0,) * nv)]
        for i in range(3):
            e = [0] * nv
            e[na + i] = 1
            chart_terms.append((lam[i], tuple(e)))
        chart = Poly(nv, chart_terms)
        starts = []
        for p, fs in zip(w.points, pairs):
            for uv in fs:
                t = sum(li * c for li, c in zip(lam, uv))
                if abs(t) < 1e-3:
                    starts = None
                    break
                starts.append(list(p) + [c / t for c in uv])
            if starts is None:
                break
        if starts is None:
            continue
        s1 = lift(dehomogenize_on_patch(
            [_random_complex_slice(n, rng)], w.patch)[0])
        s2 = lift(dehomogenize_on_patch(
            [_random_complex_slice(n, rng)], w.patch)[0])
        pts = starts
        ok = True
        for sa, sb in ((base, s1), (s1, s2), (s2, base)):
            gamma = cmath.exp(2j * math.pi * rng.random())
            h = Homotopy(PolySystem(combos + [sa, chart], nv),
                         PolySystem(combos + [sb, chart], nv), gamma)
            nxt = []
            for z in pts:
                try:
                    r = track(h, z, settings)
                except TrackingError:
                    ok = False
                    break
                if r.status != "converged":
                    ok = False
                    break
                nxt.append(r.point)
            if not ok:
                break
            pts = nxt
        if not ok:
            continue
        # match the loop endpoints back to the start sheets (the chart is
        # fixed through the loop, so plain coordinate distance works)
        perm = []
        for z in pts:
            dists = [_vdist(z, q) for q in starts]
            j = min(range(m2), key=dists.__getitem__)
            if dists[j] > 1e-4 * max(1.0, _vnorm(starts[j])):
                ok = False
                break
            perm.append(j)
        if not ok or len(set(perm)) != m2:
            continue
        loops += 1
        for i, j in enumerate(perm):
            dsu.union(i, j)
        if len(dsu.blocks()) == 1:
            return "yes", loops
    return "probabilistic: likely split", loops


def very_good_test(cb, seed=0, settings=None, maxloops=50, cover_loops=24):
    """LineVerdict for a good line: D_l irreducible and its double cover
    connected.  A negative cover verdict from an exhausted loop budget is
    probabilistic (conservatively very_good = no)."""
    settings = settings or TrackerSettings()
    # rescale D_l so the tracker's absolute tolerances are meaningful
    # (an exact power of two keeps rational coefficients exact)
    d = cb.discriminant
    top = max(abs(complex(c)) for c in d.terms.values())
    # normalize the top coefficient near 2^15: large enough that the
    # tracker's absolute corrector tolerance is tight in relative terms
    # (loose correction invites path jumping), small enough that Newton
    # residuals can still reach it in double precision
    unit = (Fraction(2) if d.is_exact() else 2.0) \
        ** (round(math.log2(top)) - 15)
    d = Form(d.nvars, {e: c / unit for e, c in d.terms.items()},
             degree=d.degree)
    w = witness_points([d], seed=seed, settings=settings)
    part = monodromy_partition(w, maxloops=maxloops, seed=seed + 1,
                               settings=settings)
    if part.k > 1:
        irr = "no" if part.certified else "no (probabilistic)"
        return LineVerdict("yes", irr, "n/a", False, components=part.k)
    cover, loops = _cover_connected(cb, w, seed=seed + 2, settings=settings,
                                    budget=cover_loops)
    return LineVerdict("yes", "yes", cover, cover == "yes",
                       components=1, cover_loops=loops)


# ---------------------------------------------------------------------------
# sampling rational points and lines
# ---------------------------------------------------------------------------

def rational_point_from_singular(f, q, rng, tries=50):
    """A smooth rational point of X on a line through the rational singular
    point q: the cubic restriction is t^2 (c2 + c3 t), so t = -c2/c3."""
    q = [Fraction(c) for c in q]
    grads = f.gradient()
    for _ in range(tries):
        v = [Fraction(rng.randint(-9, 9)) for _ in range(f.nvars)]
        coeffs, _ = line_restriction(f, q, v)
        if coeffs[0] != 0 or coeffs[1] != 0:
            raise GeometryError("q is not a singular point of X")
        if coeffs[3] == 0 or coeffs[2] == 0:
            continue
        t = -coeffs[2] / coeffs[3]
        p = [a + t * b for a, b in zip(q, v)]
        if all(c == 0 for c in p):
            continue
        if f.evaluate_exact(p) != 0:
            raise GeometryError("restriction root failed to lie on X")
        if all(g.evaluate_exact(p) == 0 for g in grads):
            continue                     # landed on another singular point
        from .tracker import primitive_point
        return primitive_point(p)
    raise GeometryError("no smooth rational point found through q")


def lines_through_point(f, x0, seed=0, settings=None):
    """Directions v of the (generically six) lines on X through the smooth
    rational point x0, via f(x0 + t v) = t E1(v) + t^2 E2(v) + t^3 f(v).

    Returns (direction, exact) pairs; directions are rationally
    reconstructed when possible."""
    settings = settings or TrackerSettings()
    n = f.nvars
    x0 = [Fraction(c) for c in x0]
    grads = f.gradient()
    g1 = [g.evaluate_exact(x0) for g in grads]
    if all(c == 0 for c in g1):
        raise GeometryError("x0 is a singular point")
    E1 = Form.linear(g1)
    e2_terms = {}
    for i in range(n):
        for j in range(i, n):
            h = grads[i].derivative(j).evaluate_exact(x0)
            if h == 0:
                continue
            e = [0] * n
            e[i] += 1
            e[j] += 1
            e2_terms[tuple(e)] = h / 2 if i == j else h
    E2 = Form(n, e2_terms, degree=2)
    rng = random.Random(seed)
    for _ in range(10):
        hc = [Fraction(rng.randint(-9, 9)) for _ in range(n)]
        if sum(a * b for a, b in zip(hc, x0)) != 0:
            break
    slc = Form.linear(hc)
    sols = solve_projective([E1, E2, f, slc], settings,
                            seed=rng.randrange(2 ** 30), npatches=2)
    out = []
    for s in sols:
        v = normalize_projective(s.point)
        rat = rational_reconstruct(v, 10 ** 8)
        if rat is not None and not all(c == 0 for c in rat):
            ok = (E1.evaluate_exact(rat) == 0
                  and E2.evaluate_exact(rat) == 0
                  and f.evaluate_exact(rat) == 0)
            if ok:
                out.append((rat, True))
                continue
        out.append(([complex(c) for c in v], False))
    return out


def sample_good_lines(f, count, seed=0, settings=None, base_points=None,
                      singular_points=None, max_base=30):
    """Up to ``count`` good lines on X, as (p0, p1, ConicBundleData,
    GoodLineReport) tuples.

    Base points come from the caller, or are sampled on lines through a
    rational singular point; the lines on X through each base point are
    then tested in turn."""
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    bases = list(base_points or [])
    if not bases:
        if singular_points is None:
            from .singular import find_singular_points
            singular_points = find_singular_points(f, seed=seed,
                                                   settings=settings)
        rational_sing = [p.location for p in singular_points if p.exact]
        if not rational_sing:
            raise GeometryError("no rational base points available")
        for _ in range(max_base):
            q = rational_sing[rng.randrange(len(rational_sing))]
            try:
                bases.append(rational_point_from_singular(f, q, rng))
            except GeometryError:
                continue
    found = []
    for x0 in bases:
        if len(found) >= count:
            break
        try:
            directions = lines_through_point(f, x0, seed=rng.randrange(2**30),
                                             settings=settings)
        except (GeometryError, TrackingError):
            continue
        for v, _exact in directions:
            if len(found) >= count:
                break
            try:
                cb = conic_bundle(f, x0, v)
            except (LineError, GeometryError, FormError):
                continue
            rep = good_line_test(cb, seed=rng.randrange(2 ** 30),
                                 settings=settings)
            if rep.good == "yes":
                found.append((x0, v, cb, rep))
    return found
