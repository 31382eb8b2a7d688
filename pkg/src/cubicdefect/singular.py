"""Singular points of a cubic threefold: location, corank, Milnor number,
analytic type, and local Hodge invariants.

Locations come from the homotopy tracker on the gradient system; corank and
the projection (g2, g3) are exact once a point reconstructs rationally; the
Milnor number is the stabilized nullity of Macaulay dual-space matrices; the
type label follows the corank dichotomy, with an exact splitting-lemma
reduction at corank 2; local invariants (b11, l11) come from the singularity
spectrum of the quasi-homogeneous normal form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forms import (
    Form,
    point_to_last_coordinate,
    quad_matrix,
    rank_exact,
    substitute,
)
from .tracker import (
    TrackerSettings,
    projective_distance,
    rational_reconstruct,
    solve_projective,
)


class SingularityError(RuntimeError):
    pass


class NonIsolatedSingularLocus(SingularityError):
    pass


@dataclass
class SingularPoint:
    location: list              # Fractions (primitive integers) or complex
    exact: bool
    multiplicity: int           # path-cluster multiplicity of the gradient
    corank: int = None
    milnor: int = None
    label: str = None
    b11: int = None
    l11: int = None
    certification: str = "exact"

    def location_key(self):
        if self.exact:
            return (0, tuple(str(c) for c in self.location))
        return (1, tuple((round(complex(c).real, 6), round(complex(c).imag, 6))
                         for c in self.location))


# ---------------------------------------------------------------------------
# projection from a singular point
# ---------------------------------------------------------------------------

def project(f, q):
    """Projection data (g2, g3) of the cubic f from the singular point q.

    Moves q exactly to [0:...:0:1]; the cubic then reads
    x_last * g2 + g3 with g2, g3 forms of degrees 2, 3 in the remaining
    variables.  Residual quadratic or cubic terms in the last variable mean
    q is not a singular point of a cubic.
    """
    n = f.nvars
    T = point_to_last_coordinate(q, n)
    g = substitute(f, T)
    last = n - 1
    g2_terms, g3_terms = {}, {}
    for e, c in g.terms.items():
        if e[last] == 0:
            g3_terms[e[:last]] = c
        elif e[last] == 1:
            g2_terms[e[:last]] = c
        else:
            raise SingularityError(
                "projection point is not singular: term with x%d^%d survives"
                % (last, e[last]))
    return (Form(n - 1, g2_terms, degree=2),
            Form(n - 1, g3_terms, degree=3))


def corank(f, q):
    """Exact corank 4 - rank(g2) at the rational singular point q."""
    for p in f.gradient():
        if p.evaluate_exact(q) != 0:
            raise SingularityError("point is not singular (gradient != 0)")
    g2, _g3 = project(f, q)
    if g2.is_zero():
        raise SingularityError("g2 vanishes identically: f is a cone over q")
    return 4 - rank_exact(quad_matrix(g2))


def corank_numeric(f, p, tol=1e-8):
    """Numeric corank from the Hessian of f at an approximate point.

    At a singular point the Hessian rank equals rank(g2); the rank is read
    off the singular values with a relative threshold.
    """
    n = f.nvars
    H = np.zeros((n, n), dtype=complex)
    for i in range(n):
        di = f.derivative(i)
        for j in range(i, n):
            H[i, j] = H[j, i] = di.derivative(j).evaluate(p)
    sv = np.linalg.svd(H, compute_uv=False)
    if sv[0] == 0:
        return 4
    return 4 - int(np.sum(sv > tol * sv[0]))


# ---------------------------------------------------------------------------
# locating the singular points
# ---------------------------------------------------------------------------

def find_singular_points(f, seed=0, settings=None, bound=10 ** 8):
    """All isolated singular points of X = V(f), rationally reconstructed
    where possible.

    Solves the gradient system projectively with two independent
    randomizations; any mismatch between the two solution sets signals a
    positive-dimensional singular locus.
    """
    settings = settings or TrackerSettings()
    grad = f.gradient()
    runs = []
    for s in (seed, seed + 7919):
        runs.append(solve_projective(grad, settings, seed=s, npatches=2,
                                     randomize_to=f.nvars - 1))
    for a, b in ((runs[0], runs[1]), (runs[1], runs[0])):
        for sol in a:
            if not any(projective_distance(sol.point, t.point) < 1e-5
                       for t in b):
                raise NonIsolatedSingularLocus(
                    "gradient solutions differ across independent "
                    "randomizations: singular locus is not isolated")
    points = []
    for sol in runs[0]:
        # independent randomizations can only inflate a cluster, so the
        # smaller count is the trustworthy one
        mult = sol.multiplicity
        for t in runs[1]:
            if projective_distance(sol.point, t.point) < 1e-5:
                mult = min(mult, t.multiplicity)
        rec = rational_reconstruct(sol.point, bound, system=grad)
        if rec is not None:
            points.append(SingularPoint(rec, True, mult,
                                        certification="exact"))
        else:
            points.append(SingularPoint(list(sol.point), False, mult,
                                        certification="numeric, uncertified"))
    points.sort(key=SingularPoint.location_key)
    return points


# ---------------------------------------------------------------------------
# Milnor number by Macaulay dual spaces
# ---------------------------------------------------------------------------

def _monomials_upto(nvars, d):
    out = [(0,) * nvars]
    cur = out[:]
    for _ in range(d):
        nxt = []
        seen = set()
        for e in cur:
            for i in range(nvars):
                ne = e[:i] + (e[i] + 1,) + e[i + 1:]
                if ne not in seen:
                    seen.add(ne)
                    nxt.append(ne)
        out.extend(nxt)
        cur = nxt
    return out


def _dict_derivative(F, i):
    out = {}
    for e, c in F.items():
        if e[i]:
            ne = e[:i] + (e[i] - 1,) + e[i + 1:]
            out[ne] = out.get(ne, 0) + c * e[i]
    return out


def local_multiplicity(partials, nvars, maxdeg=20):
    """Dimension of the local algebra C[[x]]/(partials) at the origin.

    Computes the nullity of the degree-<=d Macaulay matrices (rows: monomial
    shifts of the generators, columns: monomials of degree <= d) and returns
    the first stabilized value nu_d = nu_{d+1}.
    """
    gens = []
    for F in partials:
        if any(sum(e) == 0 for e in F):
            raise SingularityError("generator does not vanish at the origin")
        scale = max(abs(complex(c)) for c in F.values()) if F else 1.0
        gens.append({e: complex(c) / scale for e, c in F.items()})
    prev = None
    for d in range(1, maxdeg + 1):
        cols = _monomials_upto(nvars, d)
        colidx = {e: i for i, e in enumerate(cols)}
        shifts = _monomials_upto(nvars, d - 1)
        rows = []
        for F in gens:
            for a in shifts:
                row = np.zeros(len(cols), dtype=complex)
                hit = False
                for e, c in F.items():
                    b = tuple(x + y for x, y in zip(a, e))
                    if sum(b) <= d:
                        row[colidx[b]] += c
                        hit = True
                if hit:
                    rows.append(row)
        if rows:
            rank = np.linalg.matrix_rank(np.array(rows))
        else:
            rank = 0
        nullity = int(len(cols) - rank)
        if prev is not None and nullity == prev:
            return nullity
        prev = nullity
    raise SingularityError(
        "Macaulay nullity did not stabilize by degree %d: "
        "the point is not an isolated singularity" % maxdeg)


def milnor_number(f, q, maxdeg=20):
    """Milnor number at the exact singular point q (local Jacobian algebra
    dimension via Macaulay dual spaces)."""
    n = f.nvars
    T = point_to_last_coordinate(q, n)
    g = substitute(f, T)
    F = {}
    for e, c in g.terms.items():
        key = e[:n - 1]
        F[key] = F.get(key, 0) + c
    F.pop((0,) * (n - 1), None)   # f(q) = 0
    partials = [_dict_derivative(F, i) for i in range(n - 1)]
    return local_multiplicity(partials, n - 1, maxdeg=maxdeg)


# ---------------------------------------------------------------------------
# splitting lemma (corank 2) and type classification
# ---------------------------------------------------------------------------

def _congruence_diagonalize(M):
    """Exact P with P^T M P diagonal, nonzero diagonal entries first.

    Lagrange's method over the rationals; M symmetric with Fraction entries.
    Returns (P as row-major matrix, diagonal entries).
    """
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, factor):
        # basis change e_dst <- e_dst + factor * e_src acts on columns
        for r in range(n):
            P[r][dst] += factor * P[r][src]
        for r in range(n):
            A[r][dst] += factor * A[r][src]
        for c in range(n):
            A[dst][c] += factor * A[src][c]

    def swap_cols(i, j):
        for r in range(n):
            P[r][i], P[r][j] = P[r][j], P[r][i]
            A[r][i], A[r][j] = A[r][j], A[r][i]
        A[i], A[j] = A[j], A[i]

    for i in range(n):
        if A[i][i] == 0:
            piv = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if piv is not None:
                swap_cols(i, piv)
            else:
                piv = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if piv is None:
                    continue
                add_col(i, piv, Fraction(1))
        for j in range(i + 1, n):
            if A[i][j] != 0:
                add_col(j, i, -A[i][j] / A[i][i])
    # nonzero diagonal entries first
    order = sorted(range(n), key=lambda i: A[i][i] == 0)
    Pn = [[P[r][order[c]] for c in range(n)] for r in range(n)]
    diag = [A[order[c]][order[c]] for c in range(n)]
    return Pn, diag


def _dict_mul(a, b, maxdeg):
    out = {}
    for e1, c1 in a.items():
        d1 = sum(e1)
        for e2, c2 in b.items():
            if d1 + sum(e2) > maxdeg:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def _dict_shift_var(F, i, s, maxdeg):
    """Substitute x_i -> x_i + s (s free of x_i), truncating above maxdeg."""
    kmax = max((e[i] for e in F), default=0)
    spow = {0: {(0,) * len(next(iter(F), ())): Fraction(1)}} if F else {}
    if F:
        zero_exp = (0,) * len(next(iter(F)))
        spow = {0: {zero_exp: Fraction(1)}}
        for k in range(1, kmax + 1):
            spow[k] = _dict_mul(spow[k - 1], s, maxdeg)
    out = {}
    for e, c in F.items():
        k = e[i]
        base = e[:i] + (0,) + e[i + 1:]
        if sum(base) > maxdeg:
            continue
        for j in range(k + 1):
            coef = c * math.comb(k, j)
            xi_part = base[:i] + (k - j,) + base[i + 1:]
            if sum(xi_part) > maxdeg:
                continue
            for es, cs in spow[j].items():
                ne = tuple(x + y for x, y in zip(xi_part, es))
                if sum(ne) > maxdeg:
                    continue
                out[ne] = out.get(ne, 0) + coef * cs
    return {e: c for e, c in out.items() if c != 0}


def splitting_residual(f, q, mu):
    """Residual series g(y, z) of the splitting lemma at a corank-2 point.

    Exactly diagonalizes the rank-2 quadratic part and removes the square
    variables by iterated completing-the-square on jets truncated at degree
    mu + 2 (finite determinacy).  Returns the residual as an exponent dict
    in the two non-square variables.
    """
    n = f.nvars
    maxdeg = mu + 2
    g2, _g3 = project(f, q)
    M = quad_matrix(g2)
    if rank_exact(M) != 2:
        raise SingularityError("splitting_residual expects a corank-2 point")
    P, diag = _congruence_diagonalize(M)
    S = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n - 1):
        for j in range(n - 1):
            S[i][j] = P[i][j]
    S[n - 1][n - 1] = Fraction(1)
    T = point_to_last_coordinate(q, n)
    g = substitute(substitute(f, T), S)
    F = {}
    for e, c in g.terms.items():
        key = e[:n - 1]
        F[key] = F.get(key, 0) + Fraction(c)
    F.pop((0,) * (n - 1), None)
    m = n - 1
    for i in (0, 1):
        a = diag[i]
        for _ in range(maxdeg + 1):
            A = {e[:i] + (0,) + e[i + 1:]: c
                 for e, c in F.items()
                 if e[i] == 1 and sum(e) > 2}
            if not A:
                break
            shift = {e: -c / (2 * a) for e, c in A.items()}
            F = _dict_shift_var(F, i, shift, maxdeg)
        else:
            raise SingularityError("completing the square did not terminate")
    residual = {}
    for e, c in F.items():
        if e[0] == 0 and e[1] == 0:
            residual[e[2:]] = residual.get(e[2:], 0) + c
    return {e: c for e, c in residual.items() if c != 0}


def _gcd_degree(p, q):
    """Degree of gcd of two univariate polynomials (coefficient lists,
    ascending, Fractions)."""

    def trim(r):
        while r and r[-1] == 0:
            r.pop()
        return r

    p, q = trim(list(p)), trim(list(q))
    while q:
        # p mod q
        while len(p) >= len(q) and p:
            factor = p[-1] / q[-1]
            shift = len(p) - len(q)
            for i in range(len(q)):
                p[shift + i] -= factor * q[i]
            trim(p)
        p, q = q, trim(p)
    return max(len(p) - 1, 0)


def binary_cubic_root_structure(coeffs):
    """Root multiplicity pattern of a binary cubic c30*s^3 + c21*s^2 t +
    c12*s t^2 + c03*t^3: 'distinct' | 'double' | 'triple' | 'zero'."""
    c30, c21, c12, c03 = (Fraction(c) for c in coeffs)
    p = [c30, c21, c12, c03]    # p(t) = c3(1, t), ascending in t
    while p and p[-1] == 0:
        p.pop()
    if not p:
        return "zero"
    deg = len(p) - 1
    mult_inf = 3 - deg
    if mult_inf >= 3:
        return "triple"
    if mult_inf == 2:
        return "double"
    dp = [p[i] * i for i in range(1, len(p))]
    g = _gcd_degree(p, dp)
    if deg == 2:
        # the root at infinity is simple; double root iff disc = 0
        return "double" if g >= 1 else "distinct"
    return {0: "distinct", 1: "double", 2: "triple"}[g]


def classify(f, q, crk, mu, cq_irreducible=None):
    """Analytic type label from corank, Milnor number, and (for the
    equal-mu corank-3 pairs) irreducibility of the projection curve."""
    if crk == 0:
        if mu != 1:
            raise SingularityError("corank 0 with mu=%d is inconsistent" % mu)
        return "A1"
    if crk == 1:
        if mu < 2:
            raise SingularityError("corank 1 with mu=%d is inconsistent" % mu)
        return "A%d" % mu
    if crk == 2:
        if mu < 4:
            raise SingularityError("corank 2 with mu=%d is inconsistent" % mu)
        residual = splitting_residual(f, q, mu)
        c3 = [Fraction(0)] * 4
        for e, c in residual.items():
            if sum(e) == 3:
                c3[e[1]] = c
        structure = binary_cubic_root_structure(c3)
        if structure == "distinct":
            return "D4"
        if structure == "double":
            return "D%d" % mu
        if mu in (6, 7, 8):
            return "E%d" % mu
        return "T-family"
    if crk == 3:
        if mu == 8:
            return "T333"
        if mu == 9:
            return "T334"
        if mu == 10:
            if cq_irreducible is None:
                return "Q10|T344"
            return "Q10" if cq_irreducible else "T344"
        if mu == 11:
            return "S11|T444"
        if mu == 12:
            return "U12"
        return "unclassified"
    raise SingularityError("corank %r out of range" % (crk,))


# ---------------------------------------------------------------------------
# spectrum and local invariants
# ---------------------------------------------------------------------------

_HALF = Fraction(1, 2)


def _weights_for(label):
    """Weights of the quasi-homogeneous 4-variable normal form (with
    square-suspension weights 1/2), or None if not quasi-homogeneous."""
    if label.startswith("A") and label[1:].isdigit():
        n = int(label[1:])
        return [Fraction(1, n + 1), _HALF, _HALF, _HALF]
    if label.startswith("D") and label[1:].isdigit():
        n = int(label[1:])
        return [Fraction(1, n - 1), Fraction(n - 2, 2 * (n - 1)),
                _HALF, _HALF]
    table = {
        "E6": [Fraction(1, 3), Fraction(1, 4), _HALF, _HALF],
        "E7": [Fraction(1, 3), Fraction(2, 9), _HALF, _HALF],
        "E8": [Fraction(1, 3), Fraction(1, 5), _HALF, _HALF],
        "Q10": [Fraction(1, 3), Fraction(1, 4), Fraction(3, 8), _HALF],
        "S11": [Fraction(1, 4), Fraction(5, 16), Fraction(3, 8), _HALF],
        "U12": [Fraction(1, 3), Fraction(1, 3), Fraction(1, 4), _HALF],
        "T333": [Fraction(1, 3), Fraction(1, 3), Fraction(1, 3), _HALF],
    }
    return table.get(label)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_divexact(num, den):
    num = [Fraction(c) for c in num]
    den = [Fraction(c) for c in den]
    while den and den[-1] == 0:
        den.pop()
    q = [Fraction(0)] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1] / den[-1]
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(c != 0 for c in num):
        raise SingularityError("spectrum generating function did not divide")
    return q


def spectrum(weights):
    """Spectral numbers (with multiplicities) of the quasi-homogeneous germ
    with the given weights: the exponents of prod (t^w - t)/(1 - t^w),
    computed as an exact polynomial identity in s = t^(1/D)."""
    D = math.lcm(*(w.denominator for w in weights))
    num = [Fraction(1)]
    den = [Fraction(1)]
    for w in weights:
        a = int(w * D)
        fn = [Fraction(0)] * (D + 1)
        fn[a] += 1
        fn[D] -= 1
        fd = [Fraction(0)] * (a + 1)
        fd[0] = Fraction(1)
        fd[a] = Fraction(-1)
        num = _poly_mul(num, fn)
        den = _poly_mul(den, fd)
    q = _poly_divexact(num, den)
    out = {}
    for e, c in enumerate(q):
        if c:
            if c != int(c) or c < 0:
                raise SingularityError("non-integral spectrum multiplicity")
            out[Fraction(e, D)] = int(c)
    return out


def local_invariants(label, mu):
    """Local Hodge invariants (b11, l11) of a quasi-homogeneous type.

    Buckets the spectrum by s_p = #{alpha : 3-p < alpha <= 4-p}; then
    b11 = s_1 and l11 = s_2 - s_1, with s_0 = s_3 = 0 enforced.  Returns
    (None, None) for labels without a quasi-homogeneous normal form.
    """
    weights = _weights_for(label)
    if weights is None:
        return None, None
    spec = spectrum(weights)
    if sum(spec.values()) != mu:
        raise SingularityError(
            "spectrum of %s has total %d, expected mu=%d"
            % (label, sum(spec.values()), mu))
    buckets = [0, 0, 0, 0]
    for alpha, m in spec.items():
        for p in range(4):
            if 3 - p < alpha <= 4 - p:
                buckets[p] += m
    s0, s1, s2, s3 = buckets
    if s0 != 0 or s3 != 0:
        raise SingularityError("rational singularity must have s0 = s3 = 0")
    b11, l11 = s1, s2 - s1
    if 2 * b11 + l11 != mu:
        raise SingularityError("2*b11 + l11 != mu for %s" % label)
    return b11, l11


# ---------------------------------------------------------------------------
# full per-point analysis
# ---------------------------------------------------------------------------

def analyze_singularities(f, seed=0, settings=None, cq_irreducible=None):
    """Find all singular points and fill in corank, Milnor number, label and
    local invariants.  Numeric (unreconstructed) points get a numeric corank,
    the path multiplicity as Milnor number, and stay unclassified beyond
    corank 0."""
    points = find_singular_points(f, seed=seed, settings=settings)
    for sp in points:
        if sp.exact:
            g2, _g3 = project(f, sp.location)
            if g2.is_zero():
                # vertex of a cone: no quadratic part, no ADE-type label
                sp.corank = 4
                sp.milnor = milnor_number(f, sp.location)
                sp.label = "cone vertex"
                continue
            sp.corank = corank(f, sp.location)
            sp.milnor = milnor_number(f, sp.location)
            sp.label = classify(f, sp.location, sp.corank, sp.milnor,
                                cq_irreducible=cq_irreducible)
            sp.b11, sp.l11 = local_invariants(sp.label, sp.milnor)
        else:
            sp.corank = corank_numeric(f, sp.location)
            sp.milnor = sp.multiplicity
            sp.label = "A1" if sp.corank == 0 and sp.milnor == 1 \
                else "unclassified"
            if sp.label == "A1":
                sp.b11, sp.l11 = local_invariants("A1", 1)
    return points
