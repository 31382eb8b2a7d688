"""Sparse homogeneous forms with exact rational coefficients.

Everything downstream (projection, corank, cone tests) is built on exact
arithmetic; floating point only enters at evaluation boundaries.  A Form may
also carry complex coefficients (used for numerically sampled lines), in
which case the exact-only operations refuse it.
"""

from __future__ import annotations

import re
from fractions import Fraction


class FormError(ValueError):
    pass


class ParseError(FormError):
    pass


def _is_exact(c):
    return isinstance(c, (Fraction, int))


class Form:
    """A homogeneous polynomial, stored as {exponent tuple: coefficient}.

    Exponent tuples have length ``nvars`` and all sum to ``degree``.  Zero
    coefficients are never stored, so equality is structural.  Instances are
    treated as immutable.
    """

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars, terms, degree=None):
        clean = {}
        deg = degree
        for exps, c in terms.items():
            if c == 0:
                continue
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise FormError("bad exponent vector %r" % (exps,))
            d = sum(exps)
            if deg is None:
                deg = d
            elif d != deg:
                raise FormError(
                    "inhomogeneous terms: degree %d term %r in a degree-%d form"
                    % (d, exps, deg))
            clean[exps] = Fraction(c) if isinstance(c, int) else c
        self.nvars = nvars
        self.degree = 0 if deg is None else deg
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, nvars, degree=0):
        return cls(nvars, {}, degree=degree)

    @classmethod
    def monomial(cls, nvars, exps, coeff=1):
        return cls(nvars, {tuple(exps): coeff})

    @classmethod
    def variable(cls, i, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear(cls, coeffs):
        """Linear form sum(coeffs[i] * x_i)."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls(n, terms, degree=1)

    # -- predicates ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_exact(self):
        return all(_is_exact(c) for c in self.terms.values())

    # -- arithmetic ---------------------------------------------------------

    def _check_compatible(self, other):
        if self.nvars != other.nvars:
            raise FormError("variable count mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise FormError("cannot add forms of degrees %d and %d"
                            % (self.degree, other.degree))
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Form(self.nvars, terms, degree=self.degree)

    def __neg__(self):
        return Form(self.nvars, {e: -c for e, c in self.terms.items()},
                    degree=self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Form):
            return self.scale(other)
        self._check_compatible(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Form(self.nvars, terms, degree=self.degree + other.degree)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        if c == 0:
            return Form.zero(self.nvars, self.degree)
        c = Fraction(c) if isinstance(c, int) else c
        return Form(self.nvars, {e: c * v for e, v in self.terms.items()},
                    degree=self.degree)

    def __pow__(self, k):
        if k < 0:
            raise FormError("negative power")
        out = Form(self.nvars, {(0,) * self.nvars: 1}, degree=0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, Form) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, self.canonical_items()))

    def canonical_items(self):
        """Terms in graded-lexicographic order (largest first)."""
        return tuple(sorted(self.terms.items(),
                            key=lambda t: (-sum(t[0]), tuple(-e for e in t[0]))))

    # -- calculus / evaluation ----------------------------------------------

    def derivative(self, i):
        terms = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
        deg = max(self.degree - 1, 0)
        return Form(self.nvars, terms, degree=deg)

    def gradient(self):
        """All partial derivatives.  Satisfies the Euler identity."""
        if self.degree < 1:
            raise FormError("gradient needs degree >= 1")
        return [self.derivative(i) for i in range(self.nvars)]

    def evaluate(self, coords):
        """Floating complex evaluation at a point (sequence of numbers)."""
        if len(coords) != self.nvars:
            raise FormError("point has %d coordinates, form has %d variables"
                            % (len(coords), self.nvars))
        x = [complex(c) for c in coords]
        total = 0j
        for e, c in self.terms.items():
            m = complex(c)
            for xi, ei in zip(x, e):
                if ei == 1:
                    m *= xi
                elif ei:
                    m *= xi ** ei
            total += m
        return total

    def evaluate_exact(self, coords):
        """Exact evaluation at rational coordinates."""
        total = Fraction(0)
        for e, c in self.terms.items():
            m = Fraction(c)
            for xi, ei in zip(coords, e):
                if ei:
                    m *= Fraction(xi) ** ei
            total += m
        return total

    # -- printing -----------------------------------------------------------

    def __repr__(self):
        return "Form(%s)" % self.to_string()

    def to_string(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.canonical_items():
            factors = []
            for i, ei in enumerate(e):
                if ei == 1:
                    factors.append("x%d" % i)
                elif ei:
                    factors.append("x%d^%d" % (i, ei))
            if isinstance(c, Fraction):
                cs = str(c)
            else:
                cs = repr(c)
            if factors and c == 1:
                body = "*".join(factors)
            elif factors and c == -1:
                body = "-" + "*".join(factors)
            else:
                body = "*".join([cs] + factors)
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


_TERM_SPLIT = re.compile(r"(?<![\^*/])[+-]")
_FACTOR = re.compile(
    r"^(?:(?P<num>\d+(?:/\d+)?)|x(?P<var>\d+)(?:\^(?P<pow>\d+))?)$")


def parse_form(text, nvars=5):
    """Parse the text polynomial grammar, e.g. ``3/2*x0^2*x4 - x3^3``.

    Whitespace-insensitive.  Raises ParseError on malformed input and on
    inhomogeneous polynomials, reporting the offending term.
    """
    s = re.sub(r"\s+", "", text).replace("**", "^")
    if not s:
        raise ParseError("empty polynomial")
    # split into signed terms at top-level + and -
    terms_text = []
    start = 0
    for i in range(1, len(s)):
        if s[i] in "+-" and s[i - 1] not in "+-*/^":
            terms_text.append(s[start:i])
            start = i
    terms_text.append(s[start:])

    terms = {}
    degree = None
    for raw in terms_text:
        t = raw
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        if not t:
            raise ParseError("dangling sign in %r" % raw)
        coeff = Fraction(sign)
        exps = [0] * nvars
        for factor in t.split("*"):
            m = _FACTOR.match(factor)
            if not m:
                raise ParseError("bad factor %r in term %r" % (factor, raw))
            if m.group("num") is not None:
                coeff *= Fraction(m.group("num"))
            else:
                v = int(m.group("var"))
                if v >= nvars:
                    raise ParseError(
                        "variable x%d out of range in term %r (nvars=%d)"
                        % (v, raw, nvars))
                exps[v] += int(m.group("pow") or 1)
        d = sum(exps)
        if degree is None:
            degree = d
        elif d != degree:
            raise ParseError(
                "inhomogeneous input: term %r has degree %d, expected %d"
                % (raw, d, degree))
        key = tuple(exps)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Form(nvars, terms, degree=degree)


# ---------------------------------------------------------------------------
# exact rational linear algebra
# ---------------------------------------------------------------------------

def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_det(M):
    """Determinant by fraction Gaussian elimination (exact for Fractions)."""
    n = len(M)
    A = [list(row) for row in M]
    det = Fraction(1) if all(_is_exact(c) for row in A for c in row) else 1.0
    for col in range(n):
        piv = None
        for r in range(col, n):
            if A[r][col] != 0:
                piv = r
                break
        if piv is None:
            return 0 * det
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        inv = 1 / Fraction(A[col][col]) if _is_exact(A[col][col]) else 1 / A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] * inv
            if f == 0:
                continue
            for c in range(col, n):
                A[r][c] -= f * A[col][c]
    return det


def mat_inv(M):
    n = len(M)
    A = [[Fraction(M[i][j]) if _is_exact(M[i][j]) else M[i][j]
          for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if A[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise FormError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def rank_exact(M):
    """Rank of a rational matrix by exact Gaussian elimination."""
    if not M:
        return 0
    rows = [[Fraction(c) for c in row] for row in M]
    ncols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < ncols:
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        for r in range(rank + 1, len(rows)):
            if rows[r][col] != 0:
                f = rows[r][col] * inv
                for c in range(col, ncols):
                    rows[r][c] -= f * rows[rank][c]
        rank += 1
        col += 1
    return rank


def nullspace_exact(M):
    """Basis of the right nullspace of a rational matrix."""
    if not M:
        return []
    nrows, ncols = len(M), len(M[0])
    rows = [[Fraction(c) for c in row] for row in M]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, nrows):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [v * inv for v in rows[rank]]
        for r in range(nrows):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


class LinearChange:
    """An invertible exact linear change of coordinates x -> M x."""

    def __init__(self, matrix):
        self.matrix = [list(row) for row in matrix]
        self.n = len(self.matrix)
        if mat_det(self.matrix) == 0:
            raise FormError("singular linear change")

    @classmethod
    def identity(cls, n):
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def swap(cls, i, j, n):
        M = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
        M[i][i] = M[j][j] = Fraction(0)
        M[i][j] = M[j][i] = Fraction(1)
        return cls(M)

    @classmethod
    def from_columns(cls, cols):
        n = len(cols[0])
        return cls([[cols[j][i] for j in range(len(cols))] for i in range(n)])

    def inverse(self):
        return LinearChange(mat_inv(self.matrix))

    def compose(self, other):
        """self after other: (self.compose(other)) x = self(other(x))."""
        return LinearChange(mat_mul(self.matrix, other.matrix))

    def column(self, j):
        return [self.matrix[i][j] for i in range(self.n)]


def substitute(f, T):
    """The pullback f(T x): substitute x_i -> sum_j T[i][j] x_j."""
    if isinstance(T, LinearChange):
        M = T.matrix
    else:
        M = T
    n = f.nvars
    if len(M) != n:
        raise FormError("linear change size mismatch")
    lin = [Form.linear(M[i]) for i in range(n)]
    powers = [{0: None} for _ in range(n)]
    out = Form.zero(n, f.degree)
    one = Form(n, {(0,) * n: 1}, degree=0)
    for e, c in f.terms.items():
        term = one.scale(c)
        for i, ei in enumerate(e):
            if ei == 0:
                continue
            cache = powers[i]
            if ei not in cache:
                cache[ei] = lin[i] ** ei
            term = term * cache[ei]
        out = term if out.is_zero() else out + term
    return out


def point_to_last_coordinate(q, n=None):
    """An exact LinearChange T with T e_{n-1} = q.

    Moving the rational projective point ``q`` to [0:...:0:1]: columns are a
    basis completing q, with q as the last column.
    """
    q = [Fraction(c) for c in q]
    n = n or len(q)
    piv = max(range(n), key=lambda i: (q[i] != 0, -i))
    if q[piv] == 0:
        raise FormError("zero point")
    cols = []
    for j in range(n):
        if j == piv:
            continue
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        cols.append(e)
    cols.append(q)
    return LinearChange.from_columns(cols)


# ---------------------------------------------------------------------------
# quadrics and cones
# ---------------------------------------------------------------------------

def quad_matrix(g):
    """Symmetric matrix M with g(x) = x^T M x, for a quadratic form g."""
    if g.degree != 2:
        raise FormError("quad_matrix needs a degree-2 form, got degree %d"
                        % g.degree)
    n = g.nvars
    M = [[Fraction(0)] * n for _ in range(n)]
    for e, c in g.terms.items():
        idx = [i for i, ei in enumerate(e) if ei]
        if len(idx) == 1:
            M[idx[0]][idx[0]] = Fraction(c)
        else:
            i, j = idx
            M[i][j] = M[j][i] = Fraction(c) / 2
    return M


class ConeVerdict:
    """Result of the cone test: f is a cone iff vertex_dim >= 1."""

    def __init__(self, vertex_dim, vertex_basis):
        self.vertex_dim = vertex_dim
        self.vertex_basis = vertex_basis

    @property
    def is_cone(self):
        return self.vertex_dim >= 1

    def __repr__(self):
        return "ConeVerdict(vertex_dim=%d)" % self.vertex_dim


def cone_test(f):
    """Detect cones: directions v with v . grad(f) = 0 identically.

    Returns the vertex dimension r = n - rank(span of partials); r >= 1
    means f is a cone with vertex the projectivised common kernel.
    """
    if f.is_zero():
        raise FormError("zero form")
    n = f.nvars
    partials = f.gradient()
    monos = sorted({e for p in partials for e in p.terms})
    # rows indexed by monomials, columns by variables: entry = coeff of
    # monomial in partial i; the left kernel in the variable index is the
    # vertex space.
    M = [[Fraction(partials[i].terms.get(e, 0)) for i in range(n)]
         for e in monos]
    basis = nullspace_exact(M)
    return ConeVerdict(len(basis), basis)
