"""Predictor-corrector homotopy continuation for square polynomial systems.

Paths run from a total-degree start system to the target with a random
unit-complex gamma twist.  The predictor is explicit RK4 on the Davidenko
ODE; the corrector is Newton.  Singular endpoints are finished with a Cauchy
(loop-integral) endgame, which also yields cycle numbers, so clusters at
multiple roots land on top of each other.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .forms import Form, LinearChange, substitute


class TrackingError(RuntimeError):
    pass


@dataclass
class TrackerSettings:
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.25
    corrector_tol: float = 1e-10
    max_corrector_iters: int = 3
    divergence_bound: float = 1e8
    endgame_radius: float = 0.01
    max_steps: int = 3000
    cluster_radius: float = 1e-6
    refine_tol: float = 1e-12
    max_failure_fraction: float = 0.5

    def __post_init__(self):
        if not (0 < self.min_step <= self.initial_step <= self.max_step):
            raise ValueError("need 0 < min_step <= initial_step <= max_step")
        if self.corrector_tol <= 0:
            raise ValueError("corrector tolerance must be positive")


# ---------------------------------------------------------------------------
# affine polynomials compiled for fast complex evaluation
# ---------------------------------------------------------------------------

class Poly:
    """Affine polynomial over C: a list of (coefficient, exponent tuple)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms):
        self.nvars = nvars
        self.terms = [(complex(c), tuple(e)) for c, e in terms if c != 0]

    @classmethod
    def from_form(cls, form):
        return cls(form.nvars, [(c, e) for e, c in form.terms.items()])

    @classmethod
    def from_dict(cls, nvars, d):
        return cls(nvars, [(c, e) for e, c in d.items()])

    def degree(self):
        return max((sum(e) for _, e in self.terms), default=0)

    def eval(self, x):
        total = 0j
        for c, e in self.terms:
            m = c
            for xi, ei in zip(x, e):
                if ei == 1:
                    m *= xi
                elif ei:
                    m *= xi ** ei
            total += m
        return total

    def derivative(self, i):
        terms = []
        for c, e in self.terms:
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms.append((c * e[i], tuple(ne)))
        return Poly(self.nvars, terms)


class PolySystem:
    """A square system of affine polynomials in a shared variable set."""

    def __init__(self, equations, nvars=None):
        eqs = []
        for f in equations:
            if isinstance(f, Form):
                eqs.append(Poly.from_form(f))
            else:
                eqs.append(f)
        self.equations = eqs
        self.nvars = nvars if nvars is not None else (
            eqs[0].nvars if eqs else 0)
        for e in eqs:
            if e.nvars != self.nvars:
                raise ValueError("equations in different variable sets")
        self._jac = None

    def __len__(self):
        return len(self.equations)

    def is_square(self):
        return len(self.equations) == self.nvars

    def eval(self, x):
        return [p.eval(x) for p in self.equations]

    def jacobian(self):
        if self._jac is None:
            self._jac = [[p.derivative(i) for i in range(self.nvars)]
                         for p in self.equations]
        return self._jac

    def jac_eval(self, x):
        return [[pij.eval(x) for pij in row] for row in self.jacobian()]

    def degrees(self):
        return [p.degree() for p in self.equations]


def _solve_linear(A, b):
    """Solve a small dense complex linear system in place."""
    n = len(b)
    M = [row[:] + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) < 1e-300:
            raise ZeroDivisionError("singular Jacobian")
        M[col], M[piv] = M[piv], M[col]
        inv = 1.0 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f != 0:
                for c in range(col, n + 1):
                    M[r][c] -= f * M[col][c]
    x = [0j] * n
    for r in range(n - 1, -1, -1):
        s = M[r][n] - sum(M[r][c] * x[c] for c in range(r + 1, n))
        x[r] = s / M[r][r]
    return x


def _norm(v):
    return math.sqrt(sum(abs(c) ** 2 for c in v))


# ---------------------------------------------------------------------------
# start systems
# ---------------------------------------------------------------------------

def total_degree_start(system):
    """Total-degree (Bezout) start system x_i^{d_i} - 1 with all solutions."""
    if not system.is_square():
        raise ValueError("total-degree start needs a square system")
    n = system.nvars
    degrees = system.degrees()
    if any(d < 1 for d in degrees):
        raise ValueError("equations must have positive degree")
    eqs = []
    for i, d in enumerate(degrees):
        e_hi = [0] * n
        e_hi[i] = d
        eqs.append(Poly(n, [(1.0, tuple(e_hi)), (-1.0, (0,) * n)]))
    start = PolySystem(eqs, n)

    roots = [[cmath.exp(2j * math.pi * k / d) for k in range(d)]
             for d in degrees]
    sols = [[]]
    for r in roots:
        sols = [s + [rk] for s in sols for rk in r]
    return start, sols


# ---------------------------------------------------------------------------
# path tracking
# ---------------------------------------------------------------------------

@dataclass
class PathResult:
    status: str                      # converged | diverged | failed | singular
    point: list | None
    s_last: float
    steps: int
    residual: float = math.inf
    cycle: int = 1


class Homotopy:
    """H(x, s) = (1 - s) * gamma * G(x) + s * F(x), tracked from s=0 to 1."""

    def __init__(self, start, target, gamma):
        self.start = start
        self.target = target
        self.gamma = gamma
        self.n = target.nvars

    def eval(self, x, s):
        g = self.start.eval(x)
        f = self.target.eval(x)
        c = (1 - s) * self.gamma
        return [c * gi + s * fi for gi, fi in zip(g, f)]

    def jac(self, x, s):
        jg = self.start.jac_eval(x)
        jf = self.target.jac_eval(x)
        c = (1 - s) * self.gamma
        return [[c * jg[i][j] + s * jf[i][j] for j in range(self.n)]
                for i in range(self.n)]

    def ds_part(self, x):
        g = self.start.eval(x)
        f = self.target.eval(x)
        return [fi - self.gamma * gi for gi, fi in zip(g, f)]


def _newton(h, x, s, tol, max_iters):
    """Newton-correct x on H(., s) = 0.  Returns (x, residual, ok)."""
    res = _norm(h.eval(x, s))
    for _ in range(max_iters):
        if res < tol:
            return x, res, True
        try:
            dx = _solve_linear(h.jac(x, s), [-v for v in h.eval(x, s)])
        except ZeroDivisionError:
            return x, res, False
        x = [xi + di for xi, di in zip(x, dx)]
        res = _norm(h.eval(x, s))
    return x, res, res < tol


def _newton_regular(h, x, s, max_iters=15):
    """Newton with a regularity verdict based on step-norm decay.

    At a regular root the Newton steps collapse quadratically; at a multiple
    root they stall near sqrt(machine eps).  Returns (x, residual, regular).
    """
    scale = max(1.0, _norm(x))
    last_step = math.inf
    for _ in range(max_iters):
        try:
            dx = _solve_linear(h.jac(x, s), [-v for v in h.eval(x, s)])
        except ZeroDivisionError:
            return x, _norm(h.eval(x, s)), False
        x = [xi + di for xi, di in zip(x, dx)]
        step = _norm(dx)
        if step < 1e-11 * scale:
            return x, _norm(h.eval(x, s)), True
        if step > 0.75 * last_step and step > 1e-6 * scale:
            # stalling far from quadratic convergence
            return x, _norm(h.eval(x, s)), False
        last_step = step
    return x, _norm(h.eval(x, s)), False


def _tangent(h, x, s):
    return _solve_linear(h.jac(x, s), [-v for v in h.ds_part(x)])


def _rk4_predict(h, x, s, ds):
    k1 = _tangent(h, x, s)
    x2 = [xi + 0.5 * ds * ki for xi, ki in zip(x, k1)]
    k2 = _tangent(h, x2, s + 0.5 * ds)
    x3 = [xi + 0.5 * ds * ki for xi, ki in zip(x, k2)]
    k3 = _tangent(h, x3, s + 0.5 * ds)
    x4 = [xi + ds * ki for xi, ki in zip(x, k3)]
    k4 = _tangent(h, x4, s + ds)
    return [xi + ds / 6.0 * (a + 2 * b + 2 * c + d)
            for xi, a, b, c, d in zip(x, k1, k2, k3, k4)]


def _cauchy_endgame(h, x, s, settings, record=None):
    """Loop-integral endgame around s=1 starting on the circle |1-s| = r.

    Averages samples over full loops; the mean of the Puiseux expansion over
    c complete loops is exactly the endpoint, so multiple roots are hit to
    corrector accuracy.  Returns (point, cycle) or None.
    """
    r = 1.0 - s
    narcs = 32
    samples = []
    x0 = list(x)
    scale = max(1.0, _norm(x0))
    cycles = 0
    cur = list(x)
    while cycles < 8:
        for k in range(narcs):
            th0 = 2 * math.pi * (cycles + k / narcs)
            th1 = 2 * math.pi * (cycles + (k + 1) / narcs)
            s0 = 1.0 - r * cmath.exp(1j * th0)
            s1 = 1.0 - r * cmath.exp(1j * th1)
            # Euler predictor along the arc, then Newton at s1
            try:
                t = _tangent(h, cur, s0)
            except ZeroDivisionError:
                return None
            cur = [xi + ti * (s1 - s0) for xi, ti in zip(cur, t)]
            cur, res, ok = _newton(h, cur, s1, settings.corrector_tol * 100, 20)
            if not ok:
                return None
            samples.append(list(cur))
            if record is not None:
                record.append(list(cur))
        cycles += 1
        if _norm([a - b for a, b in zip(cur, x0)]) < 1e-5 * scale:
            break
    else:
        return None
    mean = [sum(p[i] for p in samples) / len(samples)
            for i in range(len(x0))]
    return mean, cycles


def track(homotopy, start_solution, settings=None, record=None):
    """Track one path of the homotopy from s=0 to s=1.

    Returns a PathResult whose status is ``converged`` (regular endpoint),
    ``singular`` (finished by the endgame), ``diverged`` or ``failed``.
    If ``record`` is a list, accepted intermediate points are appended to
    it.
    """
    settings = settings or TrackerSettings()
    h = homotopy
    x = [complex(c) for c in start_solution]
    x, res, ok = _newton(h, x, 0.0, settings.corrector_tol,
                         settings.max_corrector_iters + 3)
    if not ok:
        raise TrackingError("start point does not satisfy the start system")
    s = 0.0
    ds = settings.initial_step
    steps = 0
    streak = 0
    s_end = 1.0 - settings.endgame_radius
    while steps < settings.max_steps:
        steps += 1
        target_s = min(s_end, s + ds)
        try:
            xp = _rk4_predict(h, x, s, target_s - s)
            xc, res, ok = _newton(h, xp, target_s, settings.corrector_tol,
                                  settings.max_corrector_iters)
        except ZeroDivisionError:
            ok = False
        if ok and _norm(xc) > settings.divergence_bound:
            return PathResult("diverged", None, target_s, steps)
        if ok:
            x, s = xc, target_s
            if record is not None:
                record.append(list(x))
            if s >= s_end:
                return _finish_path(h, x, s, steps, settings, record)
            streak += 1
            if streak >= 4:
                ds = min(ds * 2, settings.max_step)
                streak = 0
        else:
            ds *= 0.5
            streak = 0
            if ds < settings.min_step:
                if s > 1.0 - 50 * settings.endgame_radius:
                    return _finish_path(h, x, s, steps, settings, record)
                return PathResult("failed", x, s, steps)
    return PathResult("failed", x, s, steps)


def _finish_path(h, x, s, steps, settings, record):
    """Finish a path sitting at s (inside the endgame zone) to s=1."""
    # Regular endpoints: step toward s=1, halving the remaining gap, and at
    # each stop attempt an RK4-predicted jump to 1 with a regularity-tested
    # Newton finish.
    cur, cur_s = list(x), s
    while 1.0 - cur_s > 1e-8:
        try:
            xp = _rk4_predict(h, cur, cur_s, 1.0 - cur_s)
            xj, resj, regular = _newton_regular(h, xp, 1.0)
        except ZeroDivisionError:
            break
        if regular:
            # guard against basin jumping: the Newton correction must be
            # small next to the predictor step, else come closer first
            move = _norm([a - b for a, b in zip(xp, cur)])
            corr = _norm([a - b for a, b in zip(xj, xp)])
            if corr <= 0.25 * move + 1e-9 * max(1.0, _norm(cur)):
                if _norm(xj) > settings.divergence_bound:
                    return PathResult("diverged", None, 1.0, steps)
                if record is not None:
                    record.append(list(xj))
                return PathResult("converged", xj, 1.0, steps, residual=resj)
        mid = cur_s + (1.0 - cur_s) / 2
        try:
            xp = _rk4_predict(h, cur, cur_s, mid - cur_s)
            xm, _res, ok = _newton(h, xp, mid, settings.corrector_tol,
                                   settings.max_corrector_iters + 2)
        except ZeroDivisionError:
            ok = False
        if not ok:
            break
        cur, cur_s = xm, mid
    if _norm(x) > 1e-4 * settings.divergence_bound:
        return PathResult("diverged", None, s, steps)
    # Cauchy endgame from the original endgame boundary, validated by
    # agreement across shrinking radii (a too-large circle can enclose extra
    # branch points and give a wrong but internally consistent mean).
    cur, cur_s = list(x), s
    prev = None
    for _ in range(5):
        eg = _cauchy_endgame(h, cur, cur_s, settings, record=record)
        if eg is not None:
            pt, cyc = eg
            scale = max(1.0, _norm(pt))
            if prev is not None and \
                    _norm([a - b for a, b in zip(pt, prev[0])]) < 1e-7 * scale:
                if _norm(pt) > settings.divergence_bound:
                    return PathResult("diverged", None, cur_s, steps)
                res = _norm(h.eval(pt, 1.0))
                if res > 1e-6 * scale:
                    return PathResult("failed", pt, cur_s, steps)
                return PathResult("singular", pt, 1.0, steps,
                                  residual=res, cycle=cyc)
            prev = (pt, cyc)
        # shrink the endgame circle and retry
        new_s = 1.0 - (1.0 - cur_s) / 4.0
        try:
            xp = _rk4_predict(h, cur, cur_s, new_s - cur_s)
            cur, _, ok = _newton(h, xp, new_s, settings.corrector_tol * 100, 20)
        except ZeroDivisionError:
            ok = False
        if not ok:
            break
        cur_s = new_s
    return PathResult("failed", x, s, steps)


# ---------------------------------------------------------------------------
# solve_all and clustering
# ---------------------------------------------------------------------------

@dataclass
class Solution:
    point: list
    multiplicity: int
    residual: float
    singular: bool = False


def _cluster(points, radius):
    """Union-find clustering of points at pairwise distance < radius."""
    n = len(points)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            d = _norm([a - b for a, b in zip(points[i], points[j])])
            scale = max(1.0, _norm(points[i]))
            if d < radius * scale:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def solve_all(system, settings=None, seed=0):
    """All isolated solutions of a square affine system, with multiplicity.

    Tracks every total-degree path with a fresh random gamma, clusters the
    endpoints (cluster size = multiplicity) and Newton-refines regular
    representatives.  Deterministic for a given seed.
    """
    settings = settings or TrackerSettings()
    if not system.is_square():
        raise ValueError("solve_all needs a square system")
    rng = random.Random(seed)
    start, starts = total_degree_start(system)
    gamma = cmath.exp(2j * math.pi * rng.random())
    h = Homotopy(start, system, gamma)
    endpoints = []
    singular_flags = []
    failures = 0
    for s0 in starts:
        r = track(h, s0, settings)
        if r.status in ("converged", "singular"):
            endpoints.append(r.point)
            singular_flags.append(r.status == "singular" or r.cycle > 1)
        elif r.status == "diverged":
            pass
        else:
            failures += 1
    if starts and failures > settings.max_failure_fraction * len(starts):
        raise TrackingError(
            "%d of %d paths failed to track" % (failures, len(starts)))
    sols = []
    for group in _cluster(endpoints, settings.cluster_radius):
        pts = [endpoints[i] for i in group]
        singular = any(singular_flags[i] for i in group) or len(group) > 1
        rep = [sum(p[i] for p in pts) / len(pts) for i in range(system.nvars)]
        if not singular:
            rep, res, _ = _newton(Homotopy(start, system, gamma), rep, 1.0,
                                  settings.refine_tol, 6)
        res = _norm(system.eval(rep))
        sols.append(Solution(rep, len(group), res, singular))
    sols.sort(key=lambda s: tuple((round(c.real, 8), round(c.imag, 8))
                                  for c in s.point))
    return sols, failures


# ---------------------------------------------------------------------------
# projective wrappers
# ---------------------------------------------------------------------------

def normalize_projective(coords):
    """Scale so the largest-modulus coordinate is exactly 1."""
    j = max(range(len(coords)), key=lambda i: abs(coords[i]))
    piv = coords[j]
    if piv == 0:
        raise ValueError("zero point")
    return [c / piv for c in coords]


def projective_distance(a, b):
    """Fubini-Study style distance: sqrt(1 - |<a,b>|^2 / (|a||b|)^2)."""
    na = _norm(a)
    nb = _norm(b)
    inner = abs(sum(ai * bi.conjugate() for ai, bi in zip(a, b)))
    val = 1.0 - (inner / (na * nb)) ** 2
    return math.sqrt(max(val, 0.0))


def random_rational_patch(nvars, rng, bound=20):
    """An exact invertible change whose last new coordinate is a random
    rational linear form; setting it to 1 is the affine patch."""
    while True:
        rows = [[Fraction(rng.randint(-bound, bound)) for _ in range(nvars)]
                for _ in range(nvars)]
        try:
            return LinearChange(rows)
        except Exception:
            continue


def dehomogenize_on_patch(forms, patch):
    """Restrict homogeneous forms to the affine patch (last new coord = 1).

    patch is a LinearChange S giving new coordinates z = S x; we substitute
    x = S^{-1} z and set z_{n-1} = 1, producing affine Polys in n-1 vars.
    """
    Sinv = patch.inverse()
    out = []
    n = forms[0].nvars
    for f in forms:
        g = substitute(f, Sinv)
        terms = {}
        for e, c in g.terms.items():
            key = e[:-1]
            terms[key] = terms.get(key, 0) + c
        out.append(Poly.from_dict(n - 1, terms))
    return out


def patch_point_to_projective(z, patch):
    """Lift an affine patch point back to (normalized) projective coords."""
    Sinv = patch.inverse()
    zfull = list(z) + [1.0]
    x = [sum(complex(Sinv.matrix[i][j]) * zfull[j] for j in range(len(zfull)))
         for i in range(len(zfull))]
    return normalize_projective(x)


def solve_projective(forms, settings=None, seed=0, npatches=2,
                     randomize_to=None):
    """Isolated projective solutions of a system of forms.

    Tracks on ``npatches`` random rational affine patches and merges the
    normalized endpoints projectively (multiplicity = max over patches).  If
    ``randomize_to`` is given, that many random rational combinations of the
    forms are solved instead and every endpoint is verified against the full
    system.
    """
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    n = forms[0].nvars
    merged = []      # list of [coords, multiplicity, residual, singular]
    for _ in range(npatches):
        # an unlucky patch (or randomization) can lose too many paths;
        # redraw it rather than failing the whole solve
        for attempt in range(4):
            patch = random_rational_patch(n, rng)
            eqs = forms
            if randomize_to is not None:
                eqs = []
                for _ in range(randomize_to):
                    combo = Form.zero(n, forms[0].degree)
                    for f in forms:
                        combo = combo + f.scale(Fraction(rng.randint(1, 50)))
                    eqs.append(combo)
                if len({f.degree for f in forms}) != 1:
                    raise ValueError("randomization needs equal degrees")
            polys = dehomogenize_on_patch(eqs, patch)
            system = PolySystem(polys, n - 1)
            try:
                sols, _ = solve_all(system, settings,
                                    seed=rng.randrange(2 ** 30))
                break
            except TrackingError:
                if attempt == 3:
                    raise
        for s in sols:
            pt = patch_point_to_projective(s.point, patch)
            res = _norm([f.evaluate(pt) for f in forms])
            if randomize_to is not None and res > 1e-6:
                continue   # endpoint of the randomized system only
            for m in merged:
                if projective_distance(m[0], pt) < 1e-6:
                    m[1] = max(m[1], s.multiplicity)
                    if res < m[2]:
                        m[0], m[2] = pt, res
                    m[3] = m[3] or s.singular
                    break
            else:
                merged.append([pt, s.multiplicity, res, s.singular])
    return [Solution(m[0], m[1], m[2], m[3]) for m in merged]


# ---------------------------------------------------------------------------
# rational reconstruction
# ---------------------------------------------------------------------------

def rational_reconstruct(coords, bound, system=None, tol=1e-6):
    """Reconstruct an exact rational projective point from a numeric one.

    Each coordinate ratio is replaced by its best continued-fraction
    approximant with denominator <= bound.  Verification: exact vanishing on
    ``system`` (a list of Forms) when given, otherwise proximity within
    ``tol``.  Returns a list of Fractions or None.
    """
    j = max(range(len(coords)), key=lambda i: abs(complex(coords[i])))
    piv = complex(coords[j])
    if piv == 0:
        return None
    normalized = [complex(c) / piv for c in coords]
    recon = []
    for c in normalized:
        if abs(c.imag) > tol:
            return None
        recon.append(Fraction(c.real).limit_denominator(bound))
    if system is not None:
        for f in system:
            if f.evaluate_exact(recon) != 0:
                return None
    else:
        err = math.sqrt(sum(abs(complex(r) - c) ** 2
                            for r, c in zip(recon, normalized)))
        if err > tol:
            return None
    return primitive_point(recon)


def primitive_point(coords):
    """Canonical integer representative of a rational projective point."""
    fracs = [Fraction(c) for c in coords]
    lcm = 1
    for f in fracs:
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    ints = [f * lcm for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, int(v.numerator))
    if g:
        ints = [v / g for v in ints]
    lead = next((v for v in ints if v != 0), Fraction(1))
    if lead < 0:
        ints = [-v for v in ints]
    return ints
