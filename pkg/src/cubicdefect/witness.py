"""Numerical irreducible decomposition of curves via witness sets.

A curve in P^{n-1} cut out by n-2 forms is sliced by a generic rational
hyperplane, giving deg-many witness points.  Monodromy loops in slice space
group the points by irreducible component, and a linear trace test certifies
each group as a complete component.  The component count k feeds the defect
formula.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .forms import Form, quad_matrix, rank_exact
from .tracker import (
    Homotopy,
    PolySystem,
    TrackerSettings,
    TrackingError,
    dehomogenize_on_patch,
    patch_point_to_projective,
    random_rational_patch,
    solve_all,
    track,
)


class WitnessError(RuntimeError):
    pass


def _vnorm(v):
    return math.sqrt(sum(abs(c) ** 2 for c in v))


def _vdist(a, b):
    return _vnorm([x - y for x, y in zip(a, b)])


@dataclass
class WitnessSet:
    """Witness points of a curve on a fixed affine patch."""

    equations: list                 # Forms cutting out the curve in P^{n-1}
    slice_form: Form                # the generic rational hyperplane
    patch: object                   # LinearChange; last new coordinate = 1
    points: list                    # affine complex points on the patch
    degree: int                     # = len(points) = product of degrees
    seed: int

    def projective_points(self):
        return [patch_point_to_projective(p, self.patch)
                for p in self.points]


@dataclass
class ComponentPartition:
    """Partition of witness points into certified irreducible components."""

    blocks: list                    # lists of witness-point indices
    degrees: list                   # per-block degree (= block size)
    trace_passed: list              # per-block trace-test certificate
    loops_used: int
    stabilized: bool
    seed: int

    @property
    def k(self):
        return len(self.blocks)

    @property
    def certified(self):
        return self.stabilized and all(self.trace_passed)


def expected_degree(equations):
    d = 1
    for f in equations:
        d *= f.degree
    return d


def witness_points(equations, seed=0, settings=None, attempts=10):
    """Slice the curve V(equations) with a generic rational hyperplane.

    Solves {equations, slice} on a random rational patch and demands the
    full Bezout count of distinct simple points; degenerate slices (through
    singular points of the curve) are redrawn.
    """
    n = equations[0].nvars
    expect = expected_degree(equations)
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    for _ in range(attempts):
        coeffs = [Fraction(rng.randint(-30, 30)) for _ in range(n)]
        if all(c == 0 for c in coeffs):
            continue
        slice_form = Form.linear(coeffs)
        patch = random_rational_patch(n, rng)
        polys = dehomogenize_on_patch(list(equations) + [slice_form], patch)
        system = PolySystem(polys, n - 1)
        try:
            sols, _fails = solve_all(system, settings,
                                     seed=rng.randrange(2 ** 30))
        except TrackingError:
            continue
        if len(sols) != expect:
            continue
        if any(s.multiplicity != 1 or s.residual > 1e-8 for s in sols):
            continue
        pts = [s.point for s in sols]
        if any(_vnorm(p) > 1e6 for p in pts):
            continue
        if any(_vdist(pts[i], pts[j]) < 1e-4
               for i in range(len(pts)) for j in range(i + 1, len(pts))):
            continue
        return WitnessSet(list(equations), slice_form, patch, pts,
                          expect, seed)
    raise WitnessError(
        "could not slice the curve into %d distinct simple witness points; "
        "non-reduced or positive-dimensional excess" % expect)


def _random_complex_slice(n, rng):
    coeffs = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(n)]
    return Form.linear(coeffs)


def track_slice_segment(curve_polys, slice_a, slice_b, points, gamma,
                        settings, record=False):
    """Track witness points as the slice moves from a to b.

    slice_a/slice_b are affine Polys on the shared patch; the homotopy's
    gamma twist makes the interior slice path a random complex arc.
    Returns (endpoints, paths) or None on any tracking failure; paths are
    the accepted intermediate points when record is set, else None.
    """
    n = curve_polys[0].nvars
    start = PolySystem(curve_polys + [slice_a], n)
    target = PolySystem(curve_polys + [slice_b], n)
    h = Homotopy(start, target, gamma)
    endpoints = []
    paths = [] if record else None
    for p in points:
        rec = [list(p)] if record else None
        try:
            r = track(h, p, settings, record=rec)
        except TrackingError:
            return None
        if r.status != "converged":
            return None
        endpoints.append(r.point)
        if record:
            paths.append(rec)
    return endpoints, paths


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True

    def blocks(self):
        groups = {}
        for i in range(len(self.parent)):
            groups.setdefault(self.find(i), []).append(i)
        return sorted(groups.values(), key=lambda b: (len(b), b))


def monodromy_loop(w, rng, settings, record=False):
    """One random triangle loop in slice space.

    Tracks all witness points base -> L1 -> L2 -> base and matches the
    endpoints back to the start points.  Returns the permutation (and the
    per-point concatenated paths when record is set), or None if tracking
    failed or the matching is not a clean bijection.
    """
    n = w.equations[0].nvars
    curve_polys = dehomogenize_on_patch(w.equations, w.patch)
    base = dehomogenize_on_patch([w.slice_form], w.patch)[0]
    s1 = dehomogenize_on_patch([_random_complex_slice(n, rng)], w.patch)[0]
    s2 = dehomogenize_on_patch([_random_complex_slice(n, rng)], w.patch)[0]
    pts = w.points
    full_paths = [[] for _ in pts] if record else None
    for sa, sb in ((base, s1), (s1, s2), (s2, base)):
        gamma = cmath.exp(2j * math.pi * rng.random())
        seg = track_slice_segment(curve_polys, sa, sb, pts, gamma, settings,
                                  record=record)
        if seg is None:
            return None
        pts, paths = seg
        if record:
            for i, path in enumerate(paths):
                full_paths[i].extend(path)
    # match endpoints back to the start points
    perm = []
    for p in pts:
        dists = [_vdist(p, q) for q in w.points]
        j = min(range(len(dists)), key=dists.__getitem__)
        scale = max(1.0, _vnorm(w.points[j]))
        if dists[j] > 1e-4 * scale:
            return None
        perm.append(j)
    if len(set(perm)) != len(perm):
        return None
    if record:
        for i, path in enumerate(full_paths):
            path.append(list(pts[i]))
        return perm, full_paths
    return perm, None


def monodromy_partition(w, maxloops=50, seed=0, settings=None):
    """Group witness points into components by monodromy.

    Random triangle loops only merge orbits; the partition is returned once
    5 consecutive loops cause no refinement change (or maxloops is hit, in
    which case the 'stabilized' flag is cleared).  Every block is then
    trace-certified.
    """
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    dsu = _DSU(len(w.points))
    loops = 0
    quiet = 0
    attempts = 0
    trace_cache = {}

    def traces(blocks):
        out = []
        for b in blocks:
            key = tuple(b)
            if key not in trace_cache:
                trace_cache[key] = trace_test(b, w, settings=settings,
                                              seed=seed + 1)
            out.append(trace_cache[key])
        return out

    stabilized = False
    while loops < maxloops:
        blocks = dsu.blocks()
        if len(blocks) == 1:
            stabilized = True
            break
        if quiet >= 5:
            # the trace test backstops missed merges: a failing block means
            # the orbit is incomplete, so keep looping
            if all(traces(blocks)):
                stabilized = True
                break
            quiet = 0
        attempts += 1
        if attempts > 3 * maxloops:
            break
        out = monodromy_loop(w, rng, settings)
        if out is None:
            continue
        perm, _ = out
        loops += 1
        merged = False
        for i, j in enumerate(perm):
            merged = dsu.union(i, j) or merged
        quiet = 0 if merged else quiet + 1
    blocks = dsu.blocks()
    passed = traces(blocks)
    stabilized = stabilized or len(blocks) == 1
    return ComponentPartition(blocks, [len(b) for b in blocks], passed,
                              loops, stabilized, seed)


def trace_test(block, w, settings=None, seed=0, tol=1e-6):
    """Linear trace test: is the block a complete component?

    Moves the slice in a parallel pencil (constant term only, realized by
    adding multiples of the patch's hyperplane at infinity) and checks that
    the sum of the block's points is affine-linear in the pencil parameter:
    second difference relatively below tol.
    """
    settings = settings or TrackerSettings()
    rng = random.Random(seed)
    n = w.equations[0].nvars
    curve_polys = dehomogenize_on_patch(w.equations, w.patch)
    base = dehomogenize_on_patch([w.slice_form], w.patch)[0]
    # this form dehomogenizes to the constant 1 on the patch, so adding
    # t * shift moves the affine slice parallel to itself
    shift = Form.linear([complex(c) for c in w.patch.matrix[n - 1]])
    pts0 = [w.points[i] for i in block]
    # a shorter pencil step is retried when paths fail to track; linearity
    # of the trace (second difference 0) does not depend on the step size
    for step in (1.0, 0.5, 0.25):
        traces = {0.0: [sum(p[i] for p in pts0) for i in range(n - 1)]}
        for t in (-step, step):
            moved = w.slice_form + shift.scale(t)
            target = dehomogenize_on_patch([moved], w.patch)[0]
            for _ in range(3):   # retry with fresh gamma on failure
                gamma = cmath.exp(2j * math.pi * rng.random())
                seg = track_slice_segment(curve_polys, base, target, pts0,
                                          gamma, settings)
                if seg is not None:
                    break
            else:
                break
            pts, _ = seg
            traces[t] = [sum(p[i] for p in pts) for i in range(n - 1)]
        else:
            second = [traces[-step][i] - 2 * traces[0.0][i] + traces[step][i]
                      for i in range(n - 1)]
            scale = max(1.0, max(_vnorm(v) for v in traces.values()))
            return _vnorm(second) / scale < tol
    return False


def curve_components(equations, seed=0, maxloops=50, settings=None):
    """Witness decomposition of the curve V(equations): (witness, partition)."""
    w = witness_points(equations, seed=seed, settings=settings)
    part = monodromy_partition(w, maxloops=maxloops, seed=seed + 1,
                               settings=settings)
    return w, part


# ---------------------------------------------------------------------------
# multiplicity structure of the quadric Q_q
# ---------------------------------------------------------------------------

_QUADRIC_LABELS = {
    1: "double plane",
    2: "two distinct planes",
    3: "quadric cone",
    4: "smooth quadric",
}


@dataclass
class QuadricClass:
    rank: int
    label: str
    line_form: Form = None      # ell with g2 proportional to ell^2 (rank 1)

    @property
    def nonreduced(self):
        return self.rank == 1


def detect_nonreduced(g2):
    """Exact multiplicity structure of the quadric V(g2) in P^3.

    Rank 1 means a double plane: the curve is non-reduced and component
    counting must proceed on the reduced plane cubic V(ell, g3); the square
    root ell of g2 is extracted and returned.
    """
    if g2.is_zero():
        raise WitnessError("g2 vanishes identically: not isolated / cone")
    M = quad_matrix(g2)
    r = rank_exact(M)
    ell = None
    if r == 1:
        i = next(i for i in range(len(M)) if M[i][i] != 0)
        ell = Form.linear(list(M[i]))
        if ell * ell != g2.scale(M[i][i]):
            raise WitnessError("rank-1 quadric is not a perfect square")
    return QuadricClass(r, _QUADRIC_LABELS[r], ell)
