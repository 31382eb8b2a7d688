"""Fixture cubic threefolds used by the test corpus and the CLI examples.

Each fixture is a cubic form in the variables x0..x4 with exact rational
coefficients; EXPECTED_SIGMA records the defects known by construction or
by independent verification.
"""

from .forms import Form, parse_form

_X = [Form.variable(i, 5) for i in range(5)]

# sigma = 0: a D4 + 2A1 cubic whose projection curve from the D4 point is a
# union of two irreducible plane cubics
F1 = parse_form(
    "x0*x1*x2 + x1^2*x4 - 2*x1*x4^2 + x2^2*x4 - 2*x2*x4^2"
    " - x3^3 - x3^2*x4 + x4^3")

# sigma = 1: a D4 + 2A1 cubic; the projection curve from the node
# [0:1:0:0:0] splits off the line V(x2 = x3), so X contains a plane
F2 = parse_form("x0*x1*x2 + x1*x3*x4 + x2^3 - x3^3 + x3*x4^2")

# sigma = 5: the Segre cubic (the unique 10-nodal cubic threefold), written
# in P^4 by eliminating x5 = -(x0+...+x4) from the symmetric presentation
# sum x_i^3 = 0, sum x_i = 0 in P^5
SEGRE = (_X[0] ** 3 + _X[1] ** 3 + _X[2] ** 3 + _X[3] ** 3 + _X[4] ** 3
         - (_X[0] + _X[1] + _X[2] + _X[3] + _X[4]) ** 3)

# sigma = 6: cone over the smooth Fermat cubic surface (vertex [0:0:0:0:1])
CONE = parse_form("x0^3 + x1^3 + x2^3 + x3^3")

# smooth: the Fermat cubic threefold
FERMAT = parse_form("x0^3 + x1^3 + x2^3 + x3^3 + x4^3")

# sigma = 0, corank 0: exactly one node at [0:0:0:0:1], irreducible C_q
# (the x0*x2^2 term breaks the symmetry that would otherwise create the
# full 10-node configuration)
ONE_NODE = parse_form(
    "x0*x1*x4 - x2*x3*x4 + x0^3 + x1^3 + x2^3 + x3^3 + x0*x2^2")

# sigma = 0, corank 1: a single A2 point at [0:0:0:0:1]
# (g2 = x0^2+x1^2+x2^2 has rank 3; the splitting residual is x3^3)
CORANK1 = parse_form(
    "x0^2*x4 + x1^2*x4 + x2^2*x4 + x0^3 + x1^3 + x2^3 + x3^3")

# sigma = 2, corank 2: g2 = x0*x1; the plane cubic on {x0 = 0} splits into
# the three distinct lines (x1+x2)(x1+x3)(x2+x3) while the one on {x1 = 0},
# c = x2*x3*(x2+x3) + x0*(x0^2+x2^2+x3^2), stays irreducible; k = 4 and
# sigma = k - 2 = 2
SIGMA2 = (_X[0] * _X[1] * _X[4]
          + _X[2] * _X[3] * (_X[2] + _X[3])
          + _X[0] * (_X[0] ** 2 + _X[2] ** 2 + _X[3] ** 2)
          + _X[1] * (_X[2] + _X[3]) * (_X[1] + _X[2] + _X[3]))

# sigma = 1, corank 0, contains a rational normal cubic scroll: the
# determinantal cubic det(A) for a 3x3 matrix of general linear forms
# (six nodes; C_q from any node is two twisted cubics, blocks {3, 3})
_DET_ROWS = [
    ["- x0 - x2 + x3", "- x1 - x2 - x3 - x4", "x1 - x3 - x4"],
    ["x0 + x1 - x4", "- x0 - x2 - x3 + x4", "- x2 - x3"],
    ["x1 + x2 - x4", "x0 + x2 + x4", "- x0 - x1 - x2"],
]


def _det3(rows):
    a = [[parse_form(e) for e in row] for row in rows]
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


DETERMINANTAL = _det3(_DET_ROWS)

# not-good-line fixture: the line {x2=x3=x4=0} lies on X and the conic
# bundle fiber over y = (x2,x3,x4) = (1,0,0) has rank 1 (every conic-matrix
# entry except A = x2 vanishes there, transversally)
RANK1_FIBER = (_X[0] ** 2 * _X[2]
               + _X[0] * _X[1] * (_X[3] - _X[4])
               + _X[1] ** 2 * (_X[3] + _X[4] + _X[4])
               + _X[0] * (_X[3] * _X[4] + _X[2] * _X[3])
               + _X[1] * (_X[4] ** 2 - _X[2] * _X[3])
               + _X[3] ** 3 + _X[4] ** 3 + _X[2] * _X[3] * _X[4])


ALL_NAMED = {
    "f1": F1,
    "f2": F2,
    "segre": SEGRE,
    "cone": CONE,
    "fermat": FERMAT,
    "one_node": ONE_NODE,
    "corank1": CORANK1,
    "sigma2": SIGMA2,
    "determinantal": DETERMINANTAL,
    "rank1_fiber": RANK1_FIBER,
}

# expected defects (cone excluded from the plane/scroll equivalence)
EXPECTED_SIGMA = {
    "f1": 0,
    "f2": 1,
    "segre": 5,
    "cone": 6,
    "one_node": 0,
    "corank1": 0,
    "sigma2": 2,
    "determinantal": 1,
}
