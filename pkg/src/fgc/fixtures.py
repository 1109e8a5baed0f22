"""Small named instances with known optima."""
from __future__ import annotations

from fractions import Fraction

from .graph import LabeledMultigraph
from .model import FgcInstance

# vertices v1..v6 are 0..5
_BRIDGED_EDGES = [
    (0, 1, 2, "S"),
    (0, 2, 1, "U"),
    (1, 2, 0, "U"),
    (2, 5, 10, "S"),
    (2, 3, 10, "U"),
    (1, 3, 10, "U"),
    (5, 4, 1, "U"),
    (3, 4, 2, "U"),
    (5, 3, 1, "U"),
]

# all edges except v3v4 and v2v4
BRIDGED_OPTIMUM = frozenset({0, 1, 2, 3, 6, 7, 8})
BRIDGED_OPT = Fraction(17)


def bridged_triangles() -> FgcInstance:
    """Two unsafe triangles joined by a heavy safe edge, with a heavy
    unsafe alternative pair that the optimum avoids."""
    return FgcInstance(LabeledMultigraph.build(6, [(u, v, Fraction(w), s) for u, v, w, s in _BRIDGED_EDGES]))


STAR_TRIANGLE_OPT = Fraction(2)
STAR_TRIANGLE_LP = Fraction(3, 4)


def star_triangle() -> FgcInstance:
    """Safe unit triangle plus a free unsafe star to a fourth vertex."""
    edges = [(0, 1, 1, "S"), (1, 2, 1, "S"), (0, 2, 1, "S"),
             (3, 0, 0, "U"), (3, 1, 0, "U"), (3, 2, 0, "U")]
    return FgcInstance(LabeledMultigraph.build(4, [(u, v, Fraction(w), s) for u, v, w, s in edges]))
