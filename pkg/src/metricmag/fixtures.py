"""Named example spaces used by the CLI ``gen`` command and the tests."""
from __future__ import annotations

import math
from fractions import Fraction

from .core import FiniteMetricSpace, SimilaritySpace
from .spacegen import geodesic_circle

CIRCLE_1 = ("0", "3/4", "1/2", "-1/2", "1")
CIRCLE_2 = ("0", "1/2", "1/4", "-1/2", "1")

# d(1, 2) in the four-point homology example: log((e^2 + e) / 2)
MV_LENGTH = math.log((math.e ** 2 + math.e) / 2)


def equilateral(n: int, z=Fraction(1, 2)) -> SimilaritySpace:
    z = Fraction(z)
    return SimilaritySpace([[1 if i == j else z for j in range(n)] for i in range(n)])


def q4() -> SimilaritySpace:
    """Two equilateral ``Z = 1/2`` triangles {0,2,3} and {1,2,3} glued along
    the edge {2,3}, with ``Z[0][1] = 1/3`` (the value of b0 there)."""
    return equilateral(4).with_entry(0, 1, Fraction(1, 3))


def mayer_vietoris(length=MV_LENGTH) -> FiniteMetricSpace:
    """Unit distances on the triangles {0,2,3} and {1,2,3}; ``d(0,1) = length``.

    At the default length ``Z[0][1] = b0``. Any ``1 < length < 2`` gives the
    same degree-one homology at ``ℓ = length``.
    """
    one = Fraction(1)
    return FiniteMetricSpace([[0, length, one, one],
                              [length, 0, one, one],
                              [one, one, 0, one],
                              [one, one, one, 0]])


def circle_1() -> FiniteMetricSpace:
    return geodesic_circle(CIRCLE_1)


def circle_2() -> FiniteMetricSpace:
    return geodesic_circle(CIRCLE_2)


def path_3() -> FiniteMetricSpace:
    """Path 0 - 2 - 1 with unit edges."""
    return FiniteMetricSpace([[0, 2, 1], [2, 0, 1], [1, 1, 0]])
