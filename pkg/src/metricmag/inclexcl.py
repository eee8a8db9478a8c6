"""Inclusion–exclusion for magnitude around a distinguished pair of points.

For a pair ``(i, j)`` of an ``n``-point space (``n >= 3``) the subspaces are
``A = X - {j}``, ``B = X - {i}`` and ``A∩B = X - {i, j}``. Border vectors are
``a = (Z[i][k])`` and ``b = (Z[j][k])`` over ``k`` in ``A∩B`` (ascending), and

    b0 = <a, ζ(A∩B)⁻¹ b>,   b_minus = max_k Z[i][k]·Z[j][k].

Every function permutes the pair to the front internally, so any pair may
be distinguished.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .core import (FiniteMetricSpace, SimilaritySpace, Weighting, determinant,
                   is_positive_definite, magnitude, restrict, weighting)
from .errors import ConstructionError, SingularityError, TriangleError, ValidationError
from .scalar import DEFAULT_TOL, close, is_zero, leq

GATE_TOL = 1e-9


@dataclass(frozen=True)
class _Split:
    space: SimilaritySpace
    i: int
    j: int
    rest: Tuple[int, ...]
    a: tuple
    b: tuple
    overlap: tuple  # ζ(A∩B) as rows

    @property
    def exact(self):
        return self.space.exact


def _split(space: SimilaritySpace, pair: Sequence[int]) -> _Split:
    i, j = pair
    n = space.n
    if n < 3:
        raise ValidationError(f"need at least 3 points, got {n}")
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValidationError(f"invalid pair {pair!r} for {n} points")
    rest = tuple(k for k in range(n) if k not in (i, j))
    Z = space.Z
    return _Split(space, i, j, rest, tuple(Z[i][k] for k in rest), tuple(Z[j][k] for k in rest),
                  tuple(tuple(Z[p][q] for q in rest) for p in rest))


def _nonzero(value, what, tol):
    if is_zero(value, tol):
        raise SingularityError(f"Δ({what}) = 0", what=what)
    return value


def bordered_determinant(x, a: Sequence, b: Sequence, M) -> object:
    """``det [[x, aᵀ], [b, M]]`` evaluated as ``x·|M| - <a, adj(M)·b>``."""
    m = len(M)
    if len(a) != m or len(b) != m or any(len(row) != m for row in M):
        raise ValidationError(f"dimension mismatch: |a|={len(a)}, |b|={len(b)}, M is {m}x?")
    return x * linalg.det(M) - linalg.dot(a, linalg.matvec(linalg.adjugate(M), b))


def general_b_minus(space: SimilaritySpace, pair: Sequence[int]):
    s = _split(space, pair)
    return max(x * y for x, y in zip(s.a, s.b))


def general_b0(space: SimilaritySpace, pair: Sequence[int]):
    """``<a, ζ(A∩B)⁻¹ b>``; raises :class:`SingularityError` if Δ(A∩B) = 0."""
    s = _split(space, pair)
    y = linalg.solve(s.overlap, s.b, what="A∩B")
    return linalg.dot(s.a, y)


def b0_bordered(space: SimilaritySpace, pair: Sequence[int], tol: float = DEFAULT_TOL):
    """``b0 = -det [[0, aᵀ], [b, ζ(A∩B)]] / Δ(A∩B)``."""
    s = _split(space, pair)
    d = _nonzero(linalg.det(s.overlap), "A∩B", tol)
    return -bordered_determinant(0, s.a, s.b, s.overlap) / d


def adjugate_block(space: SimilaritySpace, pair: Sequence[int],
                   tol: float = DEFAULT_TOL) -> Tuple[List[list], Tuple[int, ...]]:
    """Adjugate of ζ(B), ``B = X - {i}``, assembled blockwise from ζ(A∩B)⁻¹.

    Returns ``(adj, order)`` where ``order = (j, *A∩B)`` is the row/column
    order of ``adj``.
    """
    s = _split(space, pair)
    d_ab = _nonzero(linalg.det(s.overlap), "A∩B", tol)
    inv = linalg.inverse(s.overlap, what="A∩B")
    y = linalg.matvec(inv, s.b)
    d_b = d_ab * (1 - linalg.dot(s.b, y))
    m = len(s.rest)
    one = Fraction(1) if s.exact else 1.0
    adj = [[one * d_ab] + [-d_ab * v for v in y]]
    for p in range(m):
        adj.append([-d_ab * y[p]] + [d_b * inv[p][q] + d_ab * y[p] * y[q] for q in range(m)])
    return adj, (s.j,) + s.rest


@dataclass(frozen=True)
class PairDecomposition:
    pair: Tuple[int, int]
    b_zero: object
    b_minus: object
    delta_A: object
    delta_B: object
    delta_overlap: object
    lhs: object
    rhs: object

    @property
    def residual(self):
        return self.lhs - self.rhs


def _dets(s: _Split):
    Z = s.space.Z
    A = (s.i,) + s.rest
    B = (s.j,) + s.rest
    return (linalg.det(linalg.submatrix(Z, A)), linalg.det(linalg.submatrix(Z, B)),
            linalg.det(s.overlap))


def pair_decomposition(space: SimilaritySpace, pair: Sequence[int],
                       tol: float = DEFAULT_TOL) -> PairDecomposition:
    """``Δ(X) = -Δ(A∩B)(Z_ij - b0)² + Δ(A)Δ(B)/Δ(A∩B)``, both sides recorded."""
    s = _split(space, pair)
    d_a, d_b, d_ab = _dets(s)
    _nonzero(d_ab, "A∩B", tol)
    b0 = general_b0(space, pair)
    z = space.Z[s.i][s.j]
    rhs = -d_ab * (z - b0) ** 2 + d_a * d_b / d_ab
    return PairDecomposition((s.i, s.j), b0, max(x * y for x, y in zip(s.a, s.b)),
                             d_a, d_b, d_ab, determinant(space), rhs)


@dataclass(frozen=True)
class MagnitudeSplit:
    mag_B: object
    beta: object
    w_B: Weighting
    order: Tuple[int, ...]


def magnitude_split(space: SimilaritySpace, pair: Sequence[int],
                    tol: float = DEFAULT_TOL) -> MagnitudeSplit:
    """Mag(B) and the weighting of ``B = X - {i}`` from data on A∩B alone.

    ``w_B`` is listed in ``order = (j, *A∩B)``; its first entry is ``beta``.
    """
    s = _split(space, pair)
    _, d_b, d_ab = _dets(s)
    _nonzero(d_ab, "A∩B", tol)
    _nonzero(d_b, "B", tol)
    w_ab = weighting(SimilaritySpace(s.overlap, tol=tol), what="A∩B").w
    r = 1 - linalg.dot(w_ab, s.b)
    beta = d_ab / d_b * r
    y = linalg.solve(s.overlap, s.b, what="A∩B")
    w_rest = tuple(w - beta * v for w, v in zip(w_ab, y))
    mag_ab = sum(w_ab, Fraction(0) if s.exact else 0.0)
    return MagnitudeSplit(mag_ab + d_ab / d_b * r * r, beta, Weighting((beta,) + w_rest),
                          (s.j,) + s.rest)


@dataclass(frozen=True)
class DefectReport:
    delta_direct: object
    delta_formula: object
    alpha: object
    beta: object
    b_zero: object
    z_pair: object
    pair: Tuple[int, int] = (0, 1)
    magnitudes: Dict[str, object] = field(default_factory=dict)


def defect(space: SimilaritySpace, pair: Sequence[int] = (0, 1),
           tol: float = DEFAULT_TOL) -> DefectReport:
    """Inclusion–exclusion defect ``Mag(X) - Mag(A) - Mag(B) + Mag(A∩B)``,
    computed from four direct magnitudes and from the closed form in
    ``alpha``, ``beta`` and ``b0 - Z_ij``."""
    s = _split(space, pair)
    d_a, d_b, d_ab = _dets(s)
    d_x = determinant(space)
    for value, what in ((d_x, "X"), (d_a, "A"), (d_b, "B"), (d_ab, "A∩B")):
        _nonzero(value, what, tol)
    Z = space.Z
    mags = {
        "X": weighting(space, "X").magnitude,
        "A": magnitude(SimilaritySpace(linalg.submatrix(Z, (s.i,) + s.rest), tol=tol)),
        "B": magnitude(SimilaritySpace(linalg.submatrix(Z, (s.j,) + s.rest), tol=tol)),
        "A∩B": magnitude(SimilaritySpace(s.overlap, tol=tol)),
    }
    direct = mags["X"] - mags["A"] - mags["B"] + mags["A∩B"]
    w_ab = weighting(SimilaritySpace(s.overlap, tol=tol), what="A∩B").w
    alpha = d_ab / d_a * (1 - linalg.dot(s.a, w_ab))
    beta = d_ab / d_b * (1 - linalg.dot(s.b, w_ab))
    b0 = general_b0(space, pair)
    z = Z[s.i][s.j]
    g = b0 - z
    formula = g / d_x * (g * d_a * alpha**2 + g * d_b * beta**2 + 2 * d_a * d_b / d_ab * alpha * beta)
    return DefectReport(direct, formula, alpha, beta, b0, z, (s.i, s.j), mags)


def glue_at_b0(space: SimilaritySpace, pair: Sequence[int] = (0, 1),
               tol: float = DEFAULT_TOL) -> SimilaritySpace:
    """Copy of ``space`` with ``Z_ij := b0``, revalidated against every
    triangle constraint.

    Raises :class:`ConstructionError` when ``b0`` falls outside (0, 1) or
    breaks a triangle constraint (for ``n >= 5`` it may drop below b_minus).
    """
    i, j = pair
    b0 = general_b0(space, pair)
    if not 0 < b0 < 1:
        raise ConstructionError(f"b0 = {b0} lies outside (0, 1)")
    try:
        return space.with_entry(i, j, b0)
    except TriangleError as exc:
        b_minus = general_b_minus(space, pair)
        hint = " (b0 < b_minus)" if b0 < b_minus else ""
        raise ConstructionError(f"Z{pair} := b0 violates a triangle constraint{hint}: {exc}") from exc


# ---------------------------------------------------------------------------
# gating conditions

@dataclass(frozen=True)
class ConditionReport:
    c1: bool
    c2a: bool
    c2b: bool
    witnesses: Dict[str, object]

    @property
    def c2(self) -> bool:
        return self.c2a or self.c2b


def _between_fn(space, tol):
    if isinstance(space, FiniteMetricSpace):
        d = space.d
        if space.exact:
            return lambda x, c, y: d[x][y] == d[x][c] + d[c][y]
        return lambda x, c, y: abs(d[x][y] - d[x][c] - d[c][y]) <= tol
    Z = space.Z
    if space.exact:
        return lambda x, c, y: Z[x][y] == Z[x][c] * Z[c][y]
    return lambda x, c, y: abs(Z[x][y] - Z[x][c] * Z[c][y]) <= tol


def check_conditions(space, A: Sequence[int], B: Sequence[int],
                     tol: float = GATE_TOL) -> ConditionReport:
    """Evaluate the gating conditions C1, C2a and C2b for a cover ``X = A ∪ B``.

    ``space`` is a :class:`FiniteMetricSpace` (``d(x,y) = d(x,c) + d(c,y)``)
    or a :class:`SimilaritySpace` (``Z_xy = Z_xc · Z_cy``). C2b is the mirror
    image of C2a: every ``b`` in ``B`` has a gate ``π(b)`` in ``A∩B`` with
    ``d(b, c) = d(b, π(b)) + d(π(b), c)`` for all ``c`` in ``A∩B``.
    """
    n = space.n
    A, B = sorted(set(A)), sorted(set(B))
    if set(A) | set(B) != set(range(n)):
        raise ValidationError("A ∪ B must cover every point")
    overlap = sorted(set(A) & set(B))
    if not overlap:
        raise ValidationError("A ∩ B must be nonempty")
    between = _between_fn(space, tol)

    gates, c1_fail = {}, []
    for a in A:
        for b in B:
            c = next((c for c in overlap if between(a, c, b)), None)
            if c is None:
                c1_fail.append((a, b))
            elif a != b:
                gates[(a, b)] = c

    def projections(side):
        proj, fail = {}, []
        for x in side:
            p = next((p for p in overlap if all(between(x, p, c) for c in overlap)), None)
            if p is None:
                fail.append(x)
            else:
                proj[x] = p
        return proj, fail

    proj_a, fail_a = projections(A)
    proj_b, fail_b = projections(B)
    return ConditionReport(
        c1=not c1_fail, c2a=not fail_a, c2b=not fail_b,
        witnesses={"c1_gates": gates, "c1_failures": c1_fail,
                   "c2a_projection": proj_a, "c2a_failures": fail_a,
                   "c2b_projection": proj_b, "c2b_failures": fail_b},
    )


@dataclass(frozen=True)
class ComparisonReport:
    pair: Tuple[int, int]
    z_pair: object
    b_minus: object
    b_zero: object
    c1: bool
    c2: bool
    z_equals_b_minus: bool
    b_minus_equals_b_zero: bool

    @property
    def c1_equivalence_holds(self) -> bool:
        return self.c1 == self.z_equals_b_minus

    @property
    def c2_implication_holds(self) -> bool:
        return (not self.c2) or self.b_minus_equals_b_zero


def comparison_report(space: SimilaritySpace, pair: Sequence[int] = (0, 1),
                      tol: float = GATE_TOL) -> ComparisonReport:
    """Gating conditions next to ``Z_ij``, b_minus and b0.

    Records whether C1 ⇔ (Z_ij = b_minus) and C2 ⇒ (b_minus = b0) hold here.
    """
    s = _split(space, pair)
    b_minus = max(x * y for x, y in zip(s.a, s.b))
    b0 = general_b0(space, pair)
    A = [k for k in range(space.n) if k != s.j]
    B = [k for k in range(space.n) if k != s.i]
    cond = check_conditions(space, A, B, tol)
    z = space.Z[s.i][s.j]
    return ComparisonReport((s.i, s.j), z, b_minus, b0, cond.c1, cond.c2,
                            close(z, b_minus, tol), close(b_minus, b0, tol))


@dataclass(frozen=True)
class FiveCircleReport:
    P: object
    Q: object
    b_zero: object
    b_minus: object
    b_zero_general: object
    P_alt: object = None
    Q_alt: object = None


def five_circle_report(space: SimilaritySpace, tol: float = DEFAULT_TOL) -> FiveCircleReport:
    """Five-point expression of b0 for the pair (0, 1) through P and Q."""
    if space.n != 5:
        raise ValidationError(f"expected 5 points, got {space.n}")
    Z = space.Z
    z13, z14, z15 = Z[0][2], Z[0][3], Z[0][4]
    z23, z24, z25 = Z[1][2], Z[1][3], Z[1][4]
    z34, z35, z45 = Z[2][3], Z[2][4], Z[3][4]
    d345 = _nonzero(1 - z34**2 - z35**2 - z45**2 + 2 * z34 * z35 * z45, "345", tol)
    P = (1 - z35**2) * (z24 - z23 * z34) - (z25 - z23 * z35) * (z45 - z34 * z35)
    Q = (1 - z34**2) * (z25 - z23 * z35) - (z24 - z23 * z34) * (z45 - z34 * z35)
    P_alt = (1 - z35**2) * (z24 - z25 * z45) - (z23 - z25 * z35) * (z34 - z35 * z45)
    Q_alt = (1 - z34**2) * (z25 - z24 * z45) - (z23 - z24 * z34) * (z35 - z34 * z45)
    b0 = z13 * z23 + ((z14 - z13 * z34) * P + (z15 - z13 * z35) * Q) / d345
    return FiveCircleReport(P, Q, b0, general_b_minus(space, (0, 1)),
                            general_b0(space, (0, 1)), P_alt, Q_alt)


@dataclass(frozen=True)
class ConverseReport:
    pair: Tuple[int, int]
    n: int
    positive_definite: bool
    positive_weighting_A: bool
    positive_weighting_B: bool
    z_le_b0: bool
    delta: object
    delta_zero: bool
    z_equals_b0: bool

    @property
    def hypotheses_hold(self) -> bool:
        if self.n == 3:
            return True
        return (self.positive_definite and self.positive_weighting_A
                and self.positive_weighting_B and self.z_le_b0)

    @property
    def implication_holds(self) -> bool:
        """δ = 0 ⇒ Z_ij = b0 whenever the hypotheses hold."""
        return not (self.hypotheses_hold and self.delta_zero) or self.z_equals_b0


def converse_check(space: SimilaritySpace, pair: Sequence[int] = (0, 1),
                   tol: float = DEFAULT_TOL) -> ConverseReport:
    s = _split(space, pair)
    rep = defect(space, pair, tol)
    Z = space.Z
    w_a = weighting(SimilaritySpace(linalg.submatrix(Z, (s.i,) + s.rest), tol=tol), "A").w
    w_b = weighting(SimilaritySpace(linalg.submatrix(Z, (s.j,) + s.rest), tol=tol), "B").w
    pos = (lambda v: v > 0) if space.exact else (lambda v: v > tol)
    return ConverseReport(
        pair=(s.i, s.j), n=space.n,
        positive_definite=is_positive_definite(space),
        positive_weighting_A=all(pos(v) for v in w_a),
        positive_weighting_B=all(pos(v) for v in w_b),
        z_le_b0=leq(rep.z_pair, rep.b_zero, tol),
        delta=rep.delta_direct,
        delta_zero=is_zero(rep.delta_direct, tol),
        z_equals_b0=close(rep.z_pair, rep.b_zero, tol),
    )


def delta_three_point(space: SimilaritySpace):
    """Closed form of the defect for ``n = 3`` and the pair (0, 1)."""
    if space.n != 3:
        raise ValidationError(f"expected 3 points, got {space.n}")
    Z = space.Z
    z12, z13, z23 = Z[0][1], Z[0][2], Z[1][2]
    d = determinant(space)
    b0 = z13 * z23
    return -2 * (z12 - b0) * (d - (1 - z12) * (z12 - z13 * z23)) / ((1 + z13) * (1 + z23) * d)


def three_point_positive_factor(space: SimilaritySpace):
    """``Δ - (1 - Z12)(Z12 - Z13 Z23)`` and its manifestly nonnegative expansion."""
    Z = space.Z
    z12, z13, z23 = Z[0][1], Z[0][2], Z[1][2]
    lhs = determinant(space) - (1 - z12) * (z12 - z13 * z23)
    rhs = ((1 - z12) * (1 - z13) * (1 - z23) + (1 - z13) * (z13 - z12 * z23)
           + (1 - z23) * (z23 - z12 * z13))
    return lhs, rhs
