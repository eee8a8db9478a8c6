"""Finite metric spaces, similarity (zeta) matrices, weightings and magnitude.

Points are indexed from 0. A :class:`SimilaritySpace` is exact when all of
its entries are rationals; every operation then returns exact rationals and
equality checks carry no tolerance. Float spaces (typically built from
distances through :func:`from_distances`) use an explicit tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from . import linalg
from .errors import RangeError, SingularityError, TriangleError, ValidationError
from .scalar import DEFAULT_TOL, Scalar, all_exact, close, is_zero


def _freeze(matrix) -> Tuple[tuple, ...]:
    rows = tuple(tuple(row) for row in matrix)
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"row {i} has length {len(row)}, expected {n}")
    return rows


def _check_symmetric(M, tol, name) -> None:
    n = len(M)
    for i in range(n):
        for j in range(i + 1, n):
            if not close(M[i][j], M[j][i], tol):
                raise ValidationError(f"{name} not symmetric at ({i}, {j})", triple=(i, j))


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Distance matrix of a finite metric space, validated on construction."""

    d: Tuple[tuple, ...]
    labels: Optional[Tuple[str, ...]] = None
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        d = _freeze(self.d)
        object.__setattr__(self, "d", d)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(d):
                raise ValidationError("label count does not match point count")
        n, tol = len(d), self.tol
        for i in range(n):
            if not is_zero(d[i][i], tol):
                raise ValidationError(f"d({i},{i}) = {d[i][i]} is not zero", triple=(i, i))
        _check_symmetric(d, tol, "distance matrix")
        for i in range(n):
            for j in range(n):
                if i != j and not d[i][j] > 0:
                    raise ValidationError(f"d({i},{j}) = {d[i][j]} is not positive", triple=(i, j))
        exact = self.exact
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    if k in (i, j):
                        continue
                    excess = d[i][j] - d[i][k] - d[k][j]
                    if excess > 0 if exact else excess > tol:
                        raise TriangleError(
                            f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})",
                            triple=(i, j, k),
                        )

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def exact(self) -> bool:
        return all(all_exact(row) for row in self.d)

    def restrict(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        idx = _check_indices(indices, self.n)
        labels = tuple(self.labels[i] for i in idx) if self.labels else None
        return FiniteMetricSpace(linalg.submatrix(self.d, idx), labels, self.tol)


@dataclass(frozen=True)
class SimilaritySpace:
    """Symmetric similarity matrix with unit diagonal, entries in (0, 1), and
    ``Z[i][j] >= Z[i][k] * Z[k][j]``.

    Construction runs :func:`validate_similarity`'s checks, so every instance
    is a point of the valid domain.
    """

    Z: Tuple[tuple, ...]
    labels: Optional[Tuple[str, ...]] = None
    tol: float = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        Z = _freeze(self.Z)
        if all(all_exact(row) for row in Z):
            Z = tuple(tuple(Fraction(x) for x in row) for row in Z)
        else:
            Z = tuple(tuple(float(x) for x in row) for row in Z)
        object.__setattr__(self, "Z", Z)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(Z):
                raise ValidationError("label count does not match point count")
        _validate_similarity(Z, self.tol)

    @property
    def n(self) -> int:
        return len(self.Z)

    @property
    def exact(self) -> bool:
        return not self.Z or isinstance(self.Z[0][0], Fraction)

    def __getitem__(self, ij):
        i, j = ij
        return self.Z[i][j]

    def permuted(self, order: Sequence[int]) -> "SimilaritySpace":
        """Relabel points so that new point ``k`` is old point ``order[k]``."""
        if sorted(order) != list(range(self.n)):
            raise ValidationError(f"{order!r} is not a permutation of the points")
        labels = tuple(self.labels[i] for i in order) if self.labels else None
        return SimilaritySpace(linalg.submatrix(self.Z, order), labels, self.tol)

    def with_entry(self, i: int, j: int, value) -> "SimilaritySpace":
        """Copy with ``Z[i][j] = Z[j][i] = value``; revalidated."""
        rows = [list(r) for r in self.Z]
        rows[i][j] = rows[j][i] = value
        return SimilaritySpace(rows, self.labels, self.tol)

    def to_float(self) -> "SimilaritySpace":
        return SimilaritySpace([[float(x) for x in r] for r in self.Z], self.labels, self.tol)


def _validate_similarity(Z, tol) -> None:
    n = len(Z)
    exact = n == 0 or isinstance(Z[0][0], Fraction)
    for i in range(n):
        if not close(Z[i][i], 1, tol):
            raise ValidationError(f"Z({i},{i}) = {Z[i][i]} is not 1", triple=(i, i))
    _check_symmetric(Z, tol, "similarity matrix")
    for i in range(n):
        for j in range(i + 1, n):
            z = Z[i][j]
            if not 0 < z < 1:
                raise RangeError(f"Z({i},{j}) = {z} outside (0, 1)", triple=(i, j))
    for i in range(n):
        row_i = Z[i]
        for j in range(i + 1, n):
            zij = row_i[j]
            for k in range(n):
                if k == i or k == j:
                    continue
                deficit = row_i[k] * Z[k][j] - zij
                if deficit > 0 if exact else deficit > tol:
                    raise TriangleError(
                        f"multiplicative triangle fails: Z({i},{j}) < Z({i},{k})·Z({k},{j})",
                        triple=(i, j, k),
                    )


def validate_similarity(Z, labels=None, tol: float = DEFAULT_TOL) -> SimilaritySpace:
    """Validate a raw square matrix and wrap it as a :class:`SimilaritySpace`.

    Raises :class:`RangeError` for an off-diagonal entry outside (0, 1) and
    :class:`TriangleError` naming (i, j, k) when ``Z[i][j] < Z[i][k]·Z[k][j]``.
    """
    return SimilaritySpace(Z, labels, tol)


def from_distances(space: FiniteMetricSpace) -> SimilaritySpace:
    """Zeta matrix ``exp(-d)`` of a metric space (always float mode)."""
    Z = [[1.0 if i == j else math.exp(-float(x)) for j, x in enumerate(row)]
         for i, row in enumerate(space.d)]
    return SimilaritySpace(Z, space.labels, space.tol)


@dataclass(frozen=True)
class Subspace:
    """Strictly increasing, nonempty tuple of point indices into a parent space."""

    indices: Tuple[int, ...]

    def __post_init__(self):
        idx = tuple(self.indices)
        if not idx:
            raise ValidationError("empty subspace")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError(f"subspace indices {idx} not strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def _check_indices(indices, n) -> Tuple[int, ...]:
    idx = tuple(indices.indices if isinstance(indices, Subspace) else indices)
    if not idx:
        raise ValidationError("empty index set")
    for i in idx:
        if not 0 <= i < n:
            raise ValidationError(f"index {i} out of range for {n} points")
    if len(set(idx)) != len(idx):
        raise ValidationError(f"repeated index in {idx}")
    return idx


def restrict(space: SimilaritySpace, sub) -> SimilaritySpace:
    """Principal submatrix on ``sub`` (a :class:`Subspace` or index sequence).

    The given order is kept, so a non-sorted sequence also relabels.
    """
    idx = _check_indices(sub, space.n)
    labels = tuple(space.labels[i] for i in idx) if space.labels else None
    return SimilaritySpace(linalg.submatrix(space.Z, idx), labels, space.tol)


def determinant(space: SimilaritySpace) -> Scalar:
    return linalg.det(space.Z)


def leading_principal_minors(space: SimilaritySpace) -> list:
    return linalg.leading_minors(space.Z)


def is_positive_definite(space: SimilaritySpace) -> bool:
    """Sylvester's criterion: every leading principal minor is positive."""
    return all(m > 0 for m in leading_principal_minors(space))


@dataclass(frozen=True)
class Weighting:
    """Solution of ``zeta · w = 1``."""

    w: Tuple

    @property
    def magnitude(self):
        return sum(self.w, Fraction(0)) if all_exact(self.w) else float(sum(self.w))

    def __iter__(self):
        return iter(self.w)

    def __len__(self):
        return len(self.w)


def weighting(space: SimilaritySpace, what: str = "X") -> Weighting:
    """The unique weighting; raises :class:`SingularityError` if zeta is singular."""
    one = Fraction(1) if space.exact else 1.0
    return Weighting(tuple(linalg.solve(space.Z, [one] * space.n, what=what)))


def magnitude(space: SimilaritySpace) -> Scalar:
    return weighting(space).magnitude


def telescope_terms(space: SimilaritySpace) -> list:
    """Summands of the tail-subspace telescope for the magnitude.

    With tails ``T_i = {i, ..., n-1}`` and ``x_i`` the similarities from point
    ``i`` to ``T_{i+1}``, summand ``i`` (for ``i = 0..n-2``) is
    ``det(T_{i+1}) / det(T_i) * (1 - <w(T_{i+1}), x_i>)**2``.
    """
    n = space.n
    dets = [determinant(restrict(space, range(i, n))) for i in range(n)]
    for i, d in enumerate(dets):
        if is_zero(d, space.tol):
            raise SingularityError(f"tail subspace {{{i}..{n - 1}}} has zero determinant",
                                   what=f"tail{i}")
    terms = []
    for i in range(n - 1):
        tail = restrict(space, range(i + 1, n))
        w = weighting(tail, what=f"tail{i + 1}").w
        x = space.Z[i][i + 1:]
        r = 1 - linalg.dot(w, x)
        terms.append(dets[i + 1] / dets[i] * r * r)
    return terms


def magnitude_telescoped(space: SimilaritySpace) -> Scalar:
    terms = telescope_terms(space)
    one = Fraction(1) if space.exact else 1.0
    return one + sum(terms, Fraction(0) if space.exact else 0.0)


def magnitude_two_point(z) -> Scalar:
    """``2 / (1 + Z12)``."""
    return 2 / (1 + z)


def determinant_three_point(z12, z13, z23) -> Scalar:
    return 1 - z12 * z12 - z13 * z13 - z23 * z23 + 2 * z12 * z13 * z23


def magnitude_three_point(z12, z13, z23) -> Scalar:
    """``1 + 2(1 - Z12)(1 - Z13)(1 - Z23) / Δ123``."""
    return 1 + 2 * (1 - z12) * (1 - z13) * (1 - z23) / determinant_three_point(z12, z13, z23)
