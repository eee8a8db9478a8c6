"""Magnitude homology ranks of small finite metric spaces.

``C_k(ℓ)`` is the free abelian group on ``(k+1)``-tuples of points with
distinct consecutive entries and total length ``ℓ``. The differential is
``∂ = Σ_{i=1}^{k-1} (-1)^i ∂_i`` where ``∂_i`` drops ``x_i`` and the face is
kept only if ``x_i`` lies between its neighbours, i.e.
``d(x_{i-1}, x_i) + d(x_i, x_{i+1}) = d(x_{i-1}, x_{i+1})``; otherwise that
term is zero. Homology is read off Smith normal forms of adjacent
boundary matrices.

Rational distances are handled exactly; float distances compare lengths
with ``tol`` (default 1e-9).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .core import FiniteMetricSpace
from .errors import ValidationError

HOMOLOGY_TOL = 1e-9
MAX_SPECTRUM_DEGREE = 4
MAX_HOMOLOGY_DEGREE = 3


@dataclass(frozen=True)
class ChainBasis:
    k: int
    ell: object
    tuples: Tuple[Tuple[int, ...], ...]

    def __len__(self):
        return len(self.tuples)

    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.tuples)}


@dataclass(frozen=True)
class HomologyResult:
    k: int
    ell: object
    rank: int
    torsion: Tuple[int, ...]
    basis_size: Tuple[int, int, int]  # dims of C_{k-1}, C_k, C_{k+1}


def _eq(space: FiniteMetricSpace, tol: float):
    if space.exact:
        return lambda x, y: x == y
    return lambda x, y: abs(x - y) <= tol


def _walks(space: FiniteMetricSpace, k: int, bound, tol: float):
    """Yield ``(tuple, length)`` for admissible tuples of length at most ``bound``."""
    d, n = space.d, space.n
    slack = 0 if space.exact else tol

    def extend(path, length):
        if len(path) == k + 1:
            yield tuple(path), length
            return
        last = path[-1]
        for y in range(n):
            if y == last:
                continue
            step = length + d[last][y]
            if bound is not None and step > bound + slack:
                continue
            path.append(y)
            yield from extend(path, step)
            path.pop()

    zero = Fraction(0) if space.exact else 0.0
    for x in range(n):
        yield from extend([x], zero)


def length_spectrum(space: FiniteMetricSpace, k: int, tol: float = HOMOLOGY_TOL) -> list:
    """Sorted distinct total lengths of admissible ``(k+1)``-tuples (``k <= 4``)."""
    if not 0 <= k <= MAX_SPECTRUM_DEGREE:
        raise ValidationError(f"degree {k} outside 0..{MAX_SPECTRUM_DEGREE}")
    values = sorted({length for _, length in _walks(space, k, None, tol)})
    if space.exact:
        return values
    out: List[float] = []
    for v in values:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def chain_basis(space: FiniteMetricSpace, k: int, ell, tol: float = HOMOLOGY_TOL) -> ChainBasis:
    if k < 0:
        return ChainBasis(k, ell, ())
    if k > MAX_SPECTRUM_DEGREE:
        raise ValidationError(f"degree {k} exceeds {MAX_SPECTRUM_DEGREE}")
    if space.exact:
        ell = Fraction(ell)
    eq = _eq(space, tol)
    tuples = tuple(t for t, length in _walks(space, k, ell, tol) if eq(length, ell))
    return ChainBasis(k, ell, tuples)


def boundary_matrix(space: FiniteMetricSpace, k: int, ell,
                    source: Optional[ChainBasis] = None, target: Optional[ChainBasis] = None,
                    tol: float = HOMOLOGY_TOL) -> List[List[int]]:
    """Integer matrix of ``∂: C_k(ℓ) -> C_{k-1}(ℓ)``; rows follow ``target``,
    columns follow ``source`` (both enumerated when omitted)."""
    if k < 1:
        raise ValidationError("boundary needs k >= 1")
    source = source if source is not None else chain_basis(space, k, ell, tol)
    target = target if target is not None else chain_basis(space, k - 1, ell, tol)
    row_of = target.index()
    d = space.d
    eq = _eq(space, tol)
    M = [[0] * len(source) for _ in range(len(target))]
    for col, x in enumerate(source.tuples):
        for i in range(1, k):
            a, c, b = x[i - 1], x[i], x[i + 1]
            if a == b or not eq(d[a][c] + d[c][b], d[a][b]):
                continue
            face = x[:i] + x[i + 1:]
            M[row_of[face]][col] += -1 if i % 2 else 1
    return M


def smith_normal_form(M: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero invariant factors ``d_1 | d_2 | ...`` of an integer matrix."""
    A = [list(map(int, row)) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0

    def swap_cols(j1, j2):
        for row in A:
            row[j1], row[j2] = row[j2], row[j1]

    diag: List[int] = []
    for t in range(min(rows, cols)):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if A[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        A[t], A[i] = A[i], A[t]
        swap_cols(t, j)
        while True:
            p = A[t][t]
            for i in range(t + 1, rows):
                q = A[i][t] // p
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
            rem = [(abs(A[i][t]), i) for i in range(t + 1, rows) if A[i][t]]
            if rem:
                A[t], A[min(rem)[1]] = A[min(rem)[1]], A[t]
                continue
            for j in range(t + 1, cols):
                q = A[t][j] // p
                if q:
                    for row in A:
                        row[j] -= q * row[t]
            rem = [(abs(A[t][j]), j) for j in range(t + 1, cols) if A[t][j]]
            if rem:
                swap_cols(t, min(rem)[1])
                continue
            # the pivot must divide everything left in the block
            bad = next((i for i in range(t + 1, rows)
                        if any(A[i][j] % p for j in range(t + 1, cols))), None)
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
        diag.append(abs(A[t][t]))
    return diag


def _rank_and_torsion(M) -> Tuple[int, Tuple[int, ...]]:
    if not M or not M[0]:
        return 0, ()
    inv = smith_normal_form(M)
    return len(inv), tuple(x for x in inv if x > 1)


def magnitude_homology(space: FiniteMetricSpace, k: int, ell, tol: float = HOMOLOGY_TOL,
                       order=None) -> HomologyResult:
    """``MH_k^ℓ`` as rank plus torsion invariants (``k <= 3``).

    ``order`` optionally maps a :class:`ChainBasis` to a reordered tuple list,
    which must not change the answer.
    """
    if not 0 <= k <= MAX_HOMOLOGY_DEGREE:
        raise ValidationError(f"degree {k} outside 0..{MAX_HOMOLOGY_DEGREE}")
    bases = []
    for j in (k - 1, k, k + 1):
        b = chain_basis(space, j, ell, tol)
        if order is not None and j >= 0:
            b = ChainBasis(b.k, b.ell, tuple(order(b)))
        bases.append(b)
    lower, mid, upper = bases
    r_in = 0
    if k >= 1:
        r_in, _ = _rank_and_torsion(boundary_matrix(space, k, ell, mid, lower, tol))
    r_out, torsion = _rank_and_torsion(boundary_matrix(space, k + 1, ell, upper, mid, tol))
    return HomologyResult(k, mid.ell, len(mid) - r_in - r_out, torsion,
                          (len(lower), len(mid), len(upper)))
