"""Dense linear algebra over either scalar backend.

Exact matrices (entries ``int``/``Fraction``) go through fraction-free
integer arithmetic: each row is cleared of denominators and the resulting
integer matrix is reduced with Bareiss elimination, so every intermediate
quantity is an exact integer. Float matrices are handed to numpy.

Matrices are plain sequences of rows; nothing here mutates its input.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import SingularityError
from .scalar import all_exact

COND_LIMIT = 1e12

Matrix = Sequence[Sequence]


def matrix_is_exact(M: Matrix) -> bool:
    return all(all_exact(row) for row in M)


def _clear_denominators(M: Matrix) -> Tuple[List[List[int]], List[int]]:
    rows, scales = [], []
    for row in M:
        s = math.lcm(*(x.denominator for x in row))
        rows.append([x.numerator * (s // x.denominator) for x in row])
        scales.append(s)
    return rows, scales


def _bareiss(a: List[List[int]]) -> Tuple[int, List[int], bool]:
    """In-place Bareiss reduction of an integer matrix.

    Returns ``(det, pivots, pivoted)``. While no row swap happens the k-th
    pivot equals the k-th leading principal minor; ``pivoted`` reports
    whether that reading is still valid.
    """
    n = len(a)
    if n == 0:
        return 1, [], False
    sign, prev, pivots, pivoted = 1, 1, [], False
    for k in range(n - 1):
        if a[k][k] == 0:
            pivoted = True
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0, pivots, pivoted
        pivots.append(a[k][k])
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    pivots.append(a[n - 1][n - 1])
    return sign * a[n - 1][n - 1], pivots, pivoted


def det(M: Matrix):
    """Determinant; exact ``Fraction`` for exact input, ``float`` otherwise."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    if matrix_is_exact(M):
        rows, scales = _clear_denominators(M)
        d, _, _ = _bareiss(rows)
        return Fraction(d, math.prod(scales))
    return float(np.linalg.det(np.asarray(M, dtype=float)))


def leading_minors(M: Matrix) -> list:
    """Leading principal minors of sizes 1..n."""
    n = len(M)
    if not matrix_is_exact(M):
        A = np.asarray(M, dtype=float)
        return [float(np.linalg.det(A[:k, :k])) for k in range(1, n + 1)]
    rows, scales = _clear_denominators(M)
    _, pivots, pivoted = _bareiss(rows)
    if not pivoted and len(pivots) == n:
        out, s = [], 1
        for k in range(n):
            s *= scales[k]
            out.append(Fraction(pivots[k], s))
        return out
    # a zero pivot breaks the by-product reading; fall back to one det per size
    return [det([row[:k] for row in M[:k]]) for k in range(1, n + 1)]


def solve(M: Matrix, b: Sequence, what: Optional[str] = None) -> list:
    """Solve ``M x = b``; raises :class:`SingularityError` when ``M`` is singular."""
    n = len(M)
    if n == 0:
        return []
    if matrix_is_exact(M) and all_exact(b):
        a = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(M, b)]
        for k in range(n):
            p = next((r for r in range(k, n) if a[r][k] != 0), None)
            if p is None:
                raise SingularityError(f"singular matrix{_label(what)}", what=what)
            if p != k:
                a[k], a[p] = a[p], a[k]
            rowk = a[k]
            inv = 1 / rowk[k]
            for i in range(k + 1, n):
                f = a[i][k] * inv
                if f:
                    rowi = a[i]
                    for j in range(k, n + 1):
                        rowi[j] -= f * rowk[j]
        x = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            s = a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))
            x[i] = s / a[i][i]
        return x
    A = np.asarray(M, dtype=float)
    # numerically singular matrices solve "successfully" to garbage
    if not np.linalg.cond(A) < COND_LIMIT:
        raise SingularityError(f"singular matrix{_label(what)} (condition number above "
                               f"{COND_LIMIT:g})", what=what)
    try:
        x = np.linalg.solve(A, np.asarray(b, dtype=float))
    except np.linalg.LinAlgError:
        raise SingularityError(f"singular matrix{_label(what)}", what=what) from None
    return [float(v) for v in x]


def inverse(M: Matrix, what: Optional[str] = None) -> List[list]:
    n = len(M)
    cols = [solve(M, [int(i == j) for i in range(n)], what=what) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def minor_matrix(M: Matrix, row: int, col: int) -> List[list]:
    return [[x for j, x in enumerate(r) if j != col] for i, r in enumerate(M) if i != row]


def adjugate(M: Matrix) -> List[list]:
    """Transpose of the cofactor matrix, built from minors (works when singular)."""
    n = len(M)
    if n == 0:
        return []
    if n == 1:
        return [[Fraction(1) if matrix_is_exact(M) else 1.0]]
    return [[(-1) ** (i + j) * det(minor_matrix(M, j, i)) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> List[list]:
    Bt = list(zip(*B))
    return [[sum(x * y for x, y in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum((x * y for x, y in zip(u, v)), Fraction(0) if all_exact(u) and all_exact(v) else 0.0)


def submatrix(M: Matrix, idx: Sequence[int]) -> List[list]:
    return [[M[i][j] for j in idx] for i in idx]


def _label(what):
    return f" ({what})" if what else ""
