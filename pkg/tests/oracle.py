"""Independent reference computations used only by the tests.

Nothing here calls into the package: determinants by Laplace expansion,
inverses by Gauss-Jordan on Fractions, adjugates by explicit cofactors.
"""
from fractions import Fraction


def laplace_det(M):
    n = len(M)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(M[0][0])
    total = Fraction(0)
    for j in range(n):
        if M[0][j] == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        total += (-1) ** j * Fraction(M[0][j]) * laplace_det(minor)
    return total


def cofactor_adjugate(M):
    n = len(M)
    if n == 1:
        return [[Fraction(1)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            adj[j][i] = (-1) ** (i + j) * laplace_det(minor)
    return adj


def gauss_jordan_inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def magnitude(M):
    return sum(sum(row) for row in gauss_jordan_inverse(M))


def weights(M):
    return [sum(row) for row in gauss_jordan_inverse(M)]


def sub(M, idx):
    return [[M[i][j] for j in idx] for i in idx]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
