"""Exact linear algebra over the rationals.

Matrices are lists of rows; entries are anything ``Fraction`` accepts.
"""
from fractions import Fraction


def to_fraction_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows):
    """Reduced row echelon form. Returns ``(matrix, pivot_columns)``."""
    A = to_fraction_matrix(rows)
    if not A:
        return A, []
    n_rows, n_cols = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if A[i][c] != 0), None)
        if pivot is None:
            continue
        A[r], A[pivot] = A[pivot], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(n_rows):
            if i != r and A[i][c] != 0:
                factor = A[i][c]
                A[i] = [a - factor * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return A, pivots


def rank(rows):
    return len(rref(rows)[1])


def nullspace(rows, n_cols=None):
    """Basis (list of column vectors) of ``{v : A v = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    R, pivots = rref(rows)
    n_cols = len(R[0])
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def subtract(A, B):
    return [[Fraction(a) - Fraction(b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matmul(A, B):
    cols = list(zip(*B))
    return [[sum((Fraction(a) * Fraction(b) for a, b in zip(row, col)), Fraction(0))
             for col in cols] for row in A]


def matvec(A, v):
    return [sum((Fraction(a) * Fraction(x) for a, x in zip(row, v)), Fraction(0)) for row in A]


def determinant(A):
    """Determinant by fraction-exact Gaussian elimination."""
    M = to_fraction_matrix(A)
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if M[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            factor = M[i][c] / M[c][c]
            if factor:
                M[i] = [a - factor * b for a, b in zip(M[i], M[c])]
    return det


def inverse(A):
    n = len(A)
    aug = [list(row) + e for row, e in zip(to_fraction_matrix(A), identity(n))]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]
