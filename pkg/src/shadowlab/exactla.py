"""Exact linear algebra over the rationals.

Small dense routines on lists of :class:`~fractions.Fraction` rows.  Used for
linear independence checks, membership solves, certificate projection, and
the exact PSD test behind rational sum-of-squares certificates.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]


def rref(rows: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (rref rows, pivot column indices)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def solve(a: Matrix, b: list[Fraction]) -> list[Fraction] | None:
    """One solution of A x = b, or None if inconsistent."""
    if not a:
        return [] if all(x == 0 for x in b) else None
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    ncols = len(a[0])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, pivots):
        x[c] = row[-1]
    return x


def nullspace(a: Matrix) -> list[list[Fraction]]:
    """Basis of the nullspace of A."""
    if not a:
        return []
    red, pivots = rref(a)
    ncols = len(a[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def invert(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def mat_vec(a: Matrix, x: list[Fraction]) -> list[Fraction]:
    return [sum((ai * xi for ai, xi in zip(row, x)), Fraction(0)) for row in a]


def ldl_psd(a: Matrix) -> tuple[list[int], Matrix, list[Fraction]] | None:
    """Exact PSD test by pivoted LDL^T.

    Returns (perm, L, diag) with P A P^T = L D L^T and all of D non-negative,
    or None if A is not positive semidefinite.  A must be symmetric.
    """
    n = len(a)
    m = [list(map(Fraction, row)) for row in a]
    perm = list(range(n))
    lcols: list[list[Fraction]] = []
    diag: list[Fraction] = []
    for k in range(n):
        # pick a positive diagonal pivot among the remaining block
        pivot = None
        for j in range(k, n):
            if m[j][j] > 0:
                pivot = j
                break
        if pivot is None:
            # all remaining diagonal entries are <= 0; PSD forces the whole
            # remaining block to vanish
            for i in range(k, n):
                for j in range(k, n):
                    if m[i][j] != 0:
                        return None
            for i in range(k, n):
                diag.append(Fraction(0))
                col = [Fraction(0)] * n
                col[i] = Fraction(1)
                lcols.append(col)
            break
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            for row in m:
                row[k], row[pivot] = row[pivot], row[k]
            perm[k], perm[pivot] = perm[pivot], perm[k]
        d = m[k][k]
        col = [Fraction(0)] * n
        col[k] = Fraction(1)
        for i in range(k + 1, n):
            col[i] = m[i][k] / d
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] -= col[i] * d * col[j]
        diag.append(d)
        lcols.append(col)
    # verify residual block vanished when we broke early, and no negatives
    if any(d < 0 for d in diag):
        return None
    lmat = [[lcols[j][i] for j in range(n)] for i in range(n)]
    return perm, lmat, diag
