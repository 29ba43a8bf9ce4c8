"""Small exact linear algebra over the rationals and the integers.

Matrices are lists of rows; entries are ``int`` or ``Fraction``.  The sizes
handled here are tiny (at most a handful of rows), so plain Gaussian
elimination on ``Fraction`` beats any general purpose library.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Sequence

Vector = tuple
Matrix = Sequence[Sequence]


def rref(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        if inv != 1:
            m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of ``points`` (-1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def solve(a: Matrix, b: Sequence) -> list[Fraction] | None:
    """Unique solution of ``a x = b`` for square ``a``; None when singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a, b)]
    red, piv = rref(aug)
    if piv != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


def inverse(a: Matrix) -> list[list[Fraction]] | None:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        return None
    return [row[n:] for row in red]


def nullspace(rows: Matrix, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def det_int(m: Matrix) -> int:
    """Determinant of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [list(map(int, r)) for r in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det(m: Matrix) -> Fraction:
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out


def maximal_minors_gcd(m: Matrix) -> int:
    """gcd of all maximal minors of an integer matrix with full row rank.

    This equals the product of the invariant factors, i.e. the index of the
    row lattice inside its saturation.  Returns 0 if the rows are dependent.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    g = 0
    for cs in combinations(range(cols), rows):
        d = det_int([[r[c] for c in cs] for r in m])
        if d:
            g = gcd(g, d)
            if g == 1:
                return 1
    return abs(g)


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), xs, 1)


def primitive(v: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Divide an integer vector by its content; returns (vector, content)."""
    g = reduce(gcd, (abs(int(x)) for x in v), 0)
    if g == 0:
        return tuple(int(x) for x in v), 0
    return tuple(int(x) // g for x in v), g


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))
