"""Exact linear algebra over the rationals.

Everything goes through fraction-free (Bareiss) elimination on integer
matrices: rational rows are first scaled by the lcm of their denominators,
so intermediate entries stay integral and no gcd work happens until the
final back substitution.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

from .errors import NumericalError


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = lcm(den, x.denominator)
        out.append([int(x * den) if isinstance(x, Fraction) else int(x) * den for x in row])
    return out


def _bareiss(m: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int], int]:
    """In-place Bareiss forward elimination on the first ``ncols`` columns.

    Returns the matrix, the pivot column of each pivot row, and the sign of
    the row permutation.
    """
    nrows = len(m)
    sign = 1
    prev = 1
    pivcols: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[p], m[r] = m[r], m[p]
            sign = -sign
        piv = m[r][c]
        rowr = m[r]
        width = len(rowr)
        for i in range(r + 1, nrows):
            rowi = m[i]
            a = rowi[c]
            for j in range(c + 1, width):
                rowi[j] = (piv * rowi[j] - a * rowr[j]) // prev
            rowi[c] = 0
        # rows above the pivot row are untouched; rows below now share the factor piv
        prev = piv
        pivcols.append(c)
        r += 1
    return m, pivcols, sign


def solve(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list[Fraction]]:
    """Solve ``a @ x = b`` exactly for square nonsingular ``a`` (columns of ``b`` are RHS)."""
    n = len(a)
    if n == 0:
        return []
    k = len(b[0]) if b else 0
    aug = _integer_rows([list(a[i]) + list(b[i]) for i in range(n)])
    m, pivcols, _ = _bareiss(aug, n)
    if len(pivcols) < n:
        raise NumericalError("singular system")
    x = [[Fraction(0)] * k for _ in range(n)]
    for col in range(k):
        for i in range(n - 1, -1, -1):
            row = m[i]
            s = Fraction(row[n + col])
            for j in range(i + 1, n):
                if row[j]:
                    s -= row[j] * x[j][col]
            x[i][col] = s / row[i]
    return x


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return solve(a, eye)


def det(a: Sequence[Sequence]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    dens = []
    for row in a:
        d = 1
        for x in row:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
        dens.append(d)
    m, pivcols, sign = _bareiss(_integer_rows(a), n)
    if len(pivcols) < n:
        return Fraction(0)
    scale = 1
    for d in dens:
        scale *= d
    return Fraction(sign * m[n - 1][n - 1], scale)


def det_int(a: Sequence[Sequence[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    m, pivcols, sign = _bareiss([list(map(int, row)) for row in a], n)
    if len(pivcols) < n:
        return 0
    return sign * m[n - 1][n - 1]


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    m = _integer_rows(rows)
    _, pivcols, _ = _bareiss(m, len(m[0]))
    return len(pivcols)


def matmul(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def transpose(a):
    return [list(col) for col in zip(*a)]


def leading_minors_positive(a: Sequence[Sequence]) -> bool:
    return all(det([row[:k] for row in a[:k]]) > 0 for k in range(1, len(a) + 1))
