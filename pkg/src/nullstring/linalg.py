"""Small exact linear algebra over Exprs and rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .kernel import Expr, ZERO, ONE, as_expr


class SingularMatrixError(ValueError):
    pass


def det(m: Sequence[Sequence[Expr]]) -> Expr:
    n = len(m)
    if n == 1:
        return as_expr(m[0][0])
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ZERO
    for j in range(n):
        if as_expr(m[0][j]).is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def inverse(m: Sequence[Sequence[Expr]]) -> list[list[Expr]]:
    """Inverse via the adjugate; fine for the 2x2 and 4x4 sizes used here."""
    n = len(m)
    d = det(m)
    if d.is_zero():
        raise SingularMatrixError("matrix is singular")
    if n == 1:
        return [[ONE / d]]
    out = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(m) if k != i]
            c = det(minor)
            out[j][i] = (c if (i + j) % 2 == 0 else -c) / d
    return out


def matmul(a, b):
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def transpose(a):
    return [list(r) for r in zip(*a)]


def solve_rational(rows: list[list[Fraction]], rhs: list) -> list | None:
    """Solve a consistent linear system with rational matrix and Expr rhs.

    Returns one solution (free variables set to zero), or None if the
    system is inconsistent. The matrix is constant, so ordinary Gaussian
    elimination is exact.
    """
    n = len(rows[0]) if rows else 0
    a = [list(map(Fraction, r)) for r in rows]
    b = [as_expr(v) for v in rhs]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        b[r], b[p] = b[p], b[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        b[r] = b[r] * inv
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
                b[i] = b[i] - b[r] * f
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    for i in range(r, len(a)):
        if not b[i].is_zero():
            return None
    x = [ZERO] * n
    for i, c in enumerate(pivots):
        x[c] = b[i]
    return x


def rank_rational(rows: list[list[Fraction]]) -> int:
    a = [list(map(Fraction, r)) for r in rows]
    if not a:
        return 0
    n = len(a[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, len(a)):
            if a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def inertia(m: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Uses symmetric congruence elimination (Sylvester's law of inertia),
    which also handles zero leading minors.
    """
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    pos = neg = 0
    k = 0
    size = n
    while size:
        # pick a nonzero diagonal pivot, or create one from an off-diagonal entry
        piv = next((i for i in range(size) if a[i][i] != 0), None)
        if piv is None:
            off = next(((i, j) for i in range(size) for j in range(i + 1, size) if a[i][j] != 0), None)
            if off is None:
                break
            i, j = off
            # row/col i += row/col j makes a[i][i] = 2 a[i][j] != 0 (a[j][j] == 0)
            for t in range(size):
                a[i][t] += a[j][t]
            for t in range(size):
                a[t][i] += a[t][j]
            piv = i
        # move pivot to 0
        a[0], a[piv] = a[piv], a[0]
        for row in a:
            row[0], row[piv] = row[piv], row[0]
        d = a[0][0]
        if d > 0:
            pos += 1
        else:
            neg += 1
        sub = [[a[i][j] - a[i][0] * a[0][j] / d for j in range(1, size)] for i in range(1, size)]
        a = sub
        size -= 1
        k += 1
    return pos, neg, n - pos - neg


def leading_minors(m: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    out = []
    for k in range(1, len(m) + 1):
        sub = [[as_expr(v) for v in row[:k]] for row in m[:k]]
        out.append(det(sub).const_value())
    return out
