"""Exact linear solves over the rationals (fraction-free Bareiss elimination)."""

from fractions import Fraction
from math import lcm

from tldg.errors import InternalInconsistency


class SingularSystem(InternalInconsistency):
    pass


def _integer_rows(a, b):
    rows = []
    for ra, rb in zip(a, b):
        row = [Fraction(x) for x in ra] + [Fraction(x) for x in rb]
        scale = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([x.numerator * (scale // x.denominator) for x in row])
    return rows


def solve(a, b):
    """Solve ``a @ x = b`` exactly.

    ``a`` is an n-by-n matrix and ``b`` an n-by-k matrix, both as nested
    sequences of rationals or ints.  Returns ``x`` as an n-by-k list of
    :class:`~fractions.Fraction`.  Raises :class:`SingularSystem` when ``a``
    is singular.
    """
    n = len(a)
    if n == 0:
        return []
    k = len(b[0])
    m = _integer_rows(a, b)
    prev = 1
    for col in range(n):
        pivot = max(
            (r for r in range(col, n) if m[r][col] != 0),
            key=lambda r: abs(m[r][col]),
            default=None,
        )
        if pivot is None:
            raise SingularSystem(f"singular system at column {col}")
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        top = m[col]
        for r in range(col + 1, n):
            row = m[r]
            f = row[col]
            for j in range(col + 1, n + k):
                # exact by Sylvester's identity
                row[j] = (row[j] * pv - f * top[j]) // prev
            row[col] = 0
        prev = pv

    x = [[Fraction(0)] * k for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = m[i]
        for c in range(k):
            acc = Fraction(row[n + c])
            for j in range(i + 1, n):
                if row[j]:
                    acc -= row[j] * x[j][c]
            x[i][c] = acc / row[i]
    return x


def solve_vector(a, b):
    """Single right-hand side version of :func:`solve`."""
    return [row[0] for row in solve(a, [[v] for v in b])]
