"""Two-phase primal simplex over the rationals, Bland's rule throughout.

Small and dense on purpose: the LPs solved here have one variable per game
state, so clarity beats sparse bookkeeping.
"""

from fractions import Fraction

from tldg.errors import GameError


class Infeasible(GameError):
    pass


class Unbounded(GameError):
    pass


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, col, cost):
        row = self.rows[r]
        pv = row[col]
        if pv != 1:
            self.rows[r] = row = [x / pv for x in row]
            self.rhs[r] /= pv
        for i, other in enumerate(self.rows):
            if i != r and other[col] != 0:
                f = other[col]
                self.rows[i] = [x - f * y for x, y in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        f = cost[0][col]
        if f != 0:
            cost[0] = [x - f * y for x, y in zip(cost[0], row)]
            cost[1] -= f * self.rhs[r]
        self.basis[r] = col

    def run(self, cost, allowed):
        """Minimize; ``cost`` is ``[reduced_costs, -objective]`` and is updated."""
        while True:
            enter = next((j for j in allowed if cost[0][j] < 0), None)
            if enter is None:
                return
            best = None
            for i, row in enumerate(self.rows):
                if row[enter] > 0:
                    key = (self.rhs[i] / row[enter], self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded("objective is unbounded below")
            self.pivot(best[1], enter, cost)


def minimize(c, a_eq, b_eq):
    """Minimize ``c @ x`` subject to ``a_eq @ x == b_eq`` and ``x >= 0``.

    Returns ``(x, objective)`` with exact :class:`~fractions.Fraction`
    entries.  Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    n = len(c)
    m = len(a_eq)
    c = [Fraction(v) for v in c]
    rows, rhs = [], []
    for a, b in zip(a_eq, b_eq):
        a = [Fraction(v) for v in a]
        b = Fraction(b)
        if b < 0:
            a, b = [-v for v in a], -b
        # artificial columns n..n+m-1
        rows.append(a + [Fraction(0)] * m)
        rhs.append(b)
    for i in range(m):
        rows[i][n + i] = Fraction(1)
    tab = _Tableau(rows, rhs, [n + i for i in range(m)])

    phase1 = [
        [-sum((row[j] for row in rows), Fraction(0)) for j in range(n)] + [Fraction(0)] * m,
        -sum(rhs, Fraction(0)),
    ]
    tab.run(phase1, range(n + m))
    if phase1[1] != 0:
        raise Infeasible("constraints admit no nonnegative solution")

    # drive zero-level artificials out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= n:
            col = next((j for j in range(n) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, col, phase1)
        r += 1

    reduced = list(c) + [Fraction(0)] * m
    cost = [reduced, Fraction(0)]
    for i, j in enumerate(tab.basis):
        f = cost[0][j]
        if f != 0:
            cost[0] = [x - f * y for x, y in zip(cost[0], tab.rows[i])]
            cost[1] -= f * tab.rhs[i]
    tab.run(cost, range(n))

    x = [Fraction(0)] * n
    for i, j in enumerate(tab.basis):
        x[j] = tab.rhs[i]
    return x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
