"""Exact rational linear programming (two-phase simplex, Bland's rule).

Small and dense: the systems here have at most a few dozen variables and a
few hundred constraints. All arithmetic is over Fraction, so feasibility and
redundancy verdicts are exact.
"""

from __future__ import annotations

from fractions import Fraction

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


def _pivot(tab, basis, row, col):
    piv = tab[row][col]
    tab[row] = [x / piv for x in tab[row]]
    for r in range(len(tab)):
        if r != row and tab[r][col] != 0:
            f = tab[r][col]
            tab[r] = [x - f * y for x, y in zip(tab[r], tab[row])]
    basis[row] = col


def _solve_standard(cost, m, d):
    """min cost.z  s.t.  m.z = d, z >= 0.  Returns (status, value, z)."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    # make d >= 0
    m = [row[:] for row in m]
    d = list(d)
    for i in range(rows):
        if d[i] < 0:
            m[i] = [-x for x in m[i]]
            d[i] = -d[i]
    # phase 1 tableau with artificial variables
    tab = []
    for i in range(rows):
        tab.append([Fraction(x) for x in m[i]]
                   + [Fraction(1 if j == i else 0) for j in range(rows)]
                   + [Fraction(d[i])])
    basis = [cols + i for i in range(rows)]
    obj = [Fraction(0)] * (cols + rows + 1)
    for i in range(rows):
        obj = [o - t for o, t in zip(obj, tab[i])]
    for j in range(cols, cols + rows):
        obj[j] += 1
    tab.append(obj)

    def run(num_vars):
        while True:
            objrow = tab[-1]
            col = next((j for j in range(num_vars) if objrow[j] < 0), None)
            if col is None:
                return OPTIMAL
            best = None
            for r in range(rows):
                if tab[r][col] > 0:
                    ratio = tab[r][-1] / tab[r][col]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                        best = (ratio, r)
            if best is None:
                return UNBOUNDED
            _pivot(tab, basis, best[1], col)

    run(cols + rows)
    if tab[-1][-1] != 0:
        return INFEASIBLE, None, None
    # drive artificial variables out of the basis where possible
    for r in range(rows):
        if basis[r] >= cols:
            col = next((j for j in range(cols) if tab[r][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, r, col)
    # phase 2
    obj = [Fraction(0)] * (cols + rows + 1)
    for j in range(cols):
        obj[j] = Fraction(cost[j])
    for r in range(rows):
        if basis[r] < cols and obj[basis[r]] != 0:
            f = obj[basis[r]]
            obj = [o - f * t for o, t in zip(obj, tab[r])]
    tab[-1] = obj
    # forbid re-entry of artificials
    for j in range(cols, cols + rows):
        tab[-1][j] = max(tab[-1][j], Fraction(0))
    status = run(cols)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    z = [Fraction(0)] * cols
    for r in range(rows):
        if basis[r] < cols:
            z[basis[r]] = tab[r][-1]
    value = sum(Fraction(cost[j]) * z[j] for j in range(cols))
    return OPTIMAL, value, z


def lp_min(cost, a_ge, b_ge):
    """min cost.x  s.t.  a_ge.x >= b_ge, x free.  Returns (status, value, x)."""
    ncon = len(a_ge)
    nvar = len(cost)
    # x = u - w, slack s: a.(u - w) - s = b
    m = []
    for i in range(ncon):
        row = [Fraction(a_ge[i][j]) for j in range(nvar)]
        row += [-x for x in row]
        row += [Fraction(-1 if k == i else 0) for k in range(ncon)]
        m.append(row)
    c = [Fraction(x) for x in cost] + [-Fraction(x) for x in cost] + [Fraction(0)] * ncon
    status, value, z = _solve_standard(c, m, [Fraction(x) for x in b_ge])
    if status != OPTIMAL:
        return status, None, None
    x = [z[j] - z[nvar + j] for j in range(nvar)]
    return OPTIMAL, value, x


def lp_feasible(a_ge, b_ge):
    """A point x with a_ge.x >= b_ge, or None."""
    nvar = len(a_ge[0]) if a_ge else 0
    status, _, x = lp_min([Fraction(0)] * nvar, a_ge, b_ge)
    return x if status == OPTIMAL else None


def nonneg_combination(vectors, target):
    """lam >= 0 with sum(lam_i * vectors[i]) = target, or None.

    Used as the Farkas certificate that a cone inequality is redundant.
    """
    if not vectors:
        return [] if all(x == 0 for x in target) else None
    dim = len(target)
    m = [[Fraction(vectors[i][r]) for i in range(len(vectors))] for r in range(dim)]
    status, _, lam = _solve_standard([Fraction(0)] * len(vectors), m,
                                     [Fraction(x) for x in target])
    if status != OPTIMAL:
        return None
    return lam
