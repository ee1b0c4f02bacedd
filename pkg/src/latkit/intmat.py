"""Exact integer and rational matrix routines.

Everything here works over Python ints and fractions.Fraction; no floating
point enters any decision. Matrices are lists of row lists. Lattice bases are
stored column-wise: ``cols(B)[j]`` is the j-th basis vector.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def mat_copy(a):
    return [row[:] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def mat_mul(a, b):
    n, k = len(a), len(b)
    bt = list(zip(*b))
    return [[sum(ra[i] * cb[i] for i in range(k)) for cb in bt] for ra in a]


def mat_vec(a, v):
    return [sum(ra[i] * v[i] for i in range(len(v))) for ra in a]


def vec_mat(v, a):
    return [sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0]))]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def bilinear(gram, u, v):
    """u^T . gram . v with exact arithmetic."""
    return sum(u[i] * sum(gram[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))


def vec_add(u, v):
    return [x + y for x, y in zip(u, v)]


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_scale(v, c):
    return [c * x for x in v]


def is_symmetric(a):
    n = len(a)
    return all(len(r) == n for r in a) and all(
        a[i][j] == a[j][i] for i in range(n) for j in range(i)
    )


def columns(a):
    return [list(col) for col in zip(*a)] if a else []


def from_columns(cols):
    return [list(row) for row in zip(*cols)] if cols else []


def gcd_list(xs):
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


def det_bareiss(a):
    """Determinant of an integer matrix by fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def inv_frac(a):
    """Inverse of a square matrix, entries returned as Fractions."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def inv_unimodular(a):
    """Inverse of a unimodular integer matrix, returned with int entries."""
    inv = inv_frac(a)
    out = []
    for row in inv:
        r = []
        for x in row:
            assert x.denominator == 1
            r.append(int(x))
        out.append(r)
    return out


def solve_frac(a, b):
    """One rational solution x of a.x = b, or None if inconsistent."""
    m, n = len(a), len(a[0]) if a else 0
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


# ---------------------------------------------------------------------------
# Normal forms

def snf(a):
    """Smith normal form with transforms: returns (d, u, v) with d = u.a.v.

    d is diagonal (rectangular) with d[i][i] | d[i+1][i+1]; u, v unimodular.
    """
    m = [row[:] for row in a]
    rows, cols = len(m), len(m[0]) if m else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in m:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while t < rows and t < cols:
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < best):
                    best = abs(m[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t] != 0:
                    q = m[i][t] // m[t][t]
                    add_row(t, i, -q)
                    if m[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j] != 0:
                    q = m[t][j] // m[t][t]
                    add_col(t, j, -q)
                    if m[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # enforce that the pivot divides every remaining entry
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if m[i][j] % m[t][t] != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        t += 1
    for i in range(min(rows, cols)):
        if m[i][i] < 0:
            for r in range(rows):
                m[r][i] = -m[r][i]
            for r in range(cols):
                v[r][i] = -v[r][i]
    return m, u, v


def snf_diag(a):
    d, _, _ = snf(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def rank_int(a):
    return sum(1 for x in snf_diag(a) if x != 0)


def kernel_int(a):
    """Basis (columns) of the integer kernel {x : a.x = 0}; saturated."""
    if not a or not a[0]:
        n = len(a[0]) if a else 0
        return identity(n) if n else []
    d, _, v = snf(a)
    n = len(a[0])
    r = sum(1 for i in range(min(len(d), n)) if d[i][i] != 0)
    cols_v = columns(v)
    return from_columns(cols_v[r:]) if r < n else [[] for _ in range(n)]


def solve_int(a, b):
    """One integer solution of a.x = b, or None."""
    d, u, v = snf(a)
    m, n = len(a), len(a[0]) if a else 0
    ub = mat_vec(u, b)
    y = [0] * n
    r = min(m, n)
    for i in range(m):
        di = d[i][i] if i < r else 0
        if di == 0:
            if i < m and ub[i] != 0:
                return None
        else:
            if ub[i] % di != 0:
                return None
            y[i] = ub[i] // di
    return mat_vec(v, y)


def col_hnf(a):
    """Column-style Hermite normal form of the lattice spanned by the columns.

    Returns a list of basis columns (echelon, pivot-positive, reduced), with
    zero columns dropped.
    """
    m = len(a)
    cols = [c[:] for c in columns(a)]
    basis = []
    row = 0
    while row < m and cols:
        # gcd-reduce entries of all columns at this row position
        work = [c for c in cols if c[row] != 0]
        rest = [c for c in cols if c[row] == 0]
        if not work:
            cols = rest
            row += 1
            continue
        while len(work) > 1:
            work.sort(key=lambda c: abs(c[row]))
            c0 = work[0]
            new_work = [c0]
            for c in work[1:]:
                q = c[row] // c0[row]
                cc = [x - q * y for x, y in zip(c, c0)]
                if cc[row] != 0:
                    new_work.append(cc)
                elif any(cc):
                    rest.append(cc)
            if len(new_work) == 1:
                break
            work = new_work
        piv = work[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        # reduce previous pivots against the new one (upper reduction)
        for b in basis:
            if b[row] != 0:
                q = b[row] // piv[row]
                for i in range(m):
                    b[i] -= q * piv[i]
        basis.append(piv)
        cols = [c for c in rest if any(c)]
        rest = []
        row += 1
    return basis


def saturate_cols(b):
    """Basis columns of the saturation (Q-span intersected with Z^m)."""
    if not b or not b[0]:
        return []
    d, u, _ = snf(b)
    r = sum(1 for i in range(min(len(d), len(d[0]))) if d[i][i] != 0)
    uinv = inv_unimodular(u)
    return [[uinv[i][j] for j in range(r)] for i in range(len(b))]


def saturation_index(b):
    """Index of the column lattice inside its saturation."""
    dd = [x for x in snf_diag(b) if x != 0]
    out = 1
    for x in dd:
        out *= x
    return out


def complete_to_unimodular(c):
    """Unimodular matrix whose first column is the primitive vector c."""
    n = len(c)
    assert gcd_list(c) == 1, "vector must be primitive"
    d, u, v = snf([[x] for x in c])
    uinv = inv_unimodular(u)
    # first column of uinv equals c up to the sign of v[0][0]
    s = v[0][0]
    m = [[s * uinv[i][0] if j == 0 else uinv[i][j] for j in range(n)] for i in range(n)]
    first = [m[i][0] for i in range(n)]
    assert first == list(c)
    return m


def lattice_intersection(b1, b2):
    """Basis columns of the intersection of two full-rank column lattices."""
    n = len(b1)
    # x = b1.y = b2.z  ->  [b1 | -b2].(y,z) = 0
    stacked = [[b1[i][j] for j in range(len(b1[0]))] + [-b2[i][j] for j in range(len(b2[0]))]
               for i in range(n)]
    ker = kernel_int(stacked)
    ys = [[ker[i][j] for j in range(len(ker[0]))] for i in range(len(b1[0]))]
    cand = mat_mul(b1, ys)
    return col_hnf(cand)


# ---------------------------------------------------------------------------
# Exact LLL on a Gram matrix (integer arithmetic throughout)

def lll_gram(gram, delta=Fraction(3, 4)):
    """LLL-reduce a positive definite rational Gram matrix.

    Returns the unimodular transform t (columns) such that t^T.gram.t is
    reduced. Exact rational Gram-Schmidt; the Gram of the working basis is
    maintained incrementally so the cost stays polynomial.
    """
    n = len(gram)
    if n == 0:
        return []
    t = identity(n)
    g = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]

    def swap(i, j):
        for r in range(n):
            t[r][i], t[r][j] = t[r][j], t[r][i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            bi = g[i][i]
            for j in range(i):
                mu[i][j] = (g[i][j] - sum(mu[i][k] * mu[j][k] * bstar[k] for k in range(j))) / bstar[j]
                bi -= mu[i][j] ** 2 * bstar[j]
            bstar[i] = bi
        return mu, bstar

    def shear_exact(k, j, q):
        if q == 0:
            return
        gkk = g[k][k] - 2 * q * g[k][j] + q * q * g[j][j]
        for r in range(n):
            t[r][k] -= q * t[r][j]
        for r in range(n):
            g[r][k] = g[r][k] - q * g[r][j]
        for r in range(n):
            g[k][r] = g[r][k]
        g[k][k] = gkk

    kk = 1
    mu, bstar = gso()
    guard = 0
    while kk < n:
        guard += 1
        if guard > 100000:
            raise RuntimeError("LLL failed to terminate")
        for j in range(kk - 1, -1, -1):
            q = round(mu[kk][j])
            if q:
                shear_exact(kk, j, q)
                for jj in range(j):
                    mu[kk][jj] -= q * mu[j][jj]
                mu[kk][j] -= q
        if bstar[kk] >= (delta - mu[kk][kk - 1] ** 2) * bstar[kk - 1]:
            kk += 1
        else:
            swap(kk, kk - 1)
            mu, bstar = gso()
            kk = max(kk - 1, 1)
        if kk < n:
            # refresh row kk of the GSO data (entries above are unchanged)
            bi = g[kk][kk]
            for j in range(kk):
                mu[kk][j] = (g[kk][j] - sum(mu[kk][m_] * mu[j][m_] * bstar[m_]
                                            for m_ in range(j))) / bstar[j]
                bi -= mu[kk][j] ** 2 * bstar[j]
            bstar[kk] = bi
    return t


# ---------------------------------------------------------------------------
# Exact floor/ceil of c +/- sqrt(B) for rationals

def floor_sqrt_frac(b: Fraction) -> int:
    """floor(sqrt(b)) for b >= 0."""
    assert b >= 0
    return isqrt(b.numerator * b.denominator) // b.denominator


def floor_plus_sqrt(mu: Fraction, b: Fraction) -> int:
    """Largest integer x with (x - mu)^2 <= b or x <= mu; i.e. floor(mu + sqrt(b))."""
    x = floor_sqrt_frac(b) + (mu.numerator // mu.denominator)
    while (x + 1 - mu) <= 0 or (x + 1 - mu) ** 2 <= b:
        x += 1
    while (x - mu) > 0 and (x - mu) ** 2 > b:
        x -= 1
    return x


def ceil_minus_sqrt(mu: Fraction, b: Fraction) -> int:
    """Smallest integer x with (x - mu)^2 <= b or x >= mu; i.e. ceil(mu - sqrt(b))."""
    return -floor_plus_sqrt(-mu, b)
