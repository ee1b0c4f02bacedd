"""Exact branch-and-bound enumeration over definite lattices.

Short vectors, close vectors, the inhomogeneous quadratic inequalities used
by the chamber engine, Kneser p-neighbors, and small-rank covering radii.
Every bound and every verdict is computed in rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction

from . import intmat as im
from .lattices import IntLattice, LatticeError


def _positive_gram(lat: IntLattice):
    if lat.is_positive_definite:
        return [list(r) for r in lat.gram]
    if lat.is_negative_definite:
        return [[-x for x in r] for r in lat.gram]
    raise LatticeError("enumeration requires a definite lattice")


def _ldl(gram):
    """gram = u^T d u with u unit upper triangular; gram positive definite."""
    n = len(gram)
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        u[i][i] = Fraction(1)
    for i in range(n):
        s = Fraction(gram[i][i])
        for k in range(i):
            s -= d[k] * u[k][i] * u[k][i]
        d[i] = s
        if s <= 0:
            raise LatticeError("gram matrix is not positive definite")
        for j in range(i + 1, n):
            t = Fraction(gram[i][j])
            for k in range(i):
                t -= d[k] * u[k][i] * u[k][j]
            u[i][j] = t / d[i]
    return d, u


def _isqrt_floor_ratio(num, den):
    """floor(sqrt(num/den)) for nonnegative integers, den > 0."""
    from math import isqrt
    if num <= 0:
        return 0
    return isqrt(num // den) if den == 1 else isqrt(num * den) // den


def _enumerate(gram, target, bound, ldl=None):
    """All integer x with (x - target)^T gram (x - target) <= bound.

    gram positive definite (rational entries as ints/Fractions), target a
    rational vector, bound a rational. Deterministic lexicographic output.
    A precomputed LDL pair may be supplied to skip the decomposition.

    The recursion runs on scaled integers: with M the common denominator of
    the Gram-Schmidt coefficients and the target, shifts live in units of
    1/M^3 and the remainder in units of 1/R, so no fractions appear inside
    the search tree.
    """
    from math import isqrt

    n = len(gram)
    if n == 0:
        return [[]] if bound >= 0 else []
    d, u = ldl if ldl is not None else _ldl(gram)
    target = [Fraction(t) for t in target]
    bound = Fraction(bound)
    if bound < 0:
        return []
    from math import isqrt, lcm
    mm = 1
    for i in range(n):
        mm = lcm(mm, target[i].denominator)
        for j in range(i + 1, n):
            mm = lcm(mm, u[i][j].denominator)
    m3 = mm ** 3
    dd_l = 1
    for di in d:
        dd_l = lcm(dd_l, di.denominator)
    rden = lcm(mm ** 6 * dd_l, bound.denominator)
    u_i = [[int(u[i][j] * mm) for j in range(n)] for i in range(n)]
    tgt_m = [int(t * mm) for t in target]          # target in 1/M units
    mu0 = [t * mm * mm for t in tgt_m]             # target in 1/M^3 units
    # d_i y^2 with y in 1/M^3 units equals f_i num^2 / rden
    f_i = []
    for di in d:
        val = di * rden / (mm ** 6)
        assert val.denominator == 1
        f_i.append(int(val))
    rem0 = int(bound * rden)
    out = []
    x = [0] * n

    def rec(i, rem, shift):
        # shift[j] in 1/M^3 units; rem in 1/rden units
        mu = mu0[i] - shift[i]
        fi = f_i[i]
        s = isqrt(rem // fi)
        while fi * (s + 1) * (s + 1) <= rem:
            s += 1
        lo = -((s - mu) // m3)
        hi = (mu + s) // m3
        for xi in range(lo, hi + 1):
            num = m3 * xi - mu
            rem2 = rem - fi * num * num
            if rem2 < 0:
                continue
            x[i] = xi
            if i == 0:
                out.append(x.copy())
            else:
                diff = mm * mm * xi - mm * tgt_m[i]   # (x_i - target_i) in 1/M^2
                shift2 = shift.copy()
                for j in range(i):
                    uji = u_i[j][i]
                    if uji:
                        shift2[j] += uji * diff
                rec(i - 1, rem2, shift2)

    rec(n - 1, rem0, [0] * n)
    out.sort()
    return out


def short_vectors(lat: IntLattice, bound, strict=False):
    """Nonzero vectors with |v^2| <= bound (or == bound if strict), one per
    +/- pair, sorted lexicographically.

    The Gram matrix is LLL-reduced first so the branch-and-bound tree stays
    small even for skew input bases; solutions are mapped back exactly.
    """
    g = _positive_gram(lat)
    n = lat.rank
    t = im.lll_gram(g) if n > 2 else im.identity(n)
    g2 = im.mat_mul(im.mat_mul(im.transpose(t), g), t)
    sols = _enumerate(g2, [0] * n, Fraction(bound))
    out = []
    for z in sols:
        if not any(z):
            continue
        v = im.mat_vec(t, z)
        nrm = im.bilinear(g, v, v)
        if strict and nrm != bound:
            continue
        # keep one representative per +/- pair: first nonzero coordinate > 0
        lead = next(x for x in v if x)
        if lead > 0:
            out.append(v)
    out.sort()
    return out


def close_vectors(lat: IntLattice, target, radius_sq):
    """All v with |v - target|^2 <= radius_sq in the positive definite form."""
    g = _positive_gram(lat)
    return _enumerate(g, list(target), Fraction(radius_sq))


def close_vectors_exact(lat: IntLattice, target, value):
    """All v with |v - target|^2 == value exactly."""
    g = _positive_gram(lat)
    out = []
    for v in _enumerate(g, list(target), Fraction(value)):
        diff = [Fraction(v[i]) - Fraction(target[i]) for i in range(len(v))]
        if im.bilinear(g, diff, diff) == value:
            out.append(v)
    return out


def quadratic_triple_solutions(q, b, c, ldl=None, qinv=None):
    """All integer x with x^T q x + 2 b^T x + c <= 0, q positive definite.

    Entries of q, b, c may be rational; completing the square reduces this to
    a close-vector enumeration. ldl/qinv may be supplied when q is reused.
    """
    n = len(q)
    qf = [[Fraction(x) for x in row] for row in q]
    bf = [Fraction(x) for x in b]
    if qinv is None:
        qinv = im.inv_frac(qf)
    center = [-sum(qinv[i][j] * bf[j] for j in range(n)) for i in range(n)]
    bound = sum(bf[i] * -center[i] for i in range(n)) - Fraction(c)
    # (x - center)^T q (x - center) <= b^T qinv b - c
    if bound < 0:
        return []
    return _enumerate(qf, center, bound, ldl=ldl)


# ---------------------------------------------------------------------------
# Kneser p-neighbors

def _neighbor_from_line(lat: IntLattice, p, v):
    """The p-neighbor attached to an admissible vector v (norm divisible by
    2p^2 after adjustment), or None if the line is inadmissible."""
    g = [list(r) for r in lat.gram]
    n = lat.rank
    nv = im.bilinear(g, v, v)
    pv = [sum(g[i][j] * v[j] for j in range(n)) for i in range(n)]  # pairing vector
    if all(x % p == 0 for x in pv):
        return None  # v pairs trivially mod p: cannot adjust / degenerate line
    # adjust v by p*w so that v^2 = 0 mod 2p^2; need v.w = -nv/(2p) mod p
    assert nv % (2 * p) == 0
    tgt = (-(nv // (2 * p))) % p
    w = None
    for i in range(n):
        if pv[i] % p:
            inv = pow(pv[i] % p, -1, p)
            w = [0] * n
            w[i] = (tgt * inv) % p
            break
    v = [v[i] + p * w[i] for i in range(n)]
    assert im.bilinear(g, v, v) % (2 * p * p) == 0
    pv = [sum(g[i][j] * v[j] for j in range(n)) for i in range(n)]
    # basis of {x : x.v = 0 mod p} + Z*(v/p), as rational columns over lat
    cols = []
    piv = next(i for i in range(n) if pv[i] % p)
    inv = pow(pv[piv] % p, -1, p)
    for i in range(n):
        if i == piv:
            col = [0] * n
            col[piv] = p
            cols.append(col)
        else:
            col = [0] * n
            col[i] = 1
            col[piv] = (-(pv[i] % p) * inv) % p
            cols.append(col)
    cols.append([Fraction(x, p) for x in v])
    den = p
    icols = [[int(Fraction(x) * den) for x in col] for col in cols]
    h = im.col_hnf(im.from_columns(icols))
    basis = [[Fraction(x, den) for x in col] for col in h]
    gram = [[im.bilinear(g, a, bb) for bb in basis] for a in basis]
    gi = [[int(x) for x in row] for row in gram]
    if gram != [[Fraction(x) for x in row] for row in gi]:
        raise RuntimeError("neighbor gram not integral; internal error")
    nb = IntLattice(gi)
    if any(gi[i][i] % 2 for i in range(n)):
        raise RuntimeError("neighbor not even; internal error")
    assert nb.disc == lat.disc
    return nb


def p_neighbors(lat: IntLattice, p):
    """Kneser p-neighbors of a definite even lattice, one per admissible
    isotropic line of L/pL; empty when no line is admissible."""
    from itertools import product

    if not lat.is_definite:
        raise LatticeError("p-neighbors need a definite lattice")
    n = lat.rank
    g = [list(r) for r in lat.gram]
    out = []
    need = 2 * p if p != 2 else 4
    for lead in range(n):
        for tail in product(range(p), repeat=n - lead - 1):
            v = [0] * lead + [1] + list(tail)
            nv = im.bilinear(g, v, v)
            if nv % need:
                continue
            nb = _neighbor_from_line(lat, p, v)
            if nb is not None:
                out.append(nb)
    return out


def neighbor_closure(lat: IntLattice, primes=(2, 3, 5), cap=10 ** 4, stop=None):
    """Breadth-first closure of the p-neighbor step, deduplicated by isometry.

    Returns representatives of the isometry classes discovered; admissibility
    is checked per line, so p may divide the determinant. ``stop`` may be a
    predicate on the classes found so far; closure ends early when it fires.
    """
    from .isometries import definite_isometry_exists

    classes = [lat]
    frontier = [lat]
    while frontier:
        nxt = []
        for cur in frontier:
            for p in primes:
                for nb in p_neighbors(cur, p):
                    if not any(definite_isometry_exists(nb, c) for c in classes):
                        classes.append(nb)
                        nxt.append(nb)
                        if len(classes) > cap:
                            raise LatticeError("neighbor closure cap exceeded")
                        if stop is not None and stop(classes):
                            return classes
        frontier = nxt
    return classes


# ---------------------------------------------------------------------------
# Covering radius (rank <= cap via exact Voronoi vertex enumeration)

COVERING_RANK_CAP = 5


def _voronoi_relevant(lat: IntLattice):
    """Voronoi-relevant vectors of the positive form: v such that +/-v are the
    unique minima of their class in L/2L (Conway-Sloane criterion)."""
    g = _positive_gram(lat)
    n = lat.rank
    rel = []
    # enumerate classes of L/2L by representative c in {0,1}^n
    for bits in range(1, 2 ** n):
        c = [(bits >> i) & 1 for i in range(n)]
        # minimize |c + 2y|^2 = 4 |y + c/2|^2 over y
        target = [Fraction(-ci, 2) for ci in c]
        r0 = im.bilinear(g, [Fraction(x) for x in c], [Fraction(x) for x in c])
        best = None
        sols = _enumerate(g, target, Fraction(r0, 4))
        vals = []
        for y in sols:
            vec = [c[i] + 2 * y[i] for i in range(n)]
            nrm = im.bilinear(g, vec, vec)
            vals.append((nrm, vec))
        mn = min(v for v, _ in vals)
        mins = [vec for v, vec in vals if v == mn]
        if len(mins) == 2:
            v = mins[0] if mins[0] > mins[1] else mins[1]
            rel.append(v)
        else:
            assert len(mins) % 2 == 0 and len(mins) > 2
    return rel


def _first_vertex(cons, dim):
    """A vertex of the bounded polytope {a.x <= b} by lexicographic LPs."""
    a_ge = [[-x for x in a] for a, _ in cons]
    b_ge = [-b for _, b in cons]
    eqs_a, eqs_b = [], []
    pt = None
    for k in range(dim):
        c = [Fraction(0)] * dim
        c[k] = Fraction(1)
        rows = a_ge + eqs_a + [[-x for x in ea] for ea in eqs_a]
        rhs = b_ge + eqs_b + [-eb for eb in eqs_b]
        from .simplex import lp_min, OPTIMAL
        status, val, x = lp_min(c, rows, rhs)
        assert status == OPTIMAL, "Voronoi cell should be bounded and nonempty"
        eqs_a.append(c)
        eqs_b.append(val)
        pt = x
    return tuple(pt)


def polytope_vertices(cons, dim):
    """All vertices of the bounded polytope {x : a.x <= b}, exactly.

    Breadth-first search along edges; degenerate vertices are handled by
    enumerating (dim-1)-subsets of their active sets.
    """
    from itertools import combinations

    if dim == 0:
        return [()]
    if dim == 1:
        lo, hi = None, None
        for a, b in cons:
            if a[0] > 0:
                v = Fraction(b) / a[0]
                hi = v if hi is None or v < hi else hi
            elif a[0] < 0:
                v = Fraction(b) / a[0]
                lo = v if lo is None or v > lo else lo
        assert lo is not None and hi is not None and lo <= hi
        return [(lo,)] if lo == hi else [(lo,), (hi,)]

    start = _first_vertex(cons, dim)
    seen = {start}
    queue = [start]
    while queue:
        v = queue.pop()
        slacks = [b - sum(a[j] * v[j] for j in range(dim)) for a, b in cons]
        active = [i for i, s in enumerate(slacks) if s == 0]
        for sub in combinations(active, dim - 1):
            mat = [list(cons[i][0]) for i in sub]
            d = _line_kernel(mat, dim)
            if d is None:
                continue
            for sgn in (1, -1):
                dd = [sgn * x for x in d]
                # direction must keep every active constraint satisfied
                if any(sum(cons[i][0][j] * dd[j] for j in range(dim)) > 0
                       for i in active):
                    continue
                # ray shoot to the neighbouring vertex
                best_t = None
                for i, (a, b) in enumerate(cons):
                    ad = sum(a[j] * dd[j] for j in range(dim))
                    if ad > 0:
                        t = slacks[i] / ad
                        if best_t is None or t < best_t:
                            best_t = t
                assert best_t is not None, "polytope is unbounded"
                if best_t == 0:
                    continue
                w = tuple(v[j] + best_t * dd[j] for j in range(dim))
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return sorted(seen)


def _line_kernel(mat, dim):
    """A nonzero rational kernel vector of a (dim-1) x dim matrix of rank
    dim-1, or None when the rank is lower."""
    m = [[Fraction(x) for x in row] for row in mat]
    rows = len(m)
    piv_cols = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    if r != dim - 1:
        return None
    free = next(c for c in range(dim) if c not in piv_cols)
    d = [Fraction(0)] * dim
    d[free] = Fraction(1)
    for i, c in enumerate(piv_cols):
        d[c] = -m[i][free]
    return d


def covering_radius_sq(lat: IntLattice, rank_cap=COVERING_RANK_CAP) -> Fraction:
    """Exact squared covering radius of the definite form, rank <= cap."""
    if lat.rank > rank_cap:
        raise LatticeError(f"covering radius unsupported above rank {rank_cap}")
    g = _positive_gram(lat)
    n = lat.rank
    if n == 0:
        return Fraction(0)
    rel = _voronoi_relevant(lat)
    cons = []
    seen = set()
    for v in rel:
        for s in (1, -1):
            gv = tuple(s * sum(g[i][j] * v[j] for j in range(n)) for i in range(n))
            nv = im.bilinear(g, v, v)
            if gv not in seen:
                seen.add(gv)
                cons.append((gv, Fraction(nv, 2)))
    verts = polytope_vertices(cons, n)
    assert verts, "Voronoi cell vertex enumeration came back empty"
    best = Fraction(0)
    for pt in verts:
        nrm = im.bilinear(g, list(pt), list(pt))
        if nrm > best:
            best = nrm
    return best


class TripleSolver:
    """Repeated quadratic-triple solves against one positive definite form.

    Holds the LDL decomposition and its integer-scaled Gram-Schmidt data; a
    solve takes (b, c) and enumerates x^T Q x + 2 b^T x + c <= 0 without
    rebuilding the decomposition or inverting Q.
    """

    def __init__(self, d, u):
        from math import lcm
        self.d = list(d)
        self.u = [list(r) for r in u]
        self.n = len(d)
        mm = 1
        for i in range(self.n):
            for j in range(i + 1, self.n):
                mm = lcm(mm, Fraction(u[i][j]).denominator)
        self.mu_scale = mm
        self.u_int = [[int(Fraction(u[i][j]) * mm) for j in range(self.n)]
                      for i in range(self.n)]
        self.dd_l = 1
        for di in self.d:
            self.dd_l = lcm(self.dd_l, Fraction(di).denominator)

    def scaled(self, factor):
        """Solver for factor*Q (factor > 0 rational) sharing the u-cache."""
        out = TripleSolver.__new__(TripleSolver)
        f = Fraction(factor)
        out.d = [di * f for di in self.d]
        out.u = self.u
        out.n = self.n
        out.mu_scale = self.mu_scale
        out.u_int = self.u_int
        from math import lcm
        out.dd_l = 1
        for di in out.d:
            out.dd_l = lcm(out.dd_l, di.denominator)
        return out

    def center(self, b):
        """Solve Q z = -b through the LDL factors."""
        n = self.n
        y = [-Fraction(x) for x in b]
        # forward: U^T w = y
        w = [Fraction(0)] * n
        for i in range(n):
            acc = y[i]
            for k in range(i):
                acc -= self.u[k][i] * w[k]
            w[i] = acc
        for i in range(n):
            w[i] /= self.d[i]
        z = [Fraction(0)] * n
        for i in range(n - 1, -1, -1):
            acc = w[i]
            for k in range(i + 1, n):
                acc -= self.u[i][k] * z[k]
            z[i] = acc
        return z

    def solve(self, b, c, strict_value=None):
        """All integer x with x^T Q x + 2 b^T x + c <= 0; when strict_value
        is given, keep only x with the form exactly equal to it."""
        from math import isqrt, lcm

        n = self.n
        z0 = self.center(b)
        bound = -sum(Fraction(b[i]) * z0[i] for i in range(n)) - Fraction(c)
        if bound < 0:
            return []
        mm = self.mu_scale
        extra = 1
        for t in z0:
            extra = lcm(extra, t.denominator)
        # scale so target and u share one denominator M
        M = mm * extra
        m3 = M ** 3
        u_int = [[x * extra for x in row] for row in self.u_int]
        tgt_m = [int(t * M) for t in z0]
        mu0 = [t * M * M for t in tgt_m]
        rden = lcm(M ** 6 * self.dd_l, bound.denominator)
        f_i = []
        for di in self.d:
            val = di * rden / (M ** 6)
            assert val.denominator == 1
            f_i.append(int(val))
        rem0 = int(bound * rden)
        out = []
        x = [0] * n

        def rec(i, rem, shift):
            mu = mu0[i] - shift[i]
            fi = f_i[i]
            s = isqrt(rem // fi)
            while fi * (s + 1) * (s + 1) <= rem:
                s += 1
            lo = -((s - mu) // m3)
            hi = (mu + s) // m3
            for xi in range(lo, hi + 1):
                num = m3 * xi - mu
                rem2 = rem - fi * num * num
                if rem2 < 0:
                    continue
                x[i] = xi
                if i == 0:
                    out.append(x.copy())
                else:
                    diff = M * M * xi - M * tgt_m[i]
                    shift2 = shift.copy()
                    for j in range(i):
                        uji = u_int[j][i]
                        if uji:
                            shift2[j] += uji * diff
                    rec(i - 1, rem2, shift2)

        rec(n - 1, rem0, [0] * n)
        out.sort()
        return out
