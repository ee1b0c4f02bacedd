"""Hyperbolic-lattice structure: isometry spectral types, entropy, cusps.

The elliptic / parabolic / hyperbolic trichotomy is decided exactly: the
characteristic polynomial is factored over Z, factors are tested against
cyclotomic polynomials, and any remaining factor has its largest real root
isolated by rational bisection. No verdict ever rests on floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import sympy

from . import intmat as im
from .lattices import IntLattice, LatticeError, coords_of, quotient_by_isotropic, root_part

ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
HYPERBOLIC = "hyperbolic"

SALEM_INTERVAL_WIDTH = Fraction(1, 10 ** 8)


class Isometry:
    """Integer matrix g with g^T.gram.g = gram, acting on column vectors."""

    def __init__(self, lat: IntLattice, matrix):
        self.lattice = lat
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        g = [list(r) for r in lat.gram]
        mt = im.transpose([list(r) for r in self.matrix])
        if im.mat_mul(im.mat_mul(mt, g), [list(r) for r in self.matrix]) != g:
            raise LatticeError("matrix does not preserve the Gram matrix")

    def __call__(self, v):
        return im.mat_vec([list(r) for r in self.matrix], coords_of(v))

    def compose(self, other: "Isometry") -> "Isometry":
        return Isometry(self.lattice, im.mat_mul([list(r) for r in self.matrix],
                                                 [list(r) for r in other.matrix]))

    def inverse(self) -> "Isometry":
        inv = im.inv_frac([list(r) for r in self.matrix])
        return Isometry(self.lattice, [[int(x) for x in row] for row in inv])

    def power(self, k: int) -> "Isometry":
        if k < 0:
            return self.inverse().power(-k)
        out = Isometry(self.lattice, im.identity(self.lattice.rank))
        base = self
        while k:
            if k & 1:
                out = out.compose(base)
            base = base.compose(base)
            k >>= 1
        return out

    @property
    def is_identity(self):
        return self.matrix == tuple(tuple(row) for row in im.identity(self.lattice.rank))

    def __eq__(self, other):
        return isinstance(other, Isometry) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)


@dataclass
class SpectralClass:
    kind: str
    order: int | None = None                 # finite order for elliptic
    fixed_isotropic: tuple | None = None     # primitive cusp for parabolic
    salem_poly: tuple | None = None          # irreducible factor coefficients
    salem_interval: tuple | None = None      # rational (lo, hi) around radius


def positive_norm_vector(lat: IntLattice):
    """An integer vector of positive square in a hyperbolic lattice."""
    n = lat.rank
    for i in range(n):
        if lat.gram[i][i] > 0:
            v = [0] * n
            v[i] = 1
            return v
    for i in range(n):
        for j in range(n):
            if i != j and lat.gram[i][j] != 0:
                # optimize e_i + t e_j over small t
                for t in range(-6, 7):
                    v = [0] * n
                    v[i], v[j] = 1, t
                    if lat.norm(v) > 0:
                        return v
    # fall back to exact congruence diagonalization
    m = [[Fraction(x) for x in row] for row in lat.gram]
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][i] != 0), None)
        if piv is None:
            for i in range(k, n):
                for j in range(i + 1, n):
                    if m[i][j] != 0:
                        for t in range(n):
                            m[i][t] += m[j][t]
                        for t in range(n):
                            m[t][i] += m[t][j]
                        for t in range(n):
                            p[t][i] += p[t][j]
                        piv = i
                        break
                if piv is not None:
                    break
        if piv is None:
            break
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            for t in range(n):
                m[t][k], m[t][piv] = m[t][piv], m[t][k]
            for t in range(n):
                p[t][k], p[t][piv] = p[t][piv], p[t][k]
        if m[k][k] > 0:
            col = [p[t][k] for t in range(n)]
            den = 1
            for x in col:
                den = den * x.denominator // gcd(den, x.denominator)
            return [int(x * den) for x in col]
        d = m[k][k]
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / d
                for t in range(n):
                    m[i][t] -= f * m[k][t]
                for t in range(n):
                    m[t][i] -= f * m[t][k]
                for t in range(n):
                    p[t][i] -= f * p[t][k]
    raise LatticeError("no positive-norm vector found; lattice not hyperbolic?")


def is_orientation_preserving(g: Isometry, reference=None) -> bool:
    """Whether g preserves the chosen component of the positive cone."""
    lat = g.lattice
    x0 = reference if reference is not None else positive_norm_vector(lat)
    return lat.bilinear(g(x0), x0) > 0


def _charpoly_coeffs(matrix):
    p = sympy.Matrix([list(r) for r in matrix]).charpoly()
    return [int(c) for c in p.all_coeffs()]


def _euler_phi_candidates(deg):
    out = []
    d = 1
    while True:
        if sympy.totient(d) == deg:
            out.append(d)
        d += 1
        # phi(d) >= sqrt(d/2): safe stop once d is too big
        if d > max(4 * deg * deg, 30):
            break
    return out


def _is_cyclotomic(coeffs):
    """Return d if poly (leading first) equals the d-th cyclotomic, else None."""
    x = sympy.symbols("x")
    deg = len(coeffs) - 1
    poly = sympy.Poly(coeffs, x)
    for d in _euler_phi_candidates(deg):
        if poly == sympy.Poly(sympy.cyclotomic_poly(d, x), x):
            return d
    return None


def _largest_root_interval(coeffs, width=SALEM_INTERVAL_WIDTH):
    """Isolating rational interval for the unique real root > 1."""
    def ev(t: Fraction):
        acc = Fraction(0)
        for c in coeffs:
            acc = acc * t + c
        return acc

    lead = coeffs[0]
    bound = Fraction(1) + max(abs(Fraction(c, lead)) for c in coeffs[1:]) if len(coeffs) > 1 else Fraction(2)
    lo, hi = Fraction(1), bound
    flo = ev(lo)
    fhi = ev(hi)
    assert flo != 0, "factor should not vanish at 1"
    if fhi == 0:
        hi += Fraction(1, 7)
        fhi = ev(hi)
    assert (flo < 0) != (fhi < 0), "expected a single root beyond 1"
    while hi - lo > width:
        mid = (lo + hi) / 2
        fm = ev(mid)
        if fm == 0:
            lo = mid - width / 4
            hi = mid + width / 4
            break
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return (lo, hi)


def classify_isometry(g: Isometry, reference=None) -> SpectralClass:
    """Elliptic / parabolic / hyperbolic classification, exact."""
    lat = g.lattice
    if not lat.is_hyperbolic:
        raise LatticeError("classification requires a hyperbolic lattice")
    if not is_orientation_preserving(g, reference):
        raise LatticeError("isometry swaps the two cone components")
    coeffs = _charpoly_coeffs(g.matrix)
    x = sympy.symbols("x")
    factors = sympy.factor_list(sympy.Poly(coeffs, x))[1]
    orders = []
    salem = None
    for f, mult in factors:
        fc = [int(c) for c in sympy.Poly(f, x).all_coeffs()]
        d = _is_cyclotomic(fc)
        if d is None:
            salem = fc if salem is None or len(fc) > len(salem) else salem
        else:
            orders.append(d)
    if salem is not None:
        return SpectralClass(HYPERBOLIC, salem_poly=tuple(salem),
                             salem_interval=_largest_root_interval(salem))
    m = 1
    for d in orders:
        m = lcm(m, d)
    if g.power(m).is_identity:
        order = m
        for d in sorted(sympy.divisors(m)):
            if g.power(d).is_identity:
                order = d
                break
        return SpectralClass(ELLIPTIC, order=order)
    # parabolic: extract the primitive rational fixed isotropic vector
    n = lat.rank
    gm = [list(r) for r in g.matrix]
    a = [[gm[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    fix = im.kernel_int(a)
    fcols = im.columns(fix) if fix and fix[0] else []
    assert fcols, "parabolic isometry with trivial fixed space; internal error"
    fgram = [[lat.bilinear(u, v) for v in fcols] for u in fcols]
    rad = im.kernel_int(fgram)
    rcols = im.columns(rad) if rad and rad[0] else []
    assert len(rcols) == 1, "parabolic fixed space radical should be a line"
    e = im.mat_vec(im.from_columns(fcols), rcols[0])
    d = im.gcd_list(e)
    e = [x // d for x in e]
    x0 = reference if reference is not None else positive_norm_vector(lat)
    if lat.bilinear(e, x0) < 0:
        e = [-x for x in e]
    assert g(e) == e
    return SpectralClass(PARABOLIC, fixed_isotropic=tuple(e))


def has_zero_entropy(g: Isometry) -> bool:
    return classify_isometry(g).kind != HYPERBOLIC


def eichler_siegel(lat: IntLattice, e, y) -> Isometry:
    """The transvection x -> x + (x.y)e - (x.e)y - (x.e) y^2/2 e.

    Needs e isotropic and y orthogonal to e; fixes e and acts trivially on
    the complement of <e, y>.
    """
    e = coords_of(e)
    y = coords_of(y)
    if lat.norm(e) != 0:
        raise LatticeError("e must be isotropic")
    if lat.bilinear(e, y) != 0:
        raise LatticeError("y must be orthogonal to e")
    y2 = lat.norm(y)
    assert y2 % 2 == 0
    n = lat.rank
    cols = []
    for j in range(n):
        x = [0] * n
        x[j] = 1
        xy = lat.bilinear(x, y)
        xe = lat.bilinear(x, e)
        col = [x[i] + xy * e[i] - xe * y[i] - xe * (y2 // 2) * e[i] for i in range(n)]
        cols.append(col)
    return Isometry(lat, im.from_columns(cols))


def cusp_stabilizer_rank(lat: IntLattice, e) -> int:
    """m = rk(L) - 2 - rk(root part of e^perp/<e>); stabilizer infinite iff m>0."""
    e = coords_of(e)
    if im.gcd_list(e) != 1:
        raise LatticeError("cusp vector must be primitive")
    if lat.norm(e) != 0:
        raise LatticeError("cusp vector must be isotropic")
    w, _ = quotient_by_isotropic(lat, e)
    rp = root_part(w)
    return lat.rank - 2 - rp.rank


@dataclass
class CuspNormalForm:
    basis: list          # columns e, f, w_1..w_r over the source lattice
    n: int
    k: int
    ell: list
    w_lattice: IntLattice

    def gram(self):
        r = len(self.ell)
        g = [[0] * (r + 2) for _ in range(r + 2)]
        g[0][1] = g[1][0] = self.n
        g[1][1] = 2 * self.k
        for i in range(r):
            g[1][2 + i] = g[2 + i][1] = self.ell[i]
            for j in range(r):
                g[2 + i][2 + j] = self.w_lattice.gram[i][j]
        return g


def cusp_normal_form(lat: IntLattice, e) -> CuspNormalForm:
    """Basis {e, f, w_i} with Gram in the block shape (n, 2k, ell, W)."""
    e = list(coords_of(e))
    if lat.norm(e) != 0:
        raise LatticeError("e must be isotropic")
    if im.gcd_list(e) != 1:
        raise LatticeError("e must be primitive")
    nrank = lat.rank
    g = [list(r) for r in lat.gram]
    pv = [sum(g[i][j] * e[i] for i in range(nrank)) for j in range(nrank)]
    n = im.gcd_list(pv)
    f = im.solve_int([pv], [n])
    assert f is not None
    # normalize f^2 = 2k with -n <= k < n
    k0 = lat.norm(f) // 2
    k_target = ((k0 + n) % (2 * n)) - n
    alpha = (k_target - k0) // n
    f = [f[i] + alpha * e[i] for i in range(nrank)]
    k = lat.norm(f) // 2
    assert -n <= k < n
    # complete (e, f) to a basis: the span is primitive, so swapping the first
    # two columns of the SNF completion for e, f keeps the matrix unimodular
    ef = im.from_columns([e, f])
    d, u, v = im.snf(ef)
    assert d[0][0] == 1 and d[1][1] == 1, "span of e,f should be primitive"
    uinv = im.inv_unimodular(u)
    basis = [list(col) for col in im.columns(uinv)]
    rest = basis[2:]
    ws = []
    ells = []
    for vcol in rest:
        ev = lat.bilinear(e, vcol)
        assert ev % n == 0
        w = [vcol[i] - (ev // n) * f[i] for i in range(nrank)]
        lw = lat.bilinear(f, w)
        shift = -(lw // n)
        w = [w[i] + shift * e[i] for i in range(nrank)]
        ells.append(lat.bilinear(f, w))
        ws.append(w)
    full = im.from_columns([e, f] + ws)
    assert abs(im.det_bareiss(full)) == 1, "normal-form basis must be unimodular"
    wgram = [[lat.bilinear(a, b) for b in ws] for a in ws]
    wl = IntLattice(wgram, allow_degenerate=True)
    out = CuspNormalForm([e, f] + ws, n, k, ells, wl)
    # the reassembled Gram must match the basis change exactly
    bt = im.transpose(full)
    assert im.mat_mul(im.mat_mul(bt, g), full) == out.gram()
    return out


def pairing_formula_check(nf: CuspNormalForm, v, w) -> Fraction:
    """Closed-form product of v, w in normal-form coordinates.

    v = alpha e + beta f + gamma, w = x e + y f + z with beta, y nonzero;
    returns (1/(beta y)) (-(y gamma - beta z)^2/2 + N y^2 + M beta^2) where
    v^2 = 2N, w^2 = 2M.
    """
    g = nf.gram()
    alpha, beta = v[0], v[1]
    x, y = w[0], w[1]
    if beta == 0 or y == 0:
        raise LatticeError("formula needs nonzero f-coefficients")
    gamma = list(v[2:])
    z = list(w[2:])
    n2 = im.bilinear(g, list(v), list(v))
    m2 = im.bilinear(g, list(w), list(w))
    assert n2 % 2 == 0 and m2 % 2 == 0
    nn, mm = n2 // 2, m2 // 2
    wg = [list(r) for r in nf.w_lattice.gram]
    t = [y * gamma[i] - beta * z[i] for i in range(len(gamma))]
    val = Fraction(-im.bilinear(wg, t, t), 2) + nn * y * y + mm * beta * beta
    return Fraction(val, beta * y)
