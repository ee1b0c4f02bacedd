"""Finite discriminant quadratic forms A_L = L^dual / L.

Presented in Smith normal form; q takes values in Q/2Z, the pairing b in
Q/Z, both stored as reduced fractions. The isomorphism test is a pruned
brute-force search over generator images, so group orders are capped.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, lcm

from . import intmat as im
from .lattices import IntLattice, LatticeError

DEFAULT_ISO_CAP = 10 ** 4


class DiscForm:
    """Finite quadratic form on a product of cyclic groups Z/d_1 x ... x Z/d_k."""

    def __init__(self, orders, q_diag, b_mat, gens=None, reduction=None, lattice=None):
        self.orders = tuple(int(d) for d in orders)
        assert all(d > 1 for d in self.orders)
        self.q_diag = tuple(Fraction(x) % 2 for x in q_diag)
        self.b = tuple(tuple(Fraction(x) % 1 for x in row) for row in b_mat)
        self.gens = gens                 # rational vectors in lattice coords
        self._reduction = reduction      # matrix mapping dual vectors to A-coords
        self.lattice = lattice
        self._elements = None
        self._buckets = None

    # -- construction --------------------------------------------------------

    @classmethod
    def from_lattice(cls, lat: IntLattice) -> "DiscForm":
        if lat.is_degenerate:
            raise LatticeError("discriminant form of a degenerate lattice")
        g = [list(r) for r in lat.gram]
        d, u, v = im.snf(g)
        n = lat.rank
        ug = im.mat_mul(u, g)
        w = im.inv_frac(ug)  # columns are preimages of the standard generators
        orders, gens, keep = [], [], []
        for i in range(n):
            di = d[i][i]
            if di > 1:
                orders.append(di)
                gens.append([w[r][i] for r in range(n)])
                keep.append(i)
        q_diag = [im.bilinear(g, gi, gi) % 2 for gi in gens]
        b_mat = [[im.bilinear(g, gens[i], gens[j]) % 1 for j in range(len(gens))]
                 for i in range(len(gens))]
        red = [ug[i] for i in keep]
        return cls(orders, q_diag, b_mat, gens=gens, reduction=red, lattice=lat)

    @property
    def group_order(self):
        out = 1
        for d in self.orders:
            out *= d
        return out

    @property
    def length(self):
        """Minimal number of generators of the underlying group."""
        return len(self.orders)

    def negated(self) -> "DiscForm":
        return DiscForm(self.orders,
                        [(-x) % 2 for x in self.q_diag],
                        [[(-x) % 1 for x in row] for row in self.b])

    # -- element arithmetic ---------------------------------------------------

    def reduce(self, x):
        return tuple(int(c) % d for c, d in zip(x, self.orders))

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x):
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def zero(self):
        return (0,) * len(self.orders)

    def q_of(self, x) -> Fraction:
        total = sum(Fraction(x[i] * x[i]) * self.q_diag[i] for i in range(len(x)))
        for i in range(len(x)):
            for j in range(i + 1, len(x)):
                total += 2 * x[i] * x[j] * self.b[i][j]
        return total % 2

    def b_of(self, x, y) -> Fraction:
        total = Fraction(0)
        for i in range(len(x)):
            if x[i]:
                row = self.b[i]
                for j in range(len(y)):
                    if y[j]:
                        total += x[i] * y[j] * row[j]
        return total % 1

    def order_of(self, x) -> int:
        out = 1
        for c, d in zip(x, self.orders):
            out = lcm(out, d // gcd(d, c))
        return out

    def elements(self):
        if self._elements is None:
            self._elements = [tuple(t) for t in product(*[range(d) for d in self.orders])]
        return self._elements

    def coords_of(self, v):
        """A-coordinates of a rational vector lying in the dual lattice."""
        assert self._reduction is not None
        out = []
        for i, row in enumerate(self._reduction):
            val = sum(Fraction(row[j]) * Fraction(v[j]) for j in range(len(v)))
            if val.denominator != 1:
                raise LatticeError("vector is not in the dual lattice")
            out.append(int(val) % self.orders[i])
        return tuple(out)

    def lift(self, x):
        """A rational vector (lattice coords) representing the class x."""
        assert self.gens is not None
        n = len(self.gens[0]) if self.gens else (self.lattice.rank if self.lattice else 0)
        out = [Fraction(0)] * n
        for c, g in zip(x, self.gens):
            for i in range(n):
                out[i] += c * g[i]
        return out

    # -- subgroup machinery ---------------------------------------------------

    def subgroup_closure(self, gens):
        seen = {self.zero()}
        frontier = [self.zero()]
        gens = [self.reduce(g) for g in gens]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def isotropic_subgroups(self):
        """All totally isotropic subgroups (q vanishes), as frozensets."""
        iso_elems = [x for x in self.elements() if self.q_of(x) == 0]
        found = {frozenset([self.zero()])}
        frontier = [frozenset([self.zero()])]
        while frontier:
            nxt = []
            for sub in frontier:
                for x in iso_elems:
                    if x in sub:
                        continue
                    closure = frozenset(self.subgroup_closure(list(sub) + [x]))
                    if closure in found:
                        continue
                    if all(self.q_of(y) == 0 for y in closure):
                        found.add(closure)
                        nxt.append(closure)
            frontier = nxt
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    # -- isomorphism ------------------------------------------------------------

    def _bucket_table(self, sign):
        key = (sign,)
        if self._buckets is None:
            self._buckets = {}
        if key not in self._buckets:
            table = {}
            for x in self.elements():
                k = (self.order_of(x), (sign * self.q_of(x)) % 2)
                table.setdefault(k, []).append(x)
            self._buckets[key] = table
        return self._buckets[key]

    def hom_images_compatible(self, other, sign, cap):
        """Witness images of self's generators under an isomorphism onto other
        with q(phi(x)) = sign*q(x); None if there is none."""
        if self.group_order != other.group_order:
            return None
        if sorted(self.orders) != sorted(other.orders):
            return None
        if self.group_order > cap:
            raise LatticeError(
                f"discriminant group of order {self.group_order} exceeds the "
                f"isomorphism-search cap {cap}")
        buckets = other._bucket_table(1)
        mine = {}
        for x in self.elements():
            k = (self.order_of(x), (sign * self.q_of(x)) % 2)
            mine.setdefault(k, []).append(x)
        for k, v in mine.items():
            if len(buckets.get(k, [])) != len(v):
                return None
        k_gens = len(self.orders)
        images = [None] * k_gens

        def extend(i):
            if i == k_gens:
                sub = other.subgroup_closure(images)
                return len(sub) == other.group_order
            gi_key = (self.orders[i], (sign * self.q_diag[i]) % 2)
            for y in buckets.get(gi_key, []):
                if other.order_of(y) != self.orders[i]:
                    continue
                ok = True
                for j in range(i):
                    want = (sign * self.b[i][j]) % 1
                    if other.b_of(y, images[j]) != want:
                        ok = False
                        break
                if not ok:
                    continue
                images[i] = y
                if extend(i + 1):
                    return True
                images[i] = None
            return False

        if extend(0):
            return list(images)
        return None


def disc_forms_isomorphic(a: DiscForm, b: DiscForm, cap=DEFAULT_ISO_CAP):
    """(bool, witness generator images) for an isometry of finite forms."""
    w = a.hom_images_compatible(b, 1, cap)
    return (w is not None), w


def disc_forms_anti_isomorphic(a: DiscForm, b: DiscForm, cap=DEFAULT_ISO_CAP):
    w = a.hom_images_compatible(b, -1, cap)
    return (w is not None), w


def same_genus(l1: IntLattice, l2: IntLattice, cap=DEFAULT_ISO_CAP) -> bool:
    """Genus equality via equal signatures plus isomorphic discriminant forms."""
    if l1.signature != l2.signature:
        return False
    if l1.disc != l2.disc:
        return False
    ok, _ = disc_forms_isomorphic(l1.disc_form(), l2.disc_form(), cap=cap)
    return ok


def overlattices(lat: IntLattice, cap=256):
    """All even overlattices, one per isotropic subgroup of A_L.

    Returns a list of (overlattice, subgroup_elements, basis_over_lat) with
    basis columns rational over lat; index equals the subgroup order.
    """
    a = lat.disc_form()
    if a.group_order > cap:
        raise LatticeError(f"discriminant group order {a.group_order} exceeds cap {cap}")
    out = []
    n = lat.rank
    for sub in a.isotropic_subgroups():
        reps = [a.lift(x) for x in sorted(sub)]
        den = 1
        for r in reps:
            for c in r:
                den = den * c.denominator // gcd(den, c.denominator)
        cols = [[den if i == j else 0 for i in range(n)] for j in range(n)]
        cols += [[int(c * den) for c in r] for r in reps]
        h = im.col_hnf(im.from_columns(cols))
        basis = [[Fraction(x, den) for x in col] for col in h]
        gram = [[im.bilinear([list(r) for r in lat.gram], u, v) for v in basis] for u in basis]
        gi = [[int(x) for x in row] for row in gram]
        if any(gram[i][j] != gi[i][j] for i in range(n) for j in range(n)):
            raise RuntimeError("overlattice gram not integral; internal error")
        m = IntLattice(gi)
        assert m.disc * len(sub) ** 2 == lat.disc
        out.append((m, sorted(sub), im.from_columns(basis)))
    return out
