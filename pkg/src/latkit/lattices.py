"""Even lattices presented by exact integer Gram matrices.

The Gram matrix is the whole representation: vectors are integer coordinate
tuples in the implicit basis. Embedded sublattices elsewhere carry explicit
column bases over an ambient lattice.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import intmat as im


class LatticeError(ValueError):
    pass


def _signature(gram):
    """(n_plus, n_minus, n_zero) of a symmetric rational matrix, exactly."""
    n = len(gram)
    m = [[Fraction(x) for x in row] for row in gram]
    plus = minus = zero = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][i] != 0), None)
        if piv is None:
            found = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if m[i][j] != 0:
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                zero += n - k
                break
            i, j = found
            for t in range(n):
                m[i][t] += m[j][t]
            for t in range(n):
                m[t][i] += m[t][j]
            piv = i
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            for t in range(n):
                m[t][k], m[t][piv] = m[t][piv], m[t][k]
        d = m[k][k]
        if d > 0:
            plus += 1
        else:
            minus += 1
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] / d
                for t in range(n):
                    m[i][t] -= f * m[k][t]
                for t in range(n):
                    m[t][i] -= f * m[t][k]
    return plus, minus, zero


class IntLattice:
    """Even lattice given by a symmetric integer Gram matrix."""

    def __init__(self, gram, name=None, allow_degenerate=False):
        g = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise LatticeError("gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(n)):
            raise LatticeError("lattice must be even (diagonal entries even)")
        self.gram = g
        self.name = name
        self._det = None
        self._sig = None
        if not allow_degenerate and n and self.det == 0:
            raise LatticeError("gram matrix is degenerate")

    # -- basic invariants ---------------------------------------------------

    @property
    def rank(self):
        return len(self.gram)

    @property
    def det(self):
        if self._det is None:
            self._det = im.det_bareiss([list(r) for r in self.gram])
        return self._det

    @property
    def disc(self):
        """Absolute value of the Gram determinant."""
        return abs(self.det)

    @property
    def signature(self):
        if self._sig is None:
            self._sig = _signature(self.gram)
        return self._sig

    @property
    def is_degenerate(self):
        return self.det == 0

    @property
    def is_negative_definite(self):
        p, m, z = self.signature
        return p == 0 and z == 0

    @property
    def is_positive_definite(self):
        p, m, z = self.signature
        return m == 0 and z == 0

    @property
    def is_definite(self):
        return self.is_negative_definite or self.is_positive_definite

    @property
    def is_hyperbolic(self):
        p, m, z = self.signature
        return p == 1 and z == 0

    def scale(self):
        """gcd of all Gram entries."""
        return im.gcd_list([x for row in self.gram for x in row])

    # -- arithmetic ---------------------------------------------------------

    def bilinear(self, u, v):
        return im.bilinear(self.gram, list(u), list(v))

    def norm(self, v):
        return self.bilinear(v, v)

    def dual_denominator_basis(self):
        """Basis of the dual lattice in coordinates of this one (columns)."""
        if self.is_degenerate:
            raise LatticeError("dual of a degenerate lattice")
        return im.inv_frac([list(r) for r in self.gram])

    def twist(self, n):
        """The multiple L(n): same group, form scaled by n."""
        if n == 0:
            raise LatticeError("scaling by zero")
        return IntLattice([[n * x for x in row] for row in self.gram],
                          name=f"{self.name}({n})" if self.name else None)

    def direct_sum(self, other):
        n, m = self.rank, other.rank
        g = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                g[n + i][n + j] = other.gram[i][j]
        name = None
        if self.name and other.name:
            name = f"{self.name}+{other.name}"
        return IntLattice(g, name=name)

    def __add__(self, other):
        return self.direct_sum(other)

    def __eq__(self, other):
        return isinstance(other, IntLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"IntLattice({self.name or ''} rank={self.rank} det={self.det})"

    def disc_form(self):
        from .discforms import DiscForm
        return DiscForm.from_lattice(self)


@dataclass(frozen=True)
class LatticeVector:
    """Integer coordinate vector tied to its owning lattice."""
    coords: tuple
    lattice: IntLattice

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError("vector length does not match lattice rank")

    @property
    def norm(self):
        return self.lattice.norm(self.coords)

    def dot(self, other):
        o = other.coords if isinstance(other, LatticeVector) else other
        return self.lattice.bilinear(self.coords, o)


def coords_of(v):
    return list(v.coords) if isinstance(v, LatticeVector) else list(v)


# ---------------------------------------------------------------------------
# Named constructors

def U(n=1):
    return IntLattice([[0, n], [n, 0]], name="U" if n == 1 else f"U({n})")


def _ade_edges(kind, n):
    if kind == "A":
        if n < 1:
            raise LatticeError("A_n needs n >= 1")
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        if n < 4:
            raise LatticeError("D_n needs n >= 4")
        edges = [(i, i + 1) for i in range(n - 3)]
        edges += [(n - 3, n - 2), (n - 3, n - 1)]
        return edges
    if kind == "E":
        if n not in (6, 7, 8):
            raise LatticeError("E_n needs n in {6,7,8}")
        edges = [(i, i + 1) for i in range(n - 2)]
        edges.append((2, n - 1))
        return edges
    raise LatticeError(f"unknown root label {kind}{n}")


def ade(kind, n):
    """Negative definite ADE lattice: roots have square -2."""
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for i, j in _ade_edges(kind, n):
        g[i][j] = g[j][i] = 1
    return IntLattice(g, name=f"{kind}{n}")


def ade_gram(kind, n):
    return ade(kind, n).gram


def rank_one(minus_norm):
    """The lattice <m> of rank one; m must be even and nonzero."""
    if minus_norm % 2 or minus_norm == 0:
        raise LatticeError("rank-one even lattice needs a nonzero even norm")
    return IntLattice([[minus_norm]], name=f"<{minus_norm}>")


# ---------------------------------------------------------------------------
# Lattice expression grammar: U, U(20), A1, D8, E8, <-4>, sums, powers, L(n)

_ATOM = re.compile(r"\s*(U|[ADE]\d+|<-?\d+>)\s*(?:\(\s*(-?\d+)\s*\))?\s*(?:\^\s*(\d+))?\s*")


def parse_lattice(expr: str) -> IntLattice:
    """Parse an expression like ``U+E8+D8``, ``A1^9`` or ``U(20)+<-2>``."""
    parts = expr.split("+")
    out = None
    for part in parts:
        m = _ATOM.fullmatch(part)
        if not m:
            raise LatticeError(f"cannot parse lattice term {part!r} "
                               f"(column {expr.find(part) + 1})")
        atom, twist, power = m.group(1), m.group(2), m.group(3)
        if atom == "U":
            lat = U(int(twist)) if twist else U()
            twist = None
        elif atom.startswith("<"):
            lat = rank_one(int(atom[1:-1]))
        else:
            lat = ade(atom[0], int(atom[1:]))
        if twist:
            lat = lat.twist(int(twist))
        k = int(power) if power else 1
        if k < 1:
            raise LatticeError("power must be positive")
        for _ in range(k):
            out = lat if out is None else out.direct_sum(lat)
    if out is None:
        raise LatticeError("empty lattice expression")
    out.name = expr.replace(" ", "")
    return out


# ---------------------------------------------------------------------------
# JSON contract

_BIG = 2 ** 53


def _enc(x: int):
    return str(x) if abs(x) >= _BIG else x


def lattice_to_json(lat: IntLattice) -> dict:
    d = {"gram": [[_enc(x) for x in row] for row in lat.gram]}
    if lat.name:
        d["name"] = lat.name
    return d


def lattice_from_json(d) -> IntLattice:
    if isinstance(d, str):
        d = json.loads(d)
    gram = [[int(x) for x in row] for row in d["gram"]]
    return IntLattice(gram, name=d.get("name"))


# ---------------------------------------------------------------------------
# Sublattice operations

def orthogonal_complement(lat: IntLattice, sub_basis):
    """Orthogonal complement of the column span of sub_basis inside lat.

    Returns (complement_lattice, inclusion_columns); the complement basis is
    primitive (saturated) in lat. The complement Gram may be degenerate when
    the input sublattice is; the result carries that information.
    """
    cols = im.columns(sub_basis)
    if not cols:
        return IntLattice([list(r) for r in lat.gram], name=lat.name), im.identity(lat.rank)
    pair = [[im.bilinear(lat.gram, c, col) for col in im.columns(im.identity(lat.rank))]
            for c in cols]
    ker = im.kernel_int(pair)
    kcols = im.columns(ker) if ker and ker[0] else []
    gram = [[im.bilinear(lat.gram, a, b) for b in kcols] for a in kcols]
    comp = IntLattice(gram, allow_degenerate=True)
    return comp, ker


def saturation(lat: IntLattice, sub_basis):
    """Basis columns of the saturation of the column span inside lat."""
    return im.saturate_cols(sub_basis)


def saturation_index(sub_basis):
    return im.saturation_index(sub_basis)


def sublattice(lat: IntLattice, basis_cols) -> IntLattice:
    cols = im.columns(basis_cols)
    gram = [[im.bilinear(lat.gram, a, b) for b in cols] for a in cols]
    return IntLattice(gram, allow_degenerate=True)


def quotient_by_isotropic(lat: IntLattice, e):
    """Gram and lift data for e^perp / <e> with e primitive isotropic.

    Returns (quotient_lattice, lift_columns) where lift_columns are vectors of
    lat projecting to the chosen quotient basis.
    """
    e = coords_of(e)
    if lat.norm(e) != 0:
        raise LatticeError("vector is not isotropic")
    if im.gcd_list(e) != 1:
        raise LatticeError("vector is not primitive")
    pair = [[sum(lat.gram[i][j] * e[i] for i in range(lat.rank)) for j in range(lat.rank)]]
    perp = im.kernel_int(pair)  # columns: basis of e^perp, saturated
    pcols = im.columns(perp)
    c = im.solve_int(perp, e)
    assert c is not None and im.gcd_list(c) == 1
    m = im.complete_to_unimodular(c)
    # quotient basis: images of columns 2.. of m under perp
    lift_cols = [im.mat_vec(perp, [m[i][j] for i in range(len(m))])
                 for j in range(1, len(m[0]))]
    gram = [[im.bilinear(lat.gram, a, b) for b in lift_cols] for a in lift_cols]
    return IntLattice(gram, allow_degenerate=True), im.from_columns(lift_cols)


def scale(lat: IntLattice) -> int:
    return lat.scale()


# ---------------------------------------------------------------------------
# Root part

@dataclass
class RootComponent:
    label: str          # e.g. "A2", "D5", "E8"
    basis: list         # simple-root vectors, ordered to match ade() Gram

    @property
    def rank(self):
        return len(self.basis)


@dataclass
class RootDecomposition:
    components: list

    @property
    def rank(self):
        return sum(c.rank for c in self.components)

    @property
    def labels(self):
        return sorted(c.label for c in self.components)

    def basis_columns(self):
        cols = []
        for c in self.components:
            cols.extend(list(v) for v in c.basis)
        return im.from_columns(cols) if cols else []


def _classify_diagram(nodes, adj):
    """Return (label, ordered nodes) for a connected simply laced diagram."""
    deg = {v: len(adj[v]) for v in nodes}
    branch = [v for v in nodes if deg[v] >= 3]
    if any(deg[v] > 3 for v in nodes) or len(branch) > 1:
        raise RuntimeError("root graph is not an ADE diagram; internal error")
    n = len(nodes)
    if not branch:
        # path: A_n
        if n == 1:
            return f"A1", nodes
        ends = [v for v in nodes if deg[v] == 1]
        order = [ends[0]]
        prev = None
        while len(order) < n:
            nxt = [w for w in adj[order[-1]] if w != prev]
            prev = order[-1]
            order.append(nxt[0])
        return f"A{n}", order
    c = branch[0]
    arms = []
    for start in adj[c]:
        arm = [start]
        prev = c
        while True:
            nxt = [w for w in adj[arm[-1]] if w != prev]
            if not nxt:
                break
            prev = arm[-1]
            arm.append(nxt[0])
        arms.append(arm)
    arms.sort(key=len)
    lens = sorted(len(a) for a in arms)
    if lens[0] == 1 and lens[1] == 1:
        # D_n: long arm (may be empty beyond the center), center, two tips
        long = arms[2] if len(arms) == 3 else []
        order = list(reversed(long)) + [c] + [arms[0][0], arms[1][0]]
        return f"D{n}", order
    if lens[:2] == [1, 2] and lens[2] in (2, 3, 4):
        # E_n with the ade() ordering: 2-arm outer..inner, center, long arm, tip
        tip, arm2, long = sorted(arms, key=len)
        order = [arm2[1], arm2[0], c] + long + [tip[0]]
        return f"E{n}", order
    raise RuntimeError("root graph is not an ADE diagram; internal error")


def root_part(lat: IntLattice) -> RootDecomposition:
    """ADE decomposition of the sublattice spanned by (-2)-roots."""
    from .enumeration import short_vectors

    if lat.rank == 0:
        return RootDecomposition([])
    p, m, z = lat.signature
    if p > 0:
        raise LatticeError("root_part expects a negative (semi)definite lattice")
    work = lat
    lift = None
    if z > 0:
        rad = im.kernel_int([list(r) for r in lat.gram])
        # quotient by the radical: complete its (saturated) basis to a basis
        # of Z^n and keep the complementary block
        sat = im.saturate_cols(rad)
        d, u, v = im.snf(sat)
        uinv = im.inv_unimodular(u)
        r = len(im.columns(sat))
        lift = [[uinv[i][j] for j in range(r, lat.rank)] for i in range(lat.rank)]
        cols = im.columns(lift)
        gram = [[im.bilinear(lat.gram, a, b) for b in cols] for a in cols]
        work = IntLattice(gram, allow_degenerate=True)
        if work.is_degenerate and work.rank:
            raise LatticeError("radical split failed")
    if work.rank == 0:
        return RootDecomposition([])
    roots = short_vectors(work, 2, strict=True)  # one per +/- pair
    allroots = []
    for r in roots:
        allroots.append(tuple(r))
        allroots.append(tuple(-x for x in r))
    if not allroots:
        return RootDecomposition([])
    # generic linear functional separating roots: geometric weights
    mx = max(abs(x) for r in allroots for x in r)
    base = 2 * mx * len(allroots[0]) + 1
    weights = [base ** i for i in range(work.rank)]
    def height(r):
        return sum(w * x for w, x in zip(weights, r))
    pos = [r for r in allroots if height(r) > 0]
    posset = set(pos)
    simple = []
    for r in pos:
        if not any(tuple(a - b for a, b in zip(r, r1)) in posset for r1 in pos if r1 != r):
            simple.append(r)
    # adjacency graph on the simple roots
    nodes = list(range(len(simple)))
    adj = {i: [] for i in nodes}
    for i in nodes:
        for j in nodes:
            if i < j and work.bilinear(simple[i], simple[j]) != 0:
                adj[i].append(j)
                adj[j].append(i)
    seen = set()
    comps = []
    for i in nodes:
        if i in seen:
            continue
        stack, comp = [i], []
        seen.add(i)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(comp)
    out = []
    for comp in comps:
        sub_adj = {v: [w for w in adj[v] if w in comp] for v in comp}
        label, order = _classify_diagram(comp, sub_adj)
        basis = [list(simple[v]) for v in order]
        expected = ade(label[0], int(label[1:])).gram
        got = [[work.bilinear(a, b) for b in basis] for a in basis]
        if [list(r) for r in expected] != got:
            raise RuntimeError(f"component does not match {label} Gram; internal error")
        if lift is not None:
            basis = [im.mat_vec(lift, b) for b in basis]
        out.append(RootComponent(label, basis))
    out.sort(key=lambda c: (c.label[0], int(c.label[1:])))
    return RootDecomposition(out)
