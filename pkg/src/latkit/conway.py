"""The fixed model of II_{1,25} and primitive embeddings into it.

The ambient lattice is pinned as U + E8 + E8 + E8 (U first, blocks in order).
The first Weyl vector comes from the holy construction on the E8^3 block.
Alternative presentations U' + N' with N' another Niemeier lattice are
produced explicitly through the isotropic-vector / 2-neighbor correspondence,
which is what lets components like D9 or D16-tails be realized primitively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import e8euclid
from . import intmat as im
from .discforms import DiscForm
from .enumeration import quadratic_triple_solutions, short_vectors
from .isometries import definite_isometries
from .lattices import (IntLattice, LatticeError, ade, coords_of,
                       quotient_by_isotropic, root_part, sublattice, U)

RANK = 26
_E8 = ade("E", 8)


def _model_gram():
    g = [[0] * RANK for _ in range(RANK)]
    g[0][1] = g[1][0] = 1
    for b in range(3):
        off = 2 + 8 * b
        for i in range(8):
            for j in range(8):
                g[off + i][off + j] = _E8.gram[i][j]
    return g


class ConwayModel:
    """U + E8^3 with its pinned basis: e = e_0, f = e_1, then three blocks."""

    def __init__(self):
        self.gram = _model_gram()
        self.lattice = IntLattice(self.gram, name="II(1,25)")
        self.e = [1, 0] + [0] * 24
        self.f = [0, 1] + [0] * 24
        self._weyl = None
        self._holy = None
        self._splits = {}

    def block_vector(self, block, coords):
        v = [0] * RANK
        for i, c in enumerate(coords):
            v[2 + 8 * block + i] = c
        return v

    def bilinear(self, u, v):
        return im.bilinear(self.gram, list(u), list(v))

    def norm(self, v):
        return self.bilinear(v, v)

    # -- holy construction ----------------------------------------------------

    def holy_construction_class(self):
        """(h, v): Coxeter number of E8^3 and an adjusted Weyl-vector
        representative with v^2 divisible by 2 h^2."""
        if self._holy is not None:
            return self._holy
        g8 = [list(r) for r in _E8.gram]
        roots8 = short_vectors(_E8, 2, strict=True)
        h = (2 * len(roots8)) // 8
        # per-component half-sum of positive roots: pairs to -1 with each
        # simple root in the negative convention
        rho = im.solve_int(g8, [-1] * 8)
        assert rho is not None
        comps = [h, h, h]
        assert len(set(comps)) == 1, "unequal Coxeter numbers"
        v0 = rho + rho + rho
        v = [0] * 24
        # adjust by h * x until v^2 = 0 mod 2 h^2
        n_gram = [[0] * 24 for _ in range(24)]
        for b in range(3):
            for i in range(8):
                for j in range(8):
                    n_gram[8 * b + i][8 * b + j] = g8[i][j]
        pool = [[0] * 24]
        for i in range(24):
            for s in (1, -1):
                x = [0] * 24
                x[i] = s
                pool.append(x)
        found = None
        for x in pool:
            cand = [v0[i] + h * x[i] for i in range(24)]
            if im.bilinear(n_gram, cand, cand) % (2 * h * h) == 0:
                found = cand
                break
        assert found is not None, "holy-construction adjustment failed"
        # sanity: the half-sum pairs to -1 with every simple root
        for b in range(3):
            for i in range(8):
                r = [0] * 24
                r[8 * b + i] = 1
                assert im.bilinear(n_gram, v0, r) == -1
        self._holy = (h, found)
        return self._holy

    def first_slice(self):
        """SliceData of the first Weyl vector (cached)."""
        if "slice0" not in self._splits:
            self._splits["slice0"] = make_slice(self, self.first_weyl_vector())
        return self._splits["slice0"]

    def first_weyl_vector(self):
        """w = h e - v^2/(2h) f + v; isotropic with Leech quotient."""
        if self._weyl is not None:
            return self._weyl
        h, v = self.holy_construction_class()
        n_gram_norm = self.norm([0, 0] + v)
        w = [h, -n_gram_norm // (2 * h)] + v
        assert self.norm(w) == 0
        assert im.gcd_list(w) == 1
        self._weyl = w
        return w

    def weyl_quotient_gram(self, w):
        q, _ = quotient_by_isotropic(self.lattice, w)
        return q

    def weyl_vector_is_valid(self, w):
        """w^2 = 0 and the rank-24 quotient has no (-2)-vectors (exhaustive)."""
        if self.norm(w) != 0:
            return False
        q, _ = quotient_by_isotropic(self.lattice, w)
        t = im.lll_gram([[-x for x in row] for row in q.gram])
        g2 = im.mat_mul(im.mat_mul(im.transpose(t), [[-x for x in row] for row in q.gram]), t)
        red = IntLattice([[-x for x in row] for row in g2])
        return short_vectors(red, 2, strict=False) == []


_MODEL = None


def model() -> ConwayModel:
    global _MODEL
    if _MODEL is None:
        _MODEL = ConwayModel()
    return _MODEL


# ---------------------------------------------------------------------------
# Walking between Conway chambers

class SliceData:
    """Transportable data for the root slice {r : r.w = 1}.

    p pairs to 1 with w; the columns of kmat span w^perp modulo w. The Gram
    matrix of those columns is invariant under the reflections used for
    chamber walking, so its inverse and LDL are computed once and shared by
    every transported slice.
    """

    __slots__ = ("w", "p", "kmat", "shared")

    def __init__(self, w, p, kmat, shared):
        self.w = list(w)
        self.p = list(p)
        self.kmat = [list(r) for r in kmat]
        self.shared = shared      # (agram, ainv, ldl of -agram)

    def reflect(self, m, r):
        """Slice for s_r(w), with r a (-2)-root."""
        rw = m.bilinear(r, self.w)
        w2 = [self.w[i] + rw * r[i] for i in range(RANK)]
        pr = m.bilinear(r, self.p)
        p2 = [self.p[i] + pr * r[i] for i in range(RANK)]
        cols = im.columns(self.kmat)
        cols2 = []
        for c in cols:
            cr = m.bilinear(r, c)
            cols2.append([c[i] + cr * r[i] for i in range(RANK)])
        return SliceData(w2, p2, im.from_columns(cols2), self.shared)


def weyl_slice(m: ConwayModel, w):
    """(p, kbar columns): p.w = 1 and kbar spans w^perp modulo w, reduced."""
    sl = make_slice(m, w)
    return sl.p, im.columns(sl.kmat)


def make_slice(m: ConwayModel, w) -> SliceData:
    g = m.gram
    pv = [sum(g[i][j] * w[i] for i in range(RANK)) for j in range(RANK)]
    assert im.gcd_list(pv) == 1, "Weyl vector must pair onto Z"
    p = im.solve_int([pv], [1])
    ker = im.kernel_int([pv])  # 25 columns including w
    kcols = im.columns(ker)
    c = im.solve_int(im.from_columns(kcols), w)
    assert c is not None and im.gcd_list(c) == 1
    comp = im.complete_to_unimodular(c)
    lift = [im.mat_vec(im.from_columns(kcols), [comp[i][j] for i in range(len(comp))])
            for j in range(1, len(comp[0]))]
    kgram = [[m.bilinear(a, b) for b in lift] for a in lift]
    t = im.lll_gram([[-x for x in row] for row in kgram])
    lift2 = im.mat_mul(im.from_columns(lift), t)
    cols = im.columns(lift2)
    agram = [[m.bilinear(a, b) for b in cols] for a in cols]
    neg = [[-x for x in row] for row in agram]
    from .enumeration import _ldl, TripleSolver
    ld, lu = _ldl(neg)
    shared = (agram, TripleSolver(ld, lu))
    return SliceData(w, p, lift2, shared)


def all_separating_roots(m: ConwayModel, sl: "SliceData", x, tie=None):
    """All roots r with r.w > 0 and r.x < 0 (or r.x = 0, r.tie < 0), over
    every height r.w = m1 up to the exact bound m1 < (w.x) sqrt(2/x^2).

    Returned as (r, height, strict) with strict False for tie-selected roots.
    """
    g = m.gram
    w = sl.w
    xf = [Fraction(c) for c in x]
    w0 = m.bilinear(w, xf)
    x2 = m.bilinear(xf, xf)
    assert w0 > 0 and x2 > 0
    p, kmat = sl.p, sl.kmat
    a, base_solver = sl.shared
    gx = [sum(Fraction(g[i][j]) * xf[j] for j in range(RANK)) for i in range(RANK)]
    gp = [sum(g[i][j] * p[j] for j in range(RANK)) for i in range(RANK)]
    kt_gx = [sum(Fraction(kmat[r][i]) * gx[r] for r in range(RANK)) for i in range(24)]
    kt_gp = [sum(kmat[r][i] * gp[r] for r in range(RANK)) for i in range(24)]
    p2 = m.bilinear(p, p)
    px = sum(Fraction(p[i]) * gx[i] for i in range(RANK))
    m1_max = im.floor_sqrt_frac(2 * w0 * w0 / x2)
    solver = base_solver.scaled(w0)   # Q' = w0 * (-a), shared across heights
    out = []
    for m1 in range(1, m1_max + 1):
        b = [m1 * (kt_gx[i] - w0 * kt_gp[i]) for i in range(24)]
        c = m1 * m1 * (2 * px - w0 * p2) - 2 * w0
        for z in solver.solve(b, c):
            u = [m1 * p[i] + sum(kmat[i][j] * z[j] for j in range(24))
                 for i in range(RANK)]
            u2 = m.norm(u)
            if (u2 + 2) % (2 * m1):
                continue
            t = -(u2 + 2) // (2 * m1)
            r = [u[i] + t * w[i] for i in range(RANK)]
            if m.norm(r) != -2 or m.bilinear(r, w) != m1:
                continue
            rx = m.bilinear(r, xf)
            if rx < 0:
                out.append((r, m1, True))
            elif rx == 0 and tie is not None and m.bilinear(r, tie) < 0:
                out.append((r, m1, False))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def separating_roots(m: ConwayModel, w, x, tie=None, sl: "SliceData" = None):
    """Roots r with r.w = 1 and r.x < 0, or r.x = 0 and r.tie < 0 when a tie
    vector is given. Needs w.x > 0 and x of positive norm."""
    g = m.gram
    xf = [Fraction(c) for c in x]
    w0 = m.bilinear(w, xf)
    assert w0 > 0, "target must pair positively with the Weyl vector"
    if sl is None:
        sl = make_slice(m, w)
    assert sl.w == list(w)
    p, kmat = sl.p, sl.kmat
    a, base_solver = sl.shared
    gx = [sum(Fraction(g[i][j]) * xf[j] for j in range(RANK)) for i in range(RANK)]
    gp = [sum(g[i][j] * p[j] for j in range(RANK)) for i in range(RANK)]
    kt_gx = [sum(Fraction(kmat[r][i]) * gx[r] for r in range(RANK)) for i in range(24)]
    kt_gp = [sum(kmat[r][i] * gp[r] for r in range(RANK)) for i in range(24)]
    p2 = m.bilinear(p, p)
    px = sum(Fraction(p[i]) * gx[i] for i in range(RANK))
    # quadratic triple in z: Q = -(w0/2) a ; 2 b^T z ; c
    half_w0 = Fraction(w0, 2)
    solver = base_solver.scaled(half_w0)
    b = [(kt_gx[i] - w0 * kt_gp[i]) / 2 for i in range(24)]
    c = px - half_w0 * p2 - w0
    sols = solver.solve(b, c)
    out = []
    for z in sols:
        u = [p[i] + sum(kmat[i][j] * z[j] for j in range(24)) for i in range(RANK)]
        t = -(m.norm(u) + 2) // 2
        assert (m.norm(u) + 2) % 2 == 0
        r = [u[i] + t * w[i] for i in range(RANK)]
        assert m.norm(r) == -2 and m.bilinear(r, w) == 1
        rx = m.bilinear(r, xf)
        if rx < 0:
            out.append(r)
        elif rx == 0 and tie is not None and m.bilinear(r, tie) < 0:
            out.append(r)
    out.sort()
    return out


def walk_to_chamber(m: ConwayModel, w, x, tie=None, cap=10 ** 6,
                    sl: "SliceData" = None):
    """Weyl vector (and slice) of the Conway chamber containing x (nudged
    toward tie when x sits on mirrors).

    All separating mirrors are enumerated once; crossing a wall removes
    exactly that mirror from the separating set and never adds one, and some
    batch member is always a wall of the current chamber, so the batch drains
    by pure arithmetic. A final cheap wall check certifies arrival.
    """
    if sl is None:
        sl = make_slice(m, w)
    sep = all_separating_roots(m, sl, x, tie=tie)
    batch = [(r, st) for r, m1, st in sep]
    steps = 0
    while batch:
        pick = None
        for idx, (r, st) in enumerate(batch):
            if m.bilinear(r, sl.w) == 1:
                pick = idx
                break
        assert pick is not None, "separating batch stalled; internal error"
        r, _ = batch.pop(pick)
        sl = sl.reflect(m, r)
        steps += 1
        if steps > cap:
            raise LatticeError("chamber walk exceeded its iteration cap")
    viol = separating_roots(m, sl.w, x, tie=tie, sl=sl)
    assert not viol, "walk left separating walls; internal error"
    return sl.w, sl



# ---------------------------------------------------------------------------
# Alternative presentations U' + N' (Niemeier splits)

@dataclass
class NiemeierSplit:
    e_vec: list                  # isotropic, pairs to 1 with f_vec
    f_vec: list                  # isotropic
    n_cols: list                 # 24 columns spanning the complement
    root_dec: object             # RootDecomposition of the complement
    label: str = ""

    def lift(self, local):
        """Model coordinates of a local (24-dim) coordinate vector."""
        return [sum(self.n_cols[j][i] * local[j] for j in range(24)) for i in range(RANK)]


def _split_from_isotropic(m: ConwayModel, z, label=""):
    z = list(z)
    assert m.norm(z) == 0 and im.gcd_list(z) == 1
    g = m.gram
    pv = [sum(g[i][j] * z[i] for i in range(RANK)) for j in range(RANK)]
    assert im.gcd_list(pv) == 1
    u = im.solve_int([pv], [1])
    u2 = m.norm(u)
    u = [u[i] - (u2 // 2) * z[i] for i in range(RANK)]
    assert m.norm(u) == 0 and m.bilinear(z, u) == 1
    comp = im.kernel_int([pv, [sum(g[i][j] * u[i] for i in range(RANK)) for j in range(RANK)]])
    ncols = im.columns(comp)
    assert len(ncols) == 24
    ngram = [[m.bilinear(a, b) for b in ncols] for a in ncols]
    nlat = IntLattice(ngram)
    assert nlat.disc == 1 and nlat.is_negative_definite
    dec = root_part(nlat)
    return NiemeierSplit(z, u, [list(c) for c in ncols], dec, label)


def standard_split(m: ConwayModel) -> NiemeierSplit:
    if "std" not in m._splits:
        m._splits["std"] = _split_from_isotropic(m, m.e, label="E8^3")
    return m._splits["std"]


def neighbor_split(m: ConwayModel, x_local, label=""):
    """Split along z = (-x^2/4) e + 2 f + x for x in the E8^3 block with
    x^2 = 0 mod 8 and x not in 2N; realizes the 2-neighbor of E8^3 at x."""
    x = [0, 0] + list(x_local)
    x2 = m.norm(x)
    assert x2 % 8 == 0
    assert any(c % 2 for c in x_local), "x must be primitive mod 2"
    z = [(-x2 // 4) * m.e[i] + 2 * m.f[i] + x[i] for i in range(RANK)]
    return _split_from_isotropic(m, z, label=label)


def available_splits(m: ConwayModel):
    """Standard split plus a catalog of neighbor splits with other root
    systems; computed lazily and cached on the model."""
    if "catalog" in m._splits:
        return m._splits["catalog"]
    out = [standard_split(m)]
    # x spanning blocks 1+2: flips E8+E8 to the D16-type lattice
    pat = e8euclid.euclid_to_coords([1, 1, 1, 1, 0, 0, 0, 0])
    x = pat + pat + [0] * 8
    try:
        sp = neighbor_split(m, x, label="D16")
        out.append(sp)
    except AssertionError:
        pass
    # x spanning all three blocks: a deeper neighbor, useful for spread types
    x3 = pat + pat + pat
    if im.bilinear(_MODEL_NGRAM, x3, x3) % 8 == 0:
        try:
            out.append(neighbor_split(m, x3, label="mix3"))
        except AssertionError:
            pass
    m._splits["catalog"] = out
    return out


_MODEL_NGRAM = None


def _init_ngram():
    global _MODEL_NGRAM
    g8 = [list(r) for r in _E8.gram]
    n_gram = [[0] * 24 for _ in range(24)]
    for b in range(3):
        for i in range(8):
            for j in range(8):
                n_gram[8 * b + i][8 * b + j] = g8[i][j]
    _MODEL_NGRAM = n_gram


_init_ngram()


# ---------------------------------------------------------------------------
# Component placement inside a split

def _subdiagram_nodes(target_label, target_n, comp_label, comp_n):
    """Node index lists realizing comp inside the ade() diagram of target,
    ordered to match ade(comp)'s Gram; several candidates returned."""
    out = []
    if comp_label == target_label and comp_n == target_n:
        out.append(list(range(target_n)))
        return out
    if comp_label == "A":
        k = comp_n
        if target_label == "A" and k <= target_n:
            out.append(list(range(k)))
        if target_label == "D" and k <= target_n - 2:
            out.append(list(range(k)))
        if target_label == "E" and k <= target_n - 1:
            out.append(list(range(k)))
    if comp_label == "D":
        k = comp_n
        if target_label == "D" and 4 <= k < target_n:
            start = target_n - k
            out.append(list(range(start, target_n)))
        if target_label == "E" and k <= target_n - 1 and k >= 4:
            # fork at node 2 of the E-diagram: path from the long arm,
            # then the two tips 1 and (n-1)
            path = list(range(k - 1, 2, -1))
            out.append(path + [2, 1, target_n - 1])
    if comp_label == "E" and target_label == "E" and comp_n < target_n:
        # E6/E7 inside E8: chain prefix plus the branch node
        out.append(list(range(comp_n - 1)) + [target_n - 1])
    return out


def _orthogonal_a1_sets(target_label, target_n, k):
    """k pairwise non-adjacent nodes of the target diagram (A1^k packs)."""
    from itertools import combinations
    from .lattices import _ade_edges

    edges = set()
    for a, b in _ade_edges(target_label, target_n):
        edges.add((a, b))
        edges.add((b, a))
    outs = []
    for sub in combinations(range(target_n), k):
        if all((a, b) not in edges for a in sub for b in sub if a < b):
            outs.append(list(sub))
            if len(outs) >= 8:
                break
    return outs


def _nvgram(split: NiemeierSplit):
    # Gram on local coordinates of the split's 24-dim part
    if not hasattr(split, "_gcache"):
        cols = split.n_cols
        g = _model_gram()
        split._gcache = [[im.bilinear(g, a, b) for b in cols] for a in cols]
    return split._gcache


def _extended_roots(split: NiemeierSplit, ti):
    """Component root basis extended, on E8 components, by the euclidean
    orthogonal-root pack (gives primitive A1^k placements)."""
    comp = split.root_dec.components[ti]
    extra = []
    if comp.label == "E8" and split.label == "E8^3":
        # component basis vectors are local unit-ish vectors of one block
        offs = None
        vec = comp.basis[0]
        nz = [i for i, c in enumerate(vec) if c]
        block = nz[0] // 8
        for r in e8euclid.orthogonal_roots(3):
            v = [0] * 24
            for i, c in enumerate(r):
                v[8 * block + i] = c
            extra.append(v)
    return [list(b) for b in comp.basis] + extra


def realize_in_split(m: ConwayModel, split: NiemeierSplit, w_lat: IntLattice,
                     blocks=None, max_placements=200):
    """Columns (model coords) of a primitive copy of w_lat orthogonal to the
    split's hyperbolic plane, or None.

    Root-part components are placed as subdiagrams of the split's components;
    each complete placement is saturated and the saturation matched back onto
    w_lat by a definite isometry, which also fixes glue vectors.
    """
    dec = root_part(w_lat)
    if dec.rank != w_lat.rank:
        return None  # needs a root-full lattice; vector routes handle rank <= 2
    comps = sorted(dec.components, key=lambda c: -c.rank)
    targets = list(enumerate(split.root_dec.components))
    if blocks is not None:
        targets = [(i, c) for i, c in targets if i in blocks]
    ngram = _nvgram(split)
    ext = {ti: _extended_roots(split, ti) for ti, _ in targets}

    solutions = []

    def place(ci, used, chosen):
        if len(solutions) >= max_placements:
            return
        if ci == len(comps):
            solutions.append([vec for _, vecs, _ in chosen for vec in vecs])
            return
        comp = comps[ci]
        clabel, cn = comp.label[0], int(comp.label[1:])
        # identical components are placed in increasing position order to
        # avoid revisiting permutations of one placement
        floor_key = None
        if ci > 0 and comps[ci - 1].label == comp.label:
            floor_key = chosen[-1][2]
        for ti, tcomp in targets:
            tlabel, tn = tcomp.label[0], int(tcomp.label[1:])
            roots = ext[ti]
            if clabel == "A" and cn == 1:
                cands = [[i] for i in range(len(roots))]
            else:
                cands = _subdiagram_nodes(tlabel, tn, clabel, cn)
            for nodes in cands:
                key = (ti, min(nodes))
                if floor_key is not None and key <= floor_key:
                    continue
                if any((ti, n) in used for n in nodes):
                    continue
                basis = [roots[n] for n in nodes]
                gr = [[im.bilinear(ngram, a, b) for b in basis] for a in basis]
                if gr != [list(r) for r in ade(clabel, cn).gram]:
                    continue
                ok = True
                for key, vec in used.items():
                    if key[0] == ti and any(im.bilinear(ngram, b, vec) != 0
                                            for b in basis):
                        ok = False
                        break
                if not ok:
                    continue
                for n, vec in zip(nodes, basis):
                    used[(ti, n)] = vec
                chosen.append((ci, basis, key))
                place(ci + 1, used, chosen)
                chosen.pop()
                for n in nodes:
                    del used[(ti, n)]

    place(0, {}, [])
    # basis of the root part inside w_lat, in placement component order
    dec_cols = []
    for comp in comps:
        dec_cols.extend(list(v) for v in comp.basis)
    bmat = im.from_columns(dec_cols)
    b_unimodular = abs(im.det_bareiss(bmat)) == 1 if len(dec_cols) == w_lat.rank else False
    binv = None
    if b_unimodular:
        binv = [[int(x) for x in row] for row in im.inv_frac(bmat)]
        decgram = [[w_lat.bilinear(a, b) for b in dec_cols] for a in dec_cols]
    for cols_local in solutions:
        cols = [split.lift(v) for v in cols_local]
        if b_unimodular and im.saturation_index(im.from_columns(cols)) == 1:
            gr = [[m.bilinear(a, b) for b in cols] for a in cols]
            if gr == decgram:
                # placed basis realizes the root basis; convert to w_lat's basis
                return im.mat_mul(im.from_columns(cols), binv)
        sat = im.saturate_cols(im.from_columns(cols))
        satcols = im.columns(sat)
        satgram = [[m.bilinear(a, b) for b in satcols] for a in satcols]
        satlat = IntLattice(satgram)
        maps = definite_isometries(w_lat, satlat)
        if not maps:
            continue
        t = maps[0]  # columns: w_lat basis vector j -> sat coordinates
        final = [[sum(satcols[k][r] * t[k][j] for k in range(len(satcols)))
                  for j in range(w_lat.rank)] for r in range(RANK)]
        fcols = im.columns(final)
        check = [[m.bilinear(a, b) for b in fcols] for a in fcols]
        assert check == [list(r) for r in w_lat.gram]
        return final
    return None


# ---------------------------------------------------------------------------
# Embedded lattices

class EmbeddedLattice:
    """A primitive sublattice S of the model with complement R and caches."""

    def __init__(self, m: ConwayModel, s_cols, name=None):
        self.model = m
        self.s_cols = [list(c) for c in s_cols]
        smat = im.from_columns(self.s_cols)
        assert im.saturation_index(smat) == 1, "sublattice is not primitive"
        self.S = sublattice(m.lattice, smat)
        if self.S.is_degenerate:
            raise LatticeError("embedded lattice is degenerate")
        self.name = name
        pair = [[im.bilinear(m.gram, c, col) for col in im.columns(im.identity(RANK))]
                for c in self.s_cols]
        ker = im.kernel_int(pair)
        self.r_cols = im.columns(ker) if ker and ker[0] else []
        self.R = sublattice(m.lattice, ker) if self.r_cols else IntLattice([])
        self._ps = None
        self._pr = None
        self._discS = None
        self._discR = None
        self._glue = None
        self._rshorts = None
        self._hset = None
        self._base = None

    @property
    def rank(self):
        return self.S.rank

    # projections give coordinates in the S- (resp. R-) basis
    def proj_s(self, x):
        if self._ps is None:
            smat = im.from_columns(self.s_cols)
            gs_inv = im.inv_frac([list(r) for r in self.S.gram])
            stg = im.mat_mul(im.transpose(smat), self.model.gram)
            self._ps = im.mat_mul(gs_inv, stg)
        return [sum(self._ps[i][j] * Fraction(x[j]) for j in range(RANK))
                for i in range(self.S.rank)]

    def proj_r(self, x):
        if self._pr is None:
            rmat = im.from_columns(self.r_cols)
            gr_inv = im.inv_frac([list(r) for r in self.R.gram])
            rtg = im.mat_mul(im.transpose(rmat), self.model.gram)
            self._pr = im.mat_mul(gr_inv, rtg)
        return [sum(self._pr[i][j] * Fraction(x[j]) for j in range(RANK))
                for i in range(self.R.rank)]

    def disc_s(self) -> DiscForm:
        if self._discS is None:
            self._discS = self.S.disc_form()
        return self._discS

    def disc_r(self) -> DiscForm:
        if self._discR is None:
            self._discR = self.R.disc_form()
        return self._discR

    def glue_map(self):
        """dict: A_R class tuple -> A_S class tuple (graph of the glue)."""
        if self._glue is not None:
            return self._glue
        ds, dr = self.disc_s(), self.disc_r()
        pairs = set()
        gens = []
        for k in range(RANK):
            eps = [0] * RANK
            eps[k] = 1
            cs = ds.coords_of(self.proj_s(eps))
            cr = dr.coords_of(self.proj_r(eps))
            gens.append((cs, cr))
        frontier = [(ds.zero(), dr.zero())]
        seen = {frontier[0]}
        while frontier:
            nxt = []
            for cs, cr in frontier:
                for gs, gr in gens:
                    t = (ds.add(cs, gs), dr.add(cr, gr))
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
            frontier = nxt
        assert len(seen) == ds.group_order, "glue group should be the graph of A_S"
        glue = {}
        for cs, cr in seen:
            assert cr not in glue
            glue[cr] = cs
            # q_S(x) + q_R(y) = 0 on the glue (unimodular overlattice)
            assert (ds.q_of(cs) + dr.q_of(cr)) % 2 == 0
        self._glue = glue
        return glue

    def r_dual_shorts(self):
        """All x in R^dual with -2 <= x^2 <= 0, as (coords over R-basis,
        norm, A_R class); includes both signs and the zero vector."""
        if self._rshorts is not None:
            return self._rshorts
        nr = self.R.rank
        if nr == 0:
            self._rshorts = [((), 0, ())]
            return self._rshorts
        gr = [list(r) for r in self.R.gram]
        gr_inv = im.inv_frac(gr)
        d = self.R.disc
        # dual vectors x = G^-1 y with y integer; |x^2| = |y^T G^-1 y|
        scaled = [[int(-gr_inv[i][j] * d) for j in range(nr)] for i in range(nr)]
        assert all(Fraction(-gr_inv[i][j] * d).denominator == 1
                   for i in range(nr) for j in range(nr))
        t = im.lll_gram(scaled)
        g2 = im.mat_mul(im.mat_mul(im.transpose(t), scaled), t)
        from .enumeration import _enumerate
        sols = _enumerate(g2, [0] * nr, Fraction(2 * d))
        dr = self.disc_r()
        out = [(tuple([Fraction(0)] * nr), Fraction(0), dr.zero())]
        for z in sols:
            if not any(z):
                continue
            y = im.mat_vec(t, z)
            x = [sum(gr_inv[i][j] * y[j] for j in range(nr)) for i in range(nr)]
            nrm = im.bilinear(gr, x, x)
            if nrm < -2 or nrm >= 0:
                continue
            cls = dr.coords_of(x)
            out.append((tuple(x), nrm, cls))
        self._rshorts = out
        return out

    def r_has_root(self):
        if self.R.rank == 0:
            return False
        return any(nrm == -2 and all(Fraction(c).denominator == 1 for c in x)
                   for x, nrm, _ in self.r_dual_shorts())


# ---------------------------------------------------------------------------
# Embedding constructors

def embed_direct_sum(m: ConwayModel, w_lat: IntLattice, name=None):
    """S = U + W with W realized inside a split's 24-dimensional part.

    Tries the small-rank norm-vector route, then subdiagram placement in each
    available split (the realized copy is always exact-Gram and primitive).
    """
    last_err = None
    for split in available_splits(m):
        mats = []
        if w_lat.rank == 0:
            mats.append([[] for _ in range(RANK)])
        if 1 <= w_lat.rank <= 2:
            got = _realize_small(m, split, w_lat)
            if got is not None:
                mats.append(got)
        got = realize_in_split(m, split, w_lat) if w_lat.rank else None
        if got is not None:
            mats.append(got)
        for mat in mats:
            s_cols = [split.e_vec, split.f_vec] + [list(c) for c in im.columns(mat)]
            try:
                emb = EmbeddedLattice(m, s_cols, name=name)
            except (AssertionError, LatticeError) as exc:
                last_err = exc
                continue
            if emb.R.rank and not emb.r_has_root():
                last_err = LatticeError("complement has no roots")
                continue
            return emb
    raise LatticeError(f"no primitive embedding found for U + {w_lat.name or 'W'}"
                       + (f" ({last_err})" if last_err else ""))


def _realize_small(m: ConwayModel, split: NiemeierSplit, w_lat: IntLattice):
    """Rank 1 and 2 realizations through explicit norm vectors (standard
    split only); returns model-coordinate columns or None."""
    if split.label != "E8^3":
        return None
    g = [list(r) for r in w_lat.gram]
    if w_lat.rank == 1:
        k2 = -g[0][0]
        v = e8euclid.vector_of_norm(k2)
        return im.from_columns([m.block_vector(1, v)])
    if w_lat.rank == 2:
        k1, a, k2 = -g[0][0], g[0][1], -g[1][1]
        v1 = e8euclid.vector_of_norm(k1)
        g8 = [list(r) for r in _E8.gram]
        pv = [sum(g8[i][j] * v1[i] for i in range(8)) for j in range(8)]
        x0 = im.solve_int([pv], [a])
        if x0 is None:
            return None
        ker = im.kernel_int([pv])
        kcols = im.columns(ker)
        kgram = [[im.bilinear(g8, u, v) for v in kcols] for u in kcols]
        from .enumeration import _enumerate
        t = im.lll_gram([[-x for x in row] for row in kgram])
        g2 = im.mat_mul(im.mat_mul(im.transpose(t), [[-x for x in row] for row in kgram]), t)
        kred = im.mat_mul(im.from_columns(kcols), t)
        # x = x0 + K z; search nearby z making the block-3 residual even >= 0
        tgt = im.solve_frac(kred, [-Fraction(c) for c in x0])
        base = [Fraction(c) for c in (tgt or [0] * 7)]
        seen = set()
        for radius in (4, 16, 64, 256):
            sols = _enumerate(g2, base, Fraction(radius))
            for z in sols:
                if tuple(z) in seen:
                    continue
                seen.add(tuple(z))
                x = [x0[i] + sum(kred[i][j] * z[j] for j in range(7)) for i in range(8)]
                need = -k2 - im.bilinear(g8, x, x)  # = y^2 for the block-3 part
                if need > 0 or need % 2:
                    continue
                if need == 0:
                    y = None
                else:
                    try:
                        y = e8euclid.vector_of_norm(-need)
                    except ValueError:
                        continue
                w2 = [0] * RANK
                for i, c in enumerate(x):
                    w2[2 + 8 + i] = c
                if y is not None:
                    for i, c in enumerate(y):
                        w2[2 + 16 + i] = c
                return im.from_columns([m.block_vector(1, v1), w2])
        return None
    return None


def embed_normal_form(m: ConwayModel, nf, name=None, attempts=8):
    """Embed a lattice given in cusp normal form (n, k, ell, W).

    e goes to the standard e; f to a e + n f + mu with mu in the definite
    block chosen so that all products come out exactly; the W part is realized
    inside blocks 1 and 2, leaving block 0 free to fix mu's norm.
    """
    n, k, ell = nf.n, nf.k, list(nf.ell)
    w_lat = nf.w_lattice
    r = len(ell)
    split = standard_split(m)
    if r == 0:
        if (2 * k) % (2 * n):
            raise LatticeError("rank-2 normal form needs n | k")
        a = k // n
        y = [a, n] + [0] * 24
        return EmbeddedLattice(m, [m.e, y], name=name)
    nu_mat = None
    if w_lat.rank <= 2:
        nu_mat = _realize_small(m, split, w_lat)
    if nu_mat is None:
        nu_mat = realize_in_split(m, split, w_lat, blocks={1, 2})
    if nu_mat is None:
        raise LatticeError("unsupported embedding: could not realize the W part")
    nus = [c for c in im.columns(nu_mat)]
    for c in nus:
        assert c[0] == 0 and c[1] == 0 and all(x == 0 for x in c[2:10]), \
            "W realization must avoid the U part and block 0"
    # mu23 with mu23 . nu_i = ell_i (mod n), recorded as exact b_i
    pair_rows = []
    for c in nus:
        gv = [sum(m.gram[i][j] * c[i] for i in range(RANK)) for j in range(RANK)]
        pair_rows.append(gv[10:26])
    stacked = [pair_rows[i] + [n if j == i else 0 for j in range(r)] for i in range(r)]
    sol = im.solve_int(stacked, ell)
    if sol is None:
        raise LatticeError("unsupported embedding: glue congruences unsolvable")
    mu23_loc = sol[:16]
    mu23 = [0] * RANK
    for i, c in enumerate(mu23_loc):
        mu23[10 + i] = c
    bvec = sol[16:]
    mu23_sq = m.norm(mu23)
    for attempt in range(attempts):
        t = (2 * k - mu23_sq) % (2 * n)
        m0 = (-t) % (2 * n) + attempt * 2 * n
        if m0 == 0 and attempt:
            m0 = attempt * 2 * n
        if m0 == 0:
            mu = list(mu23)
        else:
            v1 = e8euclid.vector_of_norm(m0)
            mu = list(mu23)
            for i, c in enumerate(v1):
                mu[2 + i] = c
        musq = m.norm(mu)
        assert (2 * k - musq) % (2 * n) == 0
        a = (2 * k - musq) // (2 * n)
        y = [a, n] + mu[2:]
        s_cols = [m.e, y]
        for i, c in enumerate(nus):
            col = [bvec[i] if j == 0 else c[j] for j in range(RANK)]
            col[0] = bvec[i]
            s_cols.append(col)
        try:
            emb = EmbeddedLattice(m, s_cols, name=name)
        except (AssertionError, LatticeError):
            continue
        if emb.S.gram != tuple(tuple(row) for row in nf.gram()):
            continue
        if emb.R.rank and not emb.r_has_root():
            continue
        return emb
    raise LatticeError("unsupported embedding, supply another")


def embed_lattice(m: ConwayModel, s_lat: IntLattice, name=None):
    """Primitive embedding of an even hyperbolic lattice into the model.

    Returns (embedding, to_emb) with to_emb the unimodular matrix taking
    input coordinates to the embedded basis. Needs an isotropic vector,
    found by a bounded search.
    """
    from .hyperbolic import cusp_normal_form

    if not s_lat.is_hyperbolic:
        raise LatticeError("only hyperbolic lattices embed with this routine")
    e = _find_isotropic(s_lat)
    if e is None:
        raise LatticeError("no isotropic vector found within the search box; "
                           "supply an embedding explicitly")
    nf = cusp_normal_form(s_lat, e)
    basis = [list(b) for b in nf.basis]
    if nf.n == 1:
        if nf.k != 0:
            # f <- f - k e makes f isotropic without leaving the lattice
            basis[1] = [basis[1][i] - nf.k * basis[0][i] for i in range(s_lat.rank)]
        emb = embed_direct_sum(m, nf.w_lattice, name=name)
    else:
        emb = embed_normal_form(m, nf, name=name)
    bmat = im.from_columns(basis)
    binv = im.inv_frac(bmat)
    to_emb = [[int(x) for x in row] for row in binv]
    # basis change consistency: the embedded Gram equals the normal-form Gram
    want = [[s_lat.bilinear(u, v) for v in basis] for u in basis]
    assert emb.S.gram == tuple(tuple(r) for r in want)
    return emb, to_emb


def _find_isotropic(s_lat: IntLattice, box=3):
    """A primitive isotropic vector with small coordinates, or None."""
    from itertools import product

    n = s_lat.rank
    for i in range(n):
        v = [0] * n
        v[i] = 1
        if s_lat.norm(v) == 0:
            return v
    best = None
    for radius in range(1, box + 1):
        for vals in product(range(-radius, radius + 1), repeat=n):
            if not any(vals):
                continue
            if max(abs(x) for x in vals) != radius:
                continue
            if s_lat.norm(list(vals)) == 0:
                v = list(vals)
                g = im.gcd_list(v)
                v = [x // g for x in v]
                lead = next(x for x in v if x)
                if lead < 0:
                    v = [-x for x in v]
                if best is None or v < best:
                    best = v
        if best is not None:
            return best
    return None


def embed_by_gluing(m: ConwayModel, s_lat: IntLattice, r_lat: IntLattice,
                    glue_witness, name=None):
    """Validate glue data for a primitive extension of S + R and embed S.

    The witness maps generators of A_S to elements of A_R and must be an
    anti-isometry; the glued overlattice is checked unimodular. The explicit
    model coordinates are then produced by the general embedding machinery,
    which reports the complement it actually found.
    """
    ds = s_lat.disc_form()
    dr = r_lat.disc_form()
    sp, sm, sz = s_lat.signature
    rp, rm, rz = r_lat.signature
    if (sp + rp, sm + rm) != (1, 25) or sz or rz:
        raise LatticeError("signatures do not sum to (1,25)")
    if len(glue_witness) != len(ds.orders):
        raise LatticeError("glue witness has the wrong number of generators")
    for i, img in enumerate(glue_witness):
        if dr.order_of(img) != ds.orders[i]:
            raise LatticeError("glue witness does not preserve orders")
        if (dr.q_of(img) + ds.q_diag[i]) % 2 != 0:
            raise LatticeError("glue is not an anti-isometry (q mismatch)")
        for j in range(i):
            if (dr.b_of(img, glue_witness[j]) + ds.b[i][j]) % 1 != 0:
                raise LatticeError("glue is not an anti-isometry (b mismatch)")
    if len(dr.subgroup_closure(glue_witness)) != ds.group_order:
        raise LatticeError("glue witness does not generate A_R")
    if s_lat.disc != r_lat.disc:
        raise LatticeError("glued lattice would not be unimodular")
    from .enumeration import short_vectors
    if not short_vectors(r_lat, 2, strict=True):
        raise LatticeError("R contains no root")
    emb, _ = embed_lattice(m, s_lat, name=name)
    return emb
