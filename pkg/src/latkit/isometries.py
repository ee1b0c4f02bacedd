"""Isometry testing for definite lattices by vector-set backtracking.

The classical approach: pick a characteristic finite vector set on each side
(short vectors up to a norm that spans the lattice), then search assignments
of a basis onto candidate images, pruning with pairwise Gram products.
"""

from __future__ import annotations

from fractions import Fraction

from . import intmat as im
from .lattices import IntLattice, LatticeError


def _norm_profile(lat, vecs):
    out = {}
    for v in vecs:
        out.setdefault(lat.norm(v), 0)
        out[lat.norm(v)] += 1
    return out


def _spanning_short_vectors(lat: IntLattice):
    """Short vectors (with both signs) up to the smallest norm bound whose
    vectors span the lattice over Q; returns (vectors, bound)."""
    from .enumeration import short_vectors

    bound = 2
    while True:
        vs = short_vectors(lat, bound)
        if vs:
            mat = im.from_columns([list(v) for v in vs])
            if im.rank_int(mat) == lat.rank:
                full = []
                for v in vs:
                    full.append(tuple(v))
                    full.append(tuple(-x for x in v))
                return full, bound
        bound += 2
        if bound > 4 * max(abs(x) for row in lat.gram for x in row) + 4:
            raise LatticeError("failed to find a spanning short-vector set")


def _pair_profile(lat, vecs):
    """Per-vector invariant: sorted multiset of pairings against the whole
    short-vector set; isometries must match profiles."""
    gv = []
    g = [list(r) for r in lat.gram]
    for v in vecs:
        gv.append([sum(g[i][j] * v[j] for j in range(len(v))) for i in range(len(v))])
    out = []
    for i, v in enumerate(vecs):
        prods = sorted(sum(gv[i][k] * w[k] for k in range(len(w))) for w in vecs)
        out.append((lat.norm(v),) + tuple(prods))
    return out


def definite_isometries(l1: IntLattice, l2: IntLattice, find_all=False):
    """Isometries l1 -> l2, as integer matrices sending l1-coordinates to
    l2-coordinates. With find_all=False at most one is returned."""
    if l1.rank != l2.rank or l1.det != l2.det or l1.signature != l2.signature:
        return []
    if l1.rank == 0:
        return [[]]
    vs1, b1 = _spanning_short_vectors(l1)
    vs2, b2 = _spanning_short_vectors(l2)
    if b1 != b2 or len(vs1) != len(vs2):
        return []
    prof1 = _pair_profile(l1, vs1)
    prof2 = _pair_profile(l2, vs2)
    from collections import Counter
    if Counter(prof1) != Counter(prof2):
        return []
    n = l1.rank
    # connected greedy basis: prefer vectors pairing nontrivially with the
    # span so far, so Gram constraints bind early; rarest profile first
    rarity = Counter(prof1)
    order = sorted(range(len(vs1)), key=lambda i: (rarity[prof1[i]], prof1[i]))
    basis_idx = []
    for i in order:
        trial = [vs1[j] for j in basis_idx] + [vs1[i]]
        if im.rank_int(im.from_columns([list(x) for x in trial])) == len(trial):
            basis_idx.append(i)
            if len(basis_idx) == n:
                break
    assert len(basis_idx) == n
    basis = [vs1[i] for i in basis_idx]
    bmat = im.from_columns([list(v) for v in basis])
    bgram = [[l1.bilinear(a, b) for b in basis] for a in basis]
    binv = im.inv_frac(bmat)
    cands = []
    for i in basis_idx:
        cands.append([w for k, w in enumerate(vs2) if prof2[k] == prof1[i]])
    out = []
    assign = [None] * n
    g2 = [list(r) for r in l2.gram]
    g1 = [list(r) for r in l1.gram]

    def extend(i):
        for w in cands[i]:
            ok = True
            for j in range(i):
                if l2.bilinear(w, assign[j]) != bgram[i][j]:
                    ok = False
                    break
            if not ok:
                continue
            assign[i] = w
            if i + 1 == n:
                wmat = im.from_columns([list(x) for x in assign])
                g = im.mat_mul(wmat, binv)
                flat = []
                integral = True
                for row in g:
                    r = []
                    for x in row:
                        xf = Fraction(x)
                        if xf.denominator != 1:
                            integral = False
                            break
                        r.append(int(xf))
                    if not integral:
                        break
                    flat.append(r)
                if integral:
                    gt = im.transpose(flat)
                    if im.mat_mul(im.mat_mul(gt, g2), flat) == g1:
                        out.append(flat)
                        if not find_all:
                            return True
            else:
                if extend(i + 1):
                    return True
            assign[i] = None
        return False

    extend(0)
    return out


def definite_isometry_exists(l1: IntLattice, l2: IntLattice) -> bool:
    return bool(definite_isometries(l1, l2))


def definite_automorphisms(lat: IntLattice):
    """All automorphisms of a definite lattice (use only at small rank)."""
    return definite_isometries(lat, lat, find_all=True)
