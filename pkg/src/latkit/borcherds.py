"""The chamber-graph engine: induced chambers, fingerprints, congruence
testing, orbit search, and the entropy verdict.

The search works with the subgroup G' of ambient-extendable isometries whose
discriminant action is either trivial or realized by an explicitly harvested
isometry of the complement. G' has finite index in the full symmetry group,
which leaves every verdict (finite / unique cusp / positive entropy) intact
while keeping membership testing exact and cheap.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import intmat as im
from .conway import (EmbeddedLattice, ConwayModel, model, standard_split,
                     walk_to_chamber, weyl_slice, embed_lattice, RANK)
from .discforms import DiscForm, disc_forms_isomorphic, same_genus
from .enumeration import quadratic_triple_solutions, short_vectors
from .hyperbolic import (Isometry, classify_isometry, cusp_stabilizer_rank,
                         eichler_siegel, positive_norm_vector,
                         ELLIPTIC, PARABOLIC, HYPERBOLIC)
from .lattices import IntLattice, LatticeError, root_part
from .simplex import lp_feasible, nonneg_combination

VERDICT_FINITE = "finite"
VERDICT_BORCHERDS = "borcherds"
VERDICT_POSITIVE_ENTROPY = "positive_entropy"
VERDICT_NO_SIMPLE_ROOTS = "no_simple_roots"
VERDICT_UNDECIDED = "undecided"


class DegenerateWeylError(LatticeError):
    pass


class BudgetExceeded(LatticeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


@dataclass
class Wall:
    vec: tuple              # primitive generator in S^dual, S-basis coords
    norm: Fraction
    outer: bool
    root: tuple | None      # the (-2)-root on the ray when outer

    def key(self):
        return self.vec


@dataclass
class InducedChamber:
    weyl: tuple                    # inducing Weyl vector, model coords
    walls: list                    # list of Wall
    interior: tuple                # rational point strictly inside, S coords
    removed: list = field(default_factory=list)   # (vec, certificate) pairs
    sampled: bool = False          # True when walls are a sample (S = L case)
    slice: object = None           # ambient SliceData for onward walks
    _fp: tuple | None = None

    def walls_key(self):
        return frozenset(w.vec for w in self.walls)

    def fingerprint(self, gram):
        if self._fp is None:
            vs = [list(w.vec) for w in self.walls]
            s = [sum(v[i] for v in vs) for i in range(len(gram))]
            a = im.bilinear(gram, s, s)
            b = tuple(sorted(im.bilinear(gram, v, v) for v in vs))
            c = tuple(sorted(im.bilinear(gram, v, s) for v in vs))
            self._fp = (a, b, c)
        return self._fp


def _sqrt_frac(fr: Fraction):
    from math import isqrt
    a, b = fr.numerator, fr.denominator
    if a < 0:
        return None
    ra, rb = isqrt(a), isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def _primitive_dual_scale(gram, v):
    """t > 0 such that t*v is the primitive point of its ray in the dual."""
    pav = [sum(Fraction(gram[i][j]) * v[j] for j in range(len(v)))
           for i in range(len(v))]
    gnum = 0
    dlcm = 1
    for x in pav:
        gnum = gcd(gnum, x.numerator)
        dlcm = lcm(dlcm, x.denominator)
    assert gnum != 0
    return Fraction(dlcm, gnum)


def _mk_wall(gs, vp, nrm):
    root = None
    if nrm < 0:
        rs = _sqrt_frac(Fraction(-2) / nrm)
        if rs is not None:
            cand_root = [rs * x for x in vp]
            if all(x.denominator == 1 for x in cand_root):
                root = tuple(int(x) for x in cand_root)
    return Wall(vec=tuple(vp), norm=nrm, outer=root is not None, root=root)


def induced_chamber(e: EmbeddedLattice, w, interior_hint=None, certify=False,
                    sl=None):
    """Walls of C cap S for the Conway chamber with Weyl vector w.

    Ambient roots with r.w = 1 are enumerated class-by-class over R^dual;
    each class reduces to an exact equality-constrained close-vector problem
    on the definite slice {s.w_S = const}. Redundant inequalities are removed
    by exact LP; isotropic candidates on the cone side are vacuous on the
    positive cone and dropped.
    """
    rho = e.S.rank
    if e.R.rank == 0:
        raise LatticeError("use the dedicated full-lattice path for S = L")
    gs = [list(r) for r in e.S.gram]
    w_s = e.proj_s(w)
    w_r = e.proj_r(w)
    ws2 = im.bilinear(gs, w_s, w_s)
    if ws2 <= 0:
        raise DegenerateWeylError("Weyl vector projects without positive norm")
    prow_f = [sum(Fraction(gs[i][j]) * w_s[j] for j in range(rho)) for i in range(rho)]
    den = 1
    for x in prow_f:
        den = lcm(den, x.denominator)
    prow = [int(x * den) for x in prow_f]
    ker = im.kernel_int([prow])
    kcols = im.columns(ker)
    kgram = [[im.bilinear(gs, a, b) for b in kcols] for a in kcols]
    tred = im.lll_gram([[-x for x in row] for row in kgram]) if rho > 2 else im.identity(rho - 1)
    kred = im.mat_mul(im.from_columns(kcols), tred)
    kred_cols = im.columns(kred)
    kg = [[im.bilinear(gs, a, b) for b in kred_cols] for a in kred_cols]
    from .enumeration import _ldl, TripleSolver
    ld, lu = _ldl([[-x for x in row] for row in kg])
    solver = TripleSolver(ld, lu)
    glue = e.glue_map()
    ds = e.disc_s()
    gr = [list(r) for r in e.R.gram]
    # pairing data reused across all candidates of this chamber
    gr_wr = [sum(Fraction(gr[i][j]) * w_r[j] for j in range(e.R.rank))
             for i in range(e.R.rank)]
    g_unit = im.gcd_list(prow)
    s_unit = im.solve_int([prow], [g_unit])
    sigma_cache = {}
    cand = {}
    for x_r, nrm, cls in e.r_dual_shorts():
        if cls not in sigma_cache:
            sig = ds.lift(glue[cls]) if any(cls) else [Fraction(0)] * rho
            sigma_cache[cls] = (sig, im.bilinear(gs, sig, w_s))
        sigma, sig_ws = sigma_cache[cls]
        c1 = 1 - sum(Fraction(x_r[i]) * gr_wr[i] for i in range(e.R.rank))
        c2 = Fraction(-2) - nrm
        c1p = c1 - sig_ws
        rhs = c1p * den
        if rhs.denominator != 1 or int(rhs) % g_unit:
            continue
        mul = int(rhs) // g_unit
        s0 = [mul * t for t in s_unit]
        r0 = [sigma[i] + s0[i] for i in range(rho)]
        gsr0 = [sum(Fraction(gs[i][j]) * r0[j] for j in range(rho)) for i in range(rho)]
        b = [-sum(Fraction(kred[i][j]) * gsr0[i] for i in range(rho))
             for j in range(len(kred_cols))]
        c = c2 - im.bilinear(gs, r0, r0)
        for z in solver.solve(b, c):
            v = [r0[i] + sum(Fraction(kred[i][j]) * z[j] for j in range(len(z)))
                 for i in range(rho)]
            if im.bilinear(gs, v, v) != c2 or not any(v):
                continue
            tscale = _primitive_dual_scale(gs, v)
            vp = tuple(Fraction(x) * tscale for x in v)
            if vp not in cand:
                cand[vp] = im.bilinear(gs, list(vp), list(vp))
    interior = [Fraction(x) for x in interior_hint] if interior_hint else None
    walls_in = []
    for vp, nrm in cand.items():
        if nrm == 0:
            if interior and im.bilinear(gs, list(vp), interior) < 0:
                raise LatticeError("isotropic candidate separates the interior; "
                                   "inconsistent chamber data")
            continue
        walls_in.append((vp, nrm))
    rows = [[sum(Fraction(gs[i][j]) * v[j] for j in range(rho)) for i in range(rho)]
            for v, _ in walls_in]
    if rows:
        pt = lp_feasible(rows, [1] * len(rows))
        if pt is None:
            raise DegenerateWeylError("induced chamber has empty interior")
    else:
        pt = interior
        if pt is None:
            raise LatticeError("chamber with no wall candidates and no interior hint")
    walls = []
    removed = []
    for idx, (vp, nrm) in enumerate(walls_in):
        others = [rows[j] for j in range(len(walls_in)) if j != idx]
        crow = rows[idx]
        test = [[-x for x in crow]] + others
        feas = lp_feasible(test, [1] + [0] * len(others))
        if feas is not None:
            walls.append(_mk_wall(gs, vp, nrm))
        else:
            cert = None
            if certify:
                cert = nonneg_combination([tuple(r) for r in others], tuple(crow))
                assert cert is not None
            removed.append((tuple(vp), cert))
    if interior is None:
        interior = pt
    walls.sort(key=lambda wl: wl.vec)
    return InducedChamber(weyl=tuple(w), walls=walls, interior=tuple(interior),
                          removed=removed, slice=sl)


# ---------------------------------------------------------------------------
# Base chamber and adjacency

def _ambient(e: EmbeddedLattice, s_vec):
    """Model coordinates of an S-basis rational vector."""
    return [sum(Fraction(e.s_cols[j][i]) * Fraction(s_vec[j])
                for j in range(e.S.rank)) for i in range(RANK)]


def base_chamber(e: EmbeddedLattice, seed=0, tries=64):
    """Non-degenerate starting chamber: walk the first Weyl vector to a
    generic positive-norm point of the S positive cone.

    The S-projection of an interior point of the first Conway chamber keeps
    the walk short; jitter around it makes the target strictly interior."""
    m = e.model
    rng = random.Random(seed)
    w0 = m.first_weyl_vector()
    gs = [list(r) for r in e.S.gram]
    sl0 = m.first_slice()
    p2 = m.norm(sl0.p)
    upartner = [sl0.p[i] - (p2 // 2) * w0[i] for i in range(RANK)]
    u0 = [4 * w0[i] + 2 * upartner[i] for i in range(RANK)]
    proj = e.proj_s(u0)
    den = 1
    from math import lcm as _lcm
    for c in proj:
        den = _lcm(den, Fraction(c).denominator)
    base_pt = [int(Fraction(c) * den) for c in proj]
    g0 = im.gcd_list(base_pt)
    if g0:
        base_pt = [c // g0 for c in base_pt]
    x0 = positive_norm_vector(e.S)
    scale = 1
    for attempt in range(tries):
        if im.bilinear(gs, base_pt, base_pt) > 0:
            a = [scale * base_pt[i] + rng.randrange(-1, 2) for i in range(e.S.rank)]
            scale = min(scale * 2, 64)
        else:
            a = [x0[i] + rng.randrange(-2, 3) for i in range(e.S.rank)]
        if im.bilinear(gs, a, a) <= 0:
            continue
        a_amb = _ambient(e, a)
        if m.bilinear(w0, a_amb) < 0:
            a = [-c for c in a]
            a_amb = [-c for c in a_amb]
        if m.bilinear(w0, a_amb) <= 0:
            continue
        w, sl = walk_to_chamber(m, w0, a_amb, sl=m.first_slice())
        try:
            ch = induced_chamber(e, w, interior_hint=a, sl=sl)
        except DegenerateWeylError:
            continue
        except LatticeError:
            continue
        # a must be strictly inside (off every mirror) for determinism
        strict = all(im.bilinear(gs, list(wl.vec), a) > 0 for wl in ch.walls)
        if strict:
            return ch
    raise LatticeError("failed to find a strictly interior starting point")


def repair_degenerate_weyl(e: EmbeddedLattice, a=None, seed=0):
    """Spec surface for the degeneracy repair: returns a non-S-degenerate
    Weyl vector; unchanged when the first Weyl vector already works."""
    m = e.model
    w0 = m.first_weyl_vector()
    try:
        induced_chamber(e, w0)
        return list(w0)
    except DegenerateWeylError:
        pass
    if a is None:
        return list(base_chamber(e, seed=seed).weyl)
    a_amb = _ambient(e, a)
    w, sl = walk_to_chamber(m, w0, a_amb, sl=m.first_slice())
    induced_chamber(e, w, interior_hint=a, sl=sl)  # raises if still degenerate
    return w


def _facet_point(e: EmbeddedLattice, gamma: InducedChamber, wall: Wall,
                 seed=0, tries=48):
    """Positive-norm point in the relative interior of the facet cut by the
    wall; positive-norm points are dense and open there, so seeded LP
    objectives find one."""
    gs = [list(r) for r in e.S.gram]
    rho = e.S.rank
    vrow = [sum(Fraction(gs[i][j]) * wall.vec[j] for j in range(rho)) for i in range(rho)]
    rows = [vrow, [-x for x in vrow]]
    rhs = [0, 0]
    for other in gamma.walls:
        if other.vec == wall.vec:
            continue
        rows.append([sum(Fraction(gs[i][j]) * other.vec[j] for j in range(rho))
                     for i in range(rho)])
        rhs.append(1)
    rng = random.Random(seed)
    from .simplex import lp_min, OPTIMAL
    for attempt in range(tries):
        if attempt == 0:
            xf = lp_feasible(rows, rhs)
        else:
            c = [Fraction(rng.randrange(-9, 10)) for _ in range(rho)]
            status, _, xf = lp_min(c, rows + [list(c)], rhs + [-64])
            if status != OPTIMAL:
                xf = None
        if xf is None:
            continue
        if im.bilinear(gs, xf, xf) > 0:
            return xf
    raise LatticeError("no positive-norm facet point found")


def adjacent_chamber(e: EmbeddedLattice, gamma: InducedChamber, wall: Wall,
                     seed=0):
    """The unique chamber sharing the facet cut by an inner wall.

    Steps across the facet from a positive-norm relint point, walks the Weyl
    vector to the target, and certifies adjacency by checking that the
    mirrored wall bounds the new chamber; the step shrinks on failure.
    """
    if wall.outer:
        raise LatticeError("outer walls are never crossed inside the domain")
    if wall.norm >= 0:
        raise LatticeError("isotropic walls bound the cone and cannot be crossed")
    m = e.model
    gs = [list(r) for r in e.S.gram]
    rho = e.S.rank
    xf = _facet_point(e, gamma, wall, seed=seed)
    others = [o for o in gamma.walls if o.vec != wall.vec]
    neg_wall = tuple(-x for x in wall.vec)
    step = Fraction(1, 2)
    for _ in range(60):
        target = [xf[i] + step * Fraction(wall.vec[i]) for i in range(rho)]
        ok = (im.bilinear(gs, target, target) > 0
              and im.bilinear(gs, list(wall.vec), target) < 0
              and all(im.bilinear(gs, list(o.vec), target) > 0 for o in others))
        if ok:
            t_amb = _ambient(e, target)
            if m.bilinear(gamma.weyl, t_amb) > 0:
                sl0 = gamma.slice if gamma.slice is not None else None
                w2, sl2 = walk_to_chamber(m, list(gamma.weyl), t_amb, sl=sl0)
                ch = induced_chamber(e, w2, interior_hint=target, sl=sl2)
                if neg_wall in (w.vec for w in ch.walls):
                    return ch
        step /= 8
    raise LatticeError("failed to certify adjacency across the facet")


# ---------------------------------------------------------------------------
# Membership in G: discriminant actions realized by complement isometries

def _action_tuple(df: DiscForm, images):
    return tuple(tuple(x) for x in images)


def _compose_actions(df: DiscForm, a, b):
    """Action a after action b, both as tuples of generator images."""
    out = []
    for img in b:
        acc = df.zero()
        for i, c in enumerate(img):
            if c:
                add = a[i]
                for _ in range(c):
                    acc = df.add(acc, add)
        out.append(acc)
    return tuple(out)


def _apply_action(df: DiscForm, act, x):
    acc = df.zero()
    for i, c in enumerate(x):
        if c:
            step = act[i]
            term = tuple((c * t) % d for t, d in zip(step, df.orders))
            acc = df.add(acc, term)
    return acc


def _disc_action_of_matrix(df: DiscForm, mat):
    """Action on A from an isometry matrix in lattice coordinates."""
    out = []
    for g in df.gens:
        img = [sum(Fraction(mat[i][j]) * g[j] for j in range(len(g)))
               for i in range(len(g))]
        out.append(df.coords_of(img))
    return tuple(out)


def harvested_action_group(e: EmbeddedLattice, cap=200000):
    """Subgroup of O(A_R) generated by discriminant actions of explicitly
    constructed isometries of R: -1, component permutations and diagram
    automorphisms of the root part (extended by identity elsewhere)."""
    if e._hset is not None:
        return e._hset
    dr = e.disc_r()
    nr = e.R.rank
    gens = []
    if nr:
        gens.append(_disc_action_of_matrix(dr, [[-1 if i == j else 0
                                                 for j in range(nr)]
                                                for i in range(nr)]))
    dec = root_part(e.R) if nr else None
    cand_mats = _root_isometry_candidates(e.R, dec) if nr else []
    for mat in cand_mats:
        gens.append(_disc_action_of_matrix(dr, mat))
    ident = tuple(tuple(1 if i == j else 0 for j in range(len(dr.orders)))
                  for i in range(len(dr.orders)))
    seen = {ident}
    frontier = [ident]
    gens = [g for g in set(gens)]
    while frontier and len(seen) < cap:
        nxt = []
        for a in frontier:
            for g in gens:
                c = _compose_actions(dr, g, a)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) >= cap:
                        break
            if len(seen) >= cap:
                break
        frontier = nxt
    e._hset = seen
    return seen


def _root_isometry_candidates(r_lat: IntLattice, dec, cap=768):
    """Integer isometries of R combining root-part symmetries (component
    swaps, diagram automorphisms) with automorphisms of the rootless
    orthogonal complement; pairs failing integrality on R are dropped."""
    from itertools import product as _product
    from .isometries import definite_automorphisms
    from .lattices import ade

    nr = r_lat.rank
    if dec is None or not dec.components:
        return []
    cols_all = []
    for comp in dec.components:
        cols_all.extend([list(v) for v in comp.basis])
    gmat = [list(r) for r in r_lat.gram]
    pair = [[sum(gmat[i][j] * c[i] for i in range(nr)) for j in range(nr)]
            for c in cols_all]
    kerm = im.kernel_int(pair)
    kc = im.columns(kerm) if kerm and kerm[0] else []
    if len(cols_all) + len(kc) != nr:
        return []
    big = im.from_columns(cols_all + kc)
    try:
        binv = im.inv_frac(big)
    except ZeroDivisionError:
        return []
    comp_gram = [[im.bilinear(gmat, a, b) for b in kc] for a in kc]
    comp_autos = [im.identity(len(kc))] if kc else [[]]
    if kc and len(kc) <= 7:
        try:
            comp_lat = IntLattice(comp_gram)
            comp_autos = definite_automorphisms(comp_lat)
        except LatticeError:
            comp_autos = [im.identity(len(kc)),
                          [[-1 if i == j else 0 for j in range(len(kc))]
                           for i in range(len(kc))]]
    elif kc:
        comp_autos = [im.identity(len(kc)),
                      [[-1 if i == j else 0 for j in range(len(kc))]
                       for i in range(len(kc))]]

    comps = dec.components
    offs = []
    o = 0
    for c in comps:
        offs.append(o)
        o += c.rank

    # root-side symmetry group: swaps of isomorphic components and diagram
    # automorphisms, closed under composition (as block matrices on the
    # root basis), capped
    k = len(cols_all)

    def spec_matrix(spec):
        mat = [[0] * k for _ in range(k)]
        for t in range(k):
            mat[t][t] = 1
        if spec[0] == "swap":
            _, i, j = spec
            for t in range(comps[i].rank):
                a, b = offs[i] + t, offs[j] + t
                mat[a][a] = mat[b][b] = 0
                mat[b][a] = mat[a][b] = 1
        else:
            _, i, pi = spec
            n = len(pi)
            for t in range(n):
                for t2 in range(n):
                    mat[offs[i] + t][offs[i] + t2] = 0
            for t in range(n):
                mat[offs[i] + pi[t]][offs[i] + t] = 1
        return tuple(tuple(r) for r in mat)

    gens = []
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if comps[i].label == comps[j].label:
                gens.append(spec_matrix(("swap", i, j)))
    for i, comp in enumerate(comps):
        lab, n = comp.label[0], int(comp.label[1:])
        if lab == "A" and n >= 2:
            gens.append(spec_matrix(("perm", i, list(range(n - 1, -1, -1)))))
        if lab == "D":
            sw = list(range(n))
            sw[n - 2], sw[n - 1] = sw[n - 1], sw[n - 2]
            gens.append(spec_matrix(("perm", i, sw)))
            if n == 4:
                gens.append(spec_matrix(("perm", i, [2, 1, 0, 3])))
        if lab == "E" and n == 6:
            gens.append(spec_matrix(("perm", i, [4, 3, 2, 1, 0, 5])))
    ident_k = tuple(tuple(1 if a == b else 0 for b in range(k)) for a in range(k))
    group = {ident_k}
    frontier = [ident_k]
    while frontier and len(group) <= cap:
        nxt = []
        for a in frontier:
            for g in gens:
                c = tuple(tuple(sum(a[t][u] * g[u][v] for u in range(k))
                                for v in range(k)) for t in range(k))
                if c not in group:
                    group.add(c)
                    nxt.append(c)
        frontier = nxt

    found = []
    tried = 0
    for spec_mat, ca in _product(sorted(group), comp_autos):
        if spec_mat == ident_k and kc and all(
                ca[i][j] == (1 if i == j else 0)
                for i in range(len(kc)) for j in range(len(kc))):
            continue
        tried += 1
        if tried > 4 * cap:
            break
        imgs_root = [[sum(cols_all[u][i] * spec_mat[u][t] for u in range(k))
                      for i in range(nr)] for t in range(k)]
        imgs_comp = [[sum(kc[t][i] * ca[t][j] for t in range(len(kc)))
                      for j in range(len(kc))] for i in range(nr)]
        imgs = im.from_columns(imgs_root + im.columns(imgs_comp)) if kc else             im.from_columns(imgs_root)
        mat = im.mat_mul(imgs, binv)
        flat = []
        good = True
        for row in mat:
            rr = []
            for x in row:
                xf = Fraction(x)
                if xf.denominator != 1:
                    good = False
                    break
                rr.append(int(xf))
            if not good:
                break
            flat.append(rr)
        if not good:
            continue
        gt = im.transpose(flat)
        if im.mat_mul(im.mat_mul(gt, gmat), flat) == gmat:
            found.append(flat)
    return found


# ---------------------------------------------------------------------------
# Congruence testing

def _wall_profile(gamma: InducedChamber, gram):
    vs = [list(w.vec) for w in gamma.walls]
    s = [sum(v[i] for v in vs) for i in range(len(gram))]
    prof = []
    for w in gamma.walls:
        prof.append((w.norm, im.bilinear(gram, list(w.vec), s), w.outer))
    return prof, s


def extends_to_ambient(e: EmbeddedLattice, mat):
    """Nikulin test: the S-isometry extends to the model iff its action on
    A_S is matched through the glue by a harvested action on A_R."""
    ds = e.disc_s()
    if not ds.orders:
        return True
    act_s = _disc_action_of_matrix(ds, mat)
    ident = tuple(tuple(1 if i == j else 0 for j in range(len(ds.orders)))
                  for i in range(len(ds.orders)))
    if act_s == ident:
        return True
    dr = e.disc_r()
    glue = e.glue_map()
    inv_glue = {s: r for r, s in glue.items()}
    # conjugate the A_S action through the glue into the required A_R action
    imgs = []
    for i in range(len(dr.orders)):
        unit = tuple(1 if j == i else 0 for j in range(len(dr.orders)))
        s_class = glue[unit] if unit in glue else None
        if s_class is None:
            return False
        s_img = _apply_action(ds, act_s, s_class)
        r_img = inv_glue.get(s_img)
        if r_img is None:
            return False
        imgs.append(r_img)
    return tuple(imgs) in harvested_action_group(e)


def hom_g(e: EmbeddedLattice, g1: InducedChamber, g2: InducedChamber,
          find_all=False):
    """Isometries of S mapping the wall set of g1 onto that of g2 and
    extending to the ambient lattice; empty list when not congruent."""
    gs = [list(r) for r in e.S.gram]
    rho = e.S.rank
    if len(g1.walls) != len(g2.walls):
        return []
    if g1.fingerprint(gs) != g2.fingerprint(gs):
        return []
    prof1, s1 = _wall_profile(g1, gs)
    prof2, s2 = _wall_profile(g2, gs)
    from collections import Counter
    if Counter(prof1) != Counter(prof2):
        return []
    # pivot basis among g1's walls, rarest profiles first
    rarity = Counter(prof1)
    order = sorted(range(len(g1.walls)), key=lambda i: (rarity[prof1[i]], prof1[i]))
    piv = []
    for i in order:
        trial = [list(g1.walls[j].vec) for j in piv] + [list(g1.walls[i].vec)]
        den = 1
        for v in trial:
            for x in v:
                den = lcm(den, Fraction(x).denominator)
        tint = [[int(Fraction(x) * den) for x in v] for v in trial]
        if im.rank_int(im.from_columns(tint)) == len(trial):
            piv.append(i)
            if len(piv) == rho:
                break
    if len(piv) < rho:
        return []
    pmat = im.from_columns([list(g1.walls[i].vec) for i in piv])
    pinv = im.inv_frac(pmat)
    pcross = [[im.bilinear(gs, list(g1.walls[a].vec), list(g1.walls[b].vec))
               for b in piv] for a in piv]
    cands = [[j for j in range(len(g2.walls)) if prof2[j] == prof1[i]] for i in piv]
    set2 = g2.walls_key()
    set1 = [list(w.vec) for w in g1.walls]
    x0 = positive_norm_vector(e.S)
    out = []
    assign = [None] * rho

    def extend(i):
        for j in cands[i]:
            wv = list(g2.walls[j].vec)
            ok = True
            for t in range(i):
                if im.bilinear(gs, wv, list(g2.walls[assign[t]].vec)) != pcross[i][t]:
                    ok = False
                    break
            if not ok:
                continue
            assign[i] = j
            if i + 1 == rho:
                wmat = im.from_columns([list(g2.walls[assign[t]].vec)
                                        for t in range(rho)])
                gmap = im.mat_mul(wmat, pinv)
                mat = []
                good = True
                for row in gmap:
                    r = []
                    for x in row:
                        xf = Fraction(x)
                        if xf.denominator != 1:
                            good = False
                            break
                        r.append(int(xf))
                    if not good:
                        break
                    mat.append(r)
                if good:
                    gt = im.transpose(mat)
                    if im.mat_mul(im.mat_mul(gt, gs), mat) == gs:
                        mapped = set()
                        for v in set1:
                            img = tuple(sum(Fraction(mat[a][b]) * v[b]
                                            for b in range(rho)) for a in range(rho))
                            mapped.add(img)
                        if mapped == set2 and \
                                im.bilinear(gs, im.mat_vec(mat, x0), x0) > 0 and \
                                extends_to_ambient(e, mat):
                            out.append(mat)
                            if not find_all:
                                return True
            else:
                if extend(i + 1):
                    return True
            assign[i] = None
        return False

    extend(0)
    return out


# ---------------------------------------------------------------------------
# Orbit search and verdicts

@dataclass
class SymmetryReport:
    verdict: str
    generators: list                      # Isometry on S
    chamber_orbit_reps: list              # InducedChamber
    simple_root_orbit_reps: list          # (-2)-roots of S (outer walls)
    cusp: tuple | None = None
    stabilizer_rank: int | None = None
    witness: Isometry | None = None
    chambers_visited: int = 0
    stats: dict = field(default_factory=dict)


@dataclass
class ExploreConfig:
    max_chambers: int = 20000
    budget_seconds: float | None = None
    seed: int = 0
    threads: int = 1
    group_cap: int = 20000
    word_length: int = 6
    trace: object = None          # callable for progress lines


def _conway_case(e: EmbeddedLattice, config) -> SymmetryReport:
    """S = L: the chamber is the Conway chamber itself; report its structure
    via explicit cusp-stabilizer transvections."""
    m = e.model
    w = m.first_weyl_vector()
    p, kbar = weyl_slice(m, w)
    gens = []
    lat = m.lattice
    for y in kbar:
        gens.append(eichler_siegel(lat, w, y))
    for g in gens:
        assert g(w) == list(w)
    # joint fixed space and its radical must recover the cusp ray of w
    fixed = _joint_fixed_cusp(lat, [g.matrix for g in gens])
    assert fixed is not None and (list(fixed) == list(w) or list(fixed) == [-x for x in w])
    mrank = cusp_stabilizer_rank(lat, w)
    # sample walls pairing to 1 with w
    walls = []
    t0 = -(m.norm(p) + 2) // 2
    r0 = [p[i] + t0 * w[i] for i in range(RANK)]
    sample = [r0]
    for y in kbar[:12]:
        for s in (1, -1):
            u = [p[i] + s * y[i] for i in range(RANK)]
            t = -(m.norm(u) + 2) // 2
            sample.append([u[i] + t * w[i] for i in range(RANK)])
    for r in sample:
        assert m.norm(r) == -2 and m.bilinear(r, w) == 1
        walls.append(Wall(vec=tuple(r), norm=Fraction(-2), outer=True, root=tuple(r)))
    ch = InducedChamber(weyl=tuple(w), walls=walls,
                        interior=tuple([2 * w[i] + u_partner(m, w)[i] for i in range(RANK)]),
                        sampled=True)
    return SymmetryReport(
        verdict=VERDICT_BORCHERDS,
        generators=gens,
        chamber_orbit_reps=[ch],
        simple_root_orbit_reps=[wl.root for wl in walls],
        cusp=tuple(w),
        stabilizer_rank=mrank,
        chambers_visited=1,
        stats={"conway_case": True},
    )


def u_partner(m: ConwayModel, w):
    g = m.gram
    pv = [sum(g[i][j] * w[i] for i in range(RANK)) for j in range(RANK)]
    u = im.solve_int([pv], [1])
    u2 = im.bilinear(g, u, u)
    return [u[i] - (u2 // 2) * w[i] for i in range(RANK)]


def _joint_fixed_cusp(lat: IntLattice, mats):
    """Primitive generator of the radical of the joint fixed sublattice, or
    None when the fixed space has no isotropic direction."""
    n = lat.rank
    rows = []
    for mat in mats:
        for i in range(n):
            rows.append([mat[i][j] - (1 if i == j else 0) for j in range(n)])
    if not rows:
        return None
    ker = im.kernel_int(rows)
    kc = im.columns(ker) if ker and ker[0] else []
    if not kc:
        return None
    fgram = [[lat.bilinear(a, b) for b in kc] for a in kc]
    rad = im.kernel_int(fgram)
    rc = im.columns(rad) if rad and rad[0] else []
    if len(rc) != 1:
        return None
    evec = im.mat_vec(im.from_columns(kc), rc[0])
    d = im.gcd_list(evec)
    evec = [x // d for x in evec]
    x0 = positive_norm_vector(lat)
    if lat.bilinear(evec, x0) < 0:
        evec = [-x for x in evec]
    return evec


def explore(e: EmbeddedLattice, config: ExploreConfig | None = None) -> SymmetryReport:
    """Breadth-first orbit search over the chamber graph inside the Weyl
    fundamental domain, with fingerprint-bucketed congruence testing."""
    config = config or ExploreConfig()
    if e.R.rank == 0:
        return _conway_case(e, config)
    t_start = time.time()
    gs = [list(r) for r in e.S.gram]
    base = base_chamber(e, seed=config.seed)
    store = [base]
    buckets = {base.fingerprint(gs): [0]}
    seen_keys = {base.walls_key(): 0}
    frontier = [0]
    generators = []
    gen_keys = set()
    witness = None

    def add_gen(mat):
        nonlocal witness
        key = tuple(tuple(r) for r in mat)
        ident = tuple(tuple(1 if i == j else 0 for j in range(e.S.rank))
                      for i in range(e.S.rank))
        if key == ident or key in gen_keys:
            return None
        gen_keys.add(key)
        g = Isometry(e.S, mat)
        generators.append(g)
        sc = classify_isometry(g)
        if sc.kind == HYPERBOLIC and witness is None:
            witness = (g, sc)
        return sc

    def budget_ok():
        if len(store) > config.max_chambers:
            raise BudgetExceeded(f"chamber cap {config.max_chambers} exceeded",
                                 partial={"chambers": len(store)})
        if config.budget_seconds is not None and time.time() - t_start > config.budget_seconds:
            raise BudgetExceeded("wall-clock budget exceeded",
                                 partial={"chambers": len(store)})

    level = [0]
    while level:
        if config.trace:
            config.trace(f"level size {len(level)}, stored {len(store)}, "
                         f"gens {len(generators)}, {time.time()-t_start:.0f}s")
        next_level = []
        # deterministic expansion order regardless of worker count
        tasks = []
        for ci in sorted(level):
            gamma = store[ci]
            for s in hom_g(e, gamma, gamma, find_all=True):
                sc = add_gen(s)
                if witness is not None:
                    return _finish(e, config, store, generators, witness, t_start)
            for wl in gamma.walls:
                if wl.outer or wl.norm >= 0:
                    continue
                tasks.append((ci, wl))
        results = _run_tasks(e, store, tasks, config.threads)
        for (ci, wl), ch in sorted(results, key=lambda t: (t[0][0], t[0][1].vec)):
            budget_ok()
            key = ch.walls_key()
            if key in seen_keys:
                continue
            fp = ch.fingerprint(gs)
            congruent = False
            for cj in buckets.get(fp, []):
                maps = hom_g(e, ch, store[cj])
                if maps:
                    sc = add_gen(maps[0])
                    if witness is not None:
                        return _finish(e, config, store, generators, witness, t_start)
                    congruent = True
                    break
            if congruent:
                seen_keys[key] = -1
                continue
            store.append(ch)
            idx = len(store) - 1
            seen_keys[key] = idx
            buckets.setdefault(fp, []).append(idx)
            next_level.append(idx)
        level = next_level
    return _finish(e, config, store, generators, witness, t_start)


def _run_tasks(e, store, tasks, threads):
    if threads <= 1 or len(tasks) < 2:
        return [((ci, wl), adjacent_chamber(e, store[ci], wl)) for ci, wl in tasks]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as ex:
        chs = list(ex.map(lambda t: adjacent_chamber(e, store[t[0]], t[1]), tasks))
    return list(zip(tasks, chs))


def _finish(e, config, store, generators, witness, t_start):
    gs = [list(r) for r in e.S.gram]
    outer = []
    seen_roots = set()
    for ch in store:
        for wl in ch.walls:
            if wl.outer and wl.root not in seen_roots:
                seen_roots.add(wl.root)
                outer.append(wl.root)
    stats = {"seconds": time.time() - t_start, "chambers": len(store),
             "generators": len(generators)}
    if witness is not None:
        g, sc = witness
        return SymmetryReport(VERDICT_POSITIVE_ENTROPY, generators, store, outer,
                              witness=g, chambers_visited=len(store), stats=stats)
    kinds = {}
    for g in generators:
        kinds[g] = classify_isometry(g)
    parabolics = [g for g, sc in kinds.items() if sc.kind == PARABOLIC]
    if not generators or all(sc.kind == ELLIPTIC for sc in kinds.values()):
        verdict, extra = _elliptic_case(e, config, generators, kinds)
        if verdict == VERDICT_FINITE:
            rep = SymmetryReport(VERDICT_FINITE, generators, store, outer,
                                 chambers_visited=len(store), stats=stats)
            if not outer:
                rep.verdict = VERDICT_NO_SIMPLE_ROOTS
            return rep
        if verdict == VERDICT_POSITIVE_ENTROPY:
            return SymmetryReport(VERDICT_POSITIVE_ENTROPY, generators, store,
                                  outer, witness=extra,
                                  chambers_visited=len(store), stats=stats)
        parabolics = [extra]
        generators = generators + [extra]
    # infinite group with all generators of zero entropy: common cusp or a
    # hyperbolic product must exist
    evec = _joint_fixed_cusp(e.S, [g.matrix for g in generators])
    if evec is not None:
        mrank = cusp_stabilizer_rank(e.S, evec)
        rep = SymmetryReport(VERDICT_BORCHERDS, generators, store, outer,
                             cusp=tuple(evec), stabilizer_rank=mrank,
                             chambers_visited=len(store), stats=stats)
        if not outer:
            rep.verdict = VERDICT_NO_SIMPLE_ROOTS
        return rep
    wit = _search_hyperbolic_word(e.S, generators, config.word_length)
    if wit is not None:
        return SymmetryReport(VERDICT_POSITIVE_ENTROPY, generators, store, outer,
                              witness=wit, chambers_visited=len(store), stats=stats)
    raise BudgetExceeded("no common cusp and no hyperbolic word found within "
                         "the word-length cap", partial={"chambers": len(store)})


def _elliptic_case(e, config, generators, kinds):
    """All generators elliptic: close the group up to a cap. Returns either
    (finite, None), (positive_entropy, witness) or (infinite, non-elliptic
    element found during closure)."""
    if not generators:
        return VERDICT_FINITE, None
    n = e.S.rank
    ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    seen = {ident}
    frontier = [ident]
    mats = [tuple(tuple(r) for r in g.matrix) for g in generators]
    while frontier:
        nxt = []
        for a in frontier:
            for b in mats:
                c = tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n))
                                for j in range(n)) for i in range(n))
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
                    if len(seen) > config.group_cap:
                        # the group is larger than any plausible finite one
                        g = Isometry(e.S, c)
                        sc = classify_isometry(g)
                        if sc.kind == HYPERBOLIC:
                            return VERDICT_POSITIVE_ENTROPY, g
                        if sc.kind == PARABOLIC:
                            return "infinite", g
                        raise BudgetExceeded(
                            "elliptic closure exceeded the group cap")
        frontier = nxt
    return VERDICT_FINITE, None


def _search_hyperbolic_word(s_lat, generators, max_len):
    """Short products of generators with a non-cyclotomic factor."""
    base = [g for g in generators]
    frontier = [Isometry(s_lat, im.identity(s_lat.rank))]
    seen = {frontier[0].matrix}
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in base:
                c = g.compose(w)
                if c.matrix in seen:
                    continue
                seen.add(c.matrix)
                sc = classify_isometry(c)
                if sc.kind == HYPERBOLIC:
                    return c
                nxt.append(c)
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# Top-level verdict

_TWO_REFLECTIVE = None


def two_reflective_table():
    """Root overlattices R with U + R of finite symmetry group (shipped)."""
    global _TWO_REFLECTIVE
    if _TWO_REFLECTIVE is None:
        import json
        from importlib import resources
        from .lattices import parse_lattice
        from .discforms import overlattices as _over
        data = json.loads(resources.files("latkit.data")
                          .joinpath("table1_2reflective.json").read_text())
        out = []
        for entry in data["lattices"]:
            if isinstance(entry, str):
                out.append(parse_lattice(entry))
            else:
                base = parse_lattice(entry["root"])
                want = base.disc_form().subgroup_closure(
                    [tuple(x) for x in entry["glue"]])
                for mlat, sub, _ in _over(base):
                    if len(sub) == entry["index"] and set(sub) == want:
                        out.append(mlat)
                        break
                else:
                    raise LatticeError(f"table overlattice {entry} not found")
        _TWO_REFLECTIVE = out
    return _TWO_REFLECTIVE


def matches_two_reflective(s_lat: IntLattice) -> bool:
    """S isometric to U + R for a tabled 2-reflective root overlattice R,
    certified through genus equality plus uniqueness in genus."""
    from .lattices import U
    for r in two_reflective_table():
        cand = U().direct_sum(r)
        if cand.rank != s_lat.rank or cand.disc != s_lat.disc:
            continue
        if s_lat.disc_form().length <= s_lat.rank - 2 and same_genus(s_lat, cand):
            return True
    return False


def is_borcherds_lattice(s_lat: IntLattice, config: ExploreConfig | None = None,
                         skip_table=False):
    """Full pipeline: screen, embed, explore; returns a SymmetryReport."""
    config = config or ExploreConfig()
    if not s_lat.is_hyperbolic:
        raise LatticeError("input must be hyperbolic")
    if s_lat.rank + s_lat.disc_form().length > 26:
        raise LatticeError("rank + length exceeds 26: no embedding exists")
    if not skip_table and matches_two_reflective(s_lat):
        return SymmetryReport(VERDICT_FINITE, [], [], [],
                              stats={"table_hit": True})
    m = model()
    emb, to_emb = embed_lattice(m, s_lat, name=s_lat.name)
    rep = explore(emb, config)
    if rep.cusp is not None and len(rep.cusp) == s_lat.rank:
        # report the cusp back in the caller's coordinates
        inv = im.inv_frac(to_emb)
        back = [int(sum(inv[i][j] * rep.cusp[j] for j in range(s_lat.rank)))
                for i in range(s_lat.rank)]
        rep.stats["cusp_input_coords"] = back
    return rep
