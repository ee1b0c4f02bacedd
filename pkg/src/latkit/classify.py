"""Classification pipelines: Leech-type testing, candidate generation from
scaled lattices, the rank-2 candidate list, and the desk-scale rank-3/4
classification of zero-entropy lattices with infinite symmetry group."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd

from . import intmat as im
from .borcherds import (ExploreConfig, is_borcherds_lattice, matches_two_reflective,
                        VERDICT_BORCHERDS, VERDICT_FINITE, VERDICT_POSITIVE_ENTROPY,
                        VERDICT_NO_SIMPLE_ROOTS, BudgetExceeded)
from .discforms import same_genus
from .enumeration import covering_radius_sq, neighbor_closure, COVERING_RANK_CAP
from .hyperbolic import cusp_normal_form
from .isometries import definite_isometries, definite_isometry_exists
from .lattices import IntLattice, LatticeError, U, parse_lattice, root_part

LEECH_TYPE = "leech_type"
NOT_LEECH_TYPE = "not_leech_type"
UNDECIDED = "undecided"

RANK_ONE_KS = (2, 3, 4, 5, 7, 9, 13, 25)


@dataclass
class LeechTypeVerdict:
    lattice: IntLattice
    verdict: str
    evidence: str
    detail: object = None


def _is_root_overlattice(w: IntLattice) -> bool:
    return root_part(w).rank == w.rank


def leech_type_test(w: IntLattice, budget_seconds=None) -> LeechTypeVerdict:
    """Four-step strategy: table screen, covering radius, genus screen by
    neighbors, full chamber run on U + W."""
    if not w.is_negative_definite:
        raise LatticeError("Leech-type testing needs a negative definite lattice")
    ul = U().direct_sum(w)
    # step 1: tabled finite symmetry groups
    if matches_two_reflective(ul):
        return LeechTypeVerdict(w, NOT_LEECH_TYPE, "table_hit")
    # step 2: covering radius (small rank only)
    if w.rank <= COVERING_RANK_CAP and not _is_root_overlattice(w):
        rho2 = covering_radius_sq(w)
        if rho2 <= 2:
            return LeechTypeVerdict(w, LEECH_TYPE, "covering_radius", rho2)
    # step 3: two non-isometric non-root-overlattice genus mates
    try:
        classes = neighbor_closure(w, primes=(2, 3, 5), cap=256)
        nonroot = [c for c in classes if not _is_root_overlattice(c)]
        if len(nonroot) >= 2:
            return LeechTypeVerdict(w, NOT_LEECH_TYPE, "two_non_root_members",
                                    nonroot[:2])
    except LatticeError:
        pass
    # step 4: the chamber engine decides
    cfg = ExploreConfig(budget_seconds=budget_seconds)
    try:
        rep = is_borcherds_lattice(ul, cfg, skip_table=True)
    except BudgetExceeded as exc:
        return LeechTypeVerdict(w, UNDECIDED, "budget", exc.partial)
    if rep.verdict == VERDICT_BORCHERDS:
        return LeechTypeVerdict(w, LEECH_TYPE, "borcherds_run", rep)
    return LeechTypeVerdict(w, NOT_LEECH_TYPE, "borcherds_run", rep)


def rank1_leech_bound(k: int) -> int:
    """Least a with <-2km> never Leech type for all m >= a (from the rank-1
    list: admissible k are those with k - 1 dividing 24, topping out at 25)."""
    a = 1
    for m in range(1, 26):
        if k * m in RANK_ONE_KS:
            a = m + 1
    return max(a, 2)


def multiple_bound(w: IntLattice, t_sub: IntLattice, rank1_oracle=None) -> int:
    """N such that only W(m), m <= N can be Leech type (W unique in its
    genus, t_sub a corank-1 primitive sublattice)."""
    if w.rank < 2:
        raise LatticeError("multiple bound needs rank >= 2")
    if t_sub.rank != w.rank - 1:
        raise LatticeError("T must have corank 1")
    if rank1_oracle is None:
        if t_sub.rank == 1:
            k = -t_sub.gram[0][0] // 2
            a = rank1_leech_bound(k)
        else:
            raise LatticeError("supply an oracle for rank >= 2 sublattices")
    else:
        a = rank1_oracle(t_sub)
    b = (2 * t_sub.disc) // w.disc
    return max(a, b)


def rank2_candidates():
    """All negative definite [[-2k1, a], [a, -2k2]] with k1 >= k2 >= a >= 0
    and k1, k2 in {1,2,3,4,5,7,9,13,25} (the GRH-free candidate pool)."""
    ks = (1,) + RANK_ONE_KS
    out = []
    for i, k1 in enumerate(ks):
        for k2 in ks[:i + 1]:
            kk1, kk2 = max(k1, k2), min(k1, k2)
            for a in range(0, kk2 + 1):
                if 4 * kk1 * kk2 - a * a <= 0:
                    continue
                out.append(IntLattice([[-2 * kk1, a], [a, -2 * kk2]],
                                      name=f"[-2*{kk1},{a};-2*{kk2}]"))
    # dedupe exact Gram repeats from the symmetric loop
    seen = set()
    uniq = []
    for lat in out:
        if lat.gram not in seen:
            seen.add(lat.gram)
            uniq.append(lat)
    return uniq


def gram_from_normal_form(n: int, k: int, ell, w: IntLattice) -> IntLattice:
    r = w.rank
    g = [[0] * (r + 2) for _ in range(r + 2)]
    g[0][1] = g[1][0] = n
    g[1][1] = 2 * k
    for i in range(r):
        g[1][2 + i] = g[2 + i][1] = ell[i]
        for j in range(r):
            g[2 + i][2 + j] = w.gram[i][j]
    return IntLattice(g)


def _ell_orbit_reps(w: IntLattice, n: int, cap=4096):
    """Representatives of (Z/n)^r modulo the image of Aut(W) harvested from
    reflections in minimal vectors and sign flips; keeps one per orbit."""
    from itertools import product
    from .enumeration import short_vectors

    r = w.rank
    total = n ** r
    if total > cap:
        raise LatticeError("ell-space too large to enumerate")
    gens = []
    g = [list(row) for row in w.gram]
    # reflections in vectors of the two smallest norms (when integral)
    mins = short_vectors(w, max(2, min(-w.gram[i][i] for i in range(r))))
    for v in mins:
        nv = im.bilinear(g, v, v)
        mat = []
        ok = True
        for j in range(r):
            ej = [1 if t == j else 0 for t in range(r)]
            pj = im.bilinear(g, ej, v)
            col = [ej[t] - (2 * pj * v[t]) // nv if (2 * pj * v[t]) % nv == 0 else None
                   for t in range(r)]
            if any(x is None for x in col):
                ok = False
                break
            mat.append(col)
        if ok:
            mt = im.from_columns(mat)
            gt = im.transpose(mt)
            if im.mat_mul(im.mat_mul(gt, g), mt) == g:
                gens.append(tuple(tuple(row) for row in mt))
    gens.append(tuple(tuple(-1 if i == j else 0 for j in range(r)) for i in range(r)))
    seen_orbit = set()
    reps = []
    for ell in product(range(n), repeat=r):
        if ell in seen_orbit:
            continue
        reps.append(list(ell))
        frontier = {ell}
        orbit = {ell}
        while frontier:
            nxt = set()
            for x in frontier:
                for mat in gens:
                    y = tuple(sum(mat[i][j] * x[j] for j in range(r)) % n
                              for i in range(r))
                    if y not in orbit:
                        orbit.add(y)
                        nxt.add(y)
            frontier = nxt
        seen_orbit |= orbit
    return reps


def borcherds_candidates_from_scaled(w: IntLattice, require_unique_length=True):
    """Candidate hyperbolic lattices glued over a scaled Leech-type W: one
    normal-form Gram per divisor n > 1 of the scale and per ell-orbit, with
    k = -1; deduplicated by genus (plus the length criterion when it makes
    the genus a single class)."""
    c = w.scale()
    if c <= 1:
        return []
    out = []
    reps = []
    for n in range(2, c + 1):
        if c % n:
            continue
        for ell in _ell_orbit_reps(w, n):
            cand = gram_from_normal_form(n, -1, ell, w)
            keep = True
            for prev in reps:
                if prev.rank != cand.rank or prev.disc != cand.disc:
                    continue
                if same_genus(prev, cand):
                    ln = cand.disc_form().length
                    if not require_unique_length or ln <= cand.rank - 2:
                        keep = False
                        break
            if keep:
                reps.append(cand)
                out.append(cand)
    return out


def _canonical_cusp_data(s_lat: IntLattice, cusp):
    """(n, W-lattice, ell mod the joint action) at the distinguished cusp,
    used for exact isometry dedup between confirmed zero-entropy lattices."""
    nf = cusp_normal_form(s_lat, cusp)
    return nf


def confirmed_isometric(s1, nf1, s2, nf2) -> bool:
    """Exact isometry test for two confirmed lattices through their canonical
    cusps: n and W must match, and ell must agree modulo O(W) and shifts by
    the columns of W's Gram."""
    if nf1.n != nf2.n or nf1.k != nf2.k:
        return False
    w1, w2 = nf1.w_lattice, nf2.w_lattice
    maps = definite_isometries(w1, w2, find_all=True)
    if not maps:
        return False
    n = nf1.n
    r = w1.rank
    # ell classes live in (Z/n)^r modulo the column span of W's Gram
    g2cols = [[nf2.w_lattice.gram[i][j] for i in range(r)] for j in range(r)]
    targets = set()
    frontier = {tuple(x % n for x in nf2.ell)}
    targets |= frontier
    while frontier:
        nxt = set()
        for x in frontier:
            for col in g2cols:
                for sgn in (1, -1):
                    y = tuple((x[i] + sgn * col[i]) % n for i in range(r))
                    if y not in targets:
                        targets.add(y)
                        nxt.add(y)
        frontier = nxt
    for mat in maps:
        # ell transforms contravariantly: pairing f.(w_i) with w_i -> sum m_ji
        img = tuple(sum(mat[j][i] * nf1.ell[j] for j in range(r)) % n
                    for i in range(r))
        if img in targets:
            return True
    return False


def classify_zero_entropy_rank(r: int, budget_seconds=None, progress=None):
    """All rank-r (r in {3, 4}) even hyperbolic lattices of zero entropy with
    infinite symmetry group, up to isometry. Desk scale."""
    if r not in (3, 4):
        raise LatticeError("desk-scale classification covers ranks 3 and 4")
    t_start = time.time()
    candidates = []
    if r == 3:
        for k in range(2, 26):
            if k in RANK_ONE_KS:
                candidates.append(U().direct_sum(parse_lattice(f"<{-2*k}>")))
        for k in RANK_ONE_KS:
            w = parse_lattice(f"<{-2*k}>")
            candidates.extend(borcherds_candidates_from_scaled(w))
    else:
        leech2 = [lat for lat in rank2_candidates()
                  if leech_type_test(lat).verdict == LEECH_TYPE]
        for w in leech2:
            candidates.append(U().direct_sum(w))
        for w in leech2:
            if w.scale() > 1:
                candidates.extend(borcherds_candidates_from_scaled(w))
    confirmed = []
    for cand in candidates:
        if progress:
            progress(f"candidate {cand.name or cand.gram}")
        left = None
        if budget_seconds is not None:
            left = budget_seconds - (time.time() - t_start)
            if left <= 0:
                raise BudgetExceeded("classification budget exhausted",
                                     partial=[c for c, _ in confirmed])
        rep = is_borcherds_lattice(cand, ExploreConfig(budget_seconds=left))
        if rep.verdict == VERDICT_BORCHERDS:
            cusp = rep.stats.get("cusp_input_coords") or list(rep.cusp)
            nf = _canonical_cusp_data(cand, cusp)
            if not any(confirmed_isometric(cand, nf, c2, nf2)
                       for c2, nf2 in confirmed):
                confirmed.append((cand, nf))
    return [c for c, _ in confirmed]


def table2_rows():
    data = json.loads(resources.files("latkit.data")
                      .joinpath("table2_leech_root_overlattices.json").read_text())
    return data["rows"]


def table3_data():
    return json.loads(resources.files("latkit.data")
                      .joinpath("table3_borcherds_rank_ge11.json").read_text())
