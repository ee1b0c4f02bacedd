"""Euclidean-coordinate helpers for a single E8 block.

The package represents E8 abstractly by its (negative) Cartan Gram matrix.
For constructing explicit vectors (orthogonal root sets, D/A chains, vectors
of prescribed norm) it is convenient to pass through the standard euclidean
model: D8 plus the all-halves glue vector. This module converts between the
two pictures; basis-coordinate outputs are always verified integral.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from . import intmat as im
from .lattices import ade

# Bourbaki simple roots of E8 in R^8, permuted to match ade("E", 8)'s node
# ordering (chain 0..6 with node 7 attached to node 2).
_BOURBAKI = [
    [Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2),
     Fraction(-1, 2), Fraction(-1, 2), Fraction(-1, 2), Fraction(1, 2)],   # a1
    [Fraction(1), Fraction(1), 0, 0, 0, 0, 0, 0],                          # a2
    [Fraction(-1), Fraction(1), 0, 0, 0, 0, 0, 0],                         # a3
    [0, Fraction(-1), Fraction(1), 0, 0, 0, 0, 0],                         # a4
    [0, 0, Fraction(-1), Fraction(1), 0, 0, 0, 0],                         # a5
    [0, 0, 0, Fraction(-1), Fraction(1), 0, 0, 0],                         # a6
    [0, 0, 0, 0, Fraction(-1), Fraction(1), 0, 0],                         # a7
    [0, 0, 0, 0, 0, Fraction(-1), Fraction(1), 0],                         # a8
]
_PERM = [1, 3, 4, 5, 6, 7, 8, 2]  # ade node i  ->  Bourbaki node _PERM[i]

_BASIS = [[_BOURBAKI[_PERM[i] - 1][r] for i in range(8)] for r in range(8)]
_BASIS_INV = im.inv_frac(_BASIS)


def _check_model():
    cartan = [[sum(_BASIS[r][i] * _BASIS[r][j] for r in range(8)) for j in range(8)]
              for i in range(8)]
    neg = [[-x for x in row] for row in cartan]
    assert [list(r) for r in ade("E", 8).gram] == neg, "euclid model mismatch"


_check_model()


def euclid_to_coords(u):
    """Cartan-basis coordinates of a euclidean E8 vector; must be integral."""
    x = im.mat_vec(_BASIS_INV, [Fraction(c) for c in u])
    out = []
    for c in x:
        c = Fraction(c)
        if c.denominator != 1:
            raise ValueError("vector is not in E8")
        out.append(int(c))
    return out


def coords_to_euclid(x):
    return im.mat_vec(_BASIS, list(x))


def orthogonal_roots(k):
    """k pairwise orthogonal roots whose span meets E8 in exactly their
    A_1^k span (verified elsewhere); k <= 3."""
    if k > 3:
        raise ValueError("at most 3 orthogonal roots per block stay primitive")
    pats = [[1, 1, 0, 0, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 1, 0, 0]]
    return [euclid_to_coords(p) for p in pats[:k]]


def a_chain(m):
    """Simple roots of an A_m sublattice (primitive for m <= 6)."""
    if m > 6:
        raise ValueError("A_m chain stays primitive only for m <= 6 here")
    out = []
    for i in range(m):
        u = [0] * 8
        u[i], u[i + 1] = 1, -1
        out.append(euclid_to_coords(u))
    return out


def d_chain(m):
    """Simple roots of a D_m sublattice in the ade() node order (m <= 7)."""
    if not 4 <= m <= 7:
        raise ValueError("need 4 <= m <= 7 for a primitive D_m in one block")
    out = []
    for i in range(m - 2):
        u = [0] * 8
        u[i], u[i + 1] = 1, -1
        out.append(euclid_to_coords(u))
    u = [0] * 8
    u[m - 2], u[m - 1] = 1, -1
    out.append(euclid_to_coords(u))
    u = [0] * 8
    u[m - 2], u[m - 1] = 1, 1
    out.append(euclid_to_coords(u))
    return out


def e_chain(m):
    """Simple roots of E6/E7 as prefixes of the E8 node set (primitive)."""
    assert m in (6, 7)
    # ade("E", m) ordering: chain 0..m-2 plus node m-1 on node 2; the E8
    # basis nodes 0..m-2 plus node 7 realize exactly that diagram.
    idx = list(range(m - 1)) + [7]
    out = []
    for i in idx:
        v = [0] * 8
        v[i] = 1
        out.append(v)
    return out


def vector_of_norm(m):
    """A primitive E8 vector of euclidean norm m (m even, m >= 2), in
    Cartan-basis coordinates.

    Searches D8-type representatives x with at most 7 nonzero entries
    (a zero entry plus gcd 1 forces primitivity inside E8).
    """
    from math import gcd

    if m <= 0 or m % 2:
        raise ValueError("norm must be a positive even integer")

    def decompose(rest, slots, maxv, acc):
        if rest == 0:
            u = acc + [0] * (8 - len(acc))
            if len(acc) <= 7:
                g = 0
                for x in u:
                    g = gcd(g, x)
                if g == 1:
                    return u
            return None
        if slots == 0:
            return None
        for a in range(min(maxv, isqrt(rest)), 0, -1):
            got = decompose(rest - a * a, slots - 1, a, acc + [a])
            if got is not None:
                return got
        return None

    u = decompose(m, 7, isqrt(m), [])
    if u is not None:
        return euclid_to_coords(u)
    raise ValueError(f"no primitive E8 vector of norm {m} found")
