"""Numeric invariants of clusters and Galois orbits.

Orbit invariants are computed for a representative over the field fixed by
its stabiliser: every depth and the leading valuation are multiplied by the
orbit size before the cluster formulas are applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .cluster_model import ClusterPicture, PictureError, lcm


@dataclass(frozen=True)
class ClusterInvariants:
    nu: Fraction
    lam: Fraction
    b: int
    e_s: int
    eps: int
    g_ss: int
    g: int
    odd_children: int
    singleton_count: int


@dataclass(frozen=True)
class OrbitInvariants:
    tag: str
    size: int
    d: Fraction
    nu: Fraction
    lam: Fraction
    b: int
    eps: int
    e: int
    g_ss: int
    g: int
    delta: Fraction | None
    # values over K_X: n*d, n*nu, n*lambda and the denominator of n*d
    d_k: Fraction
    nu_k: Fraction
    lam_k: Fraction
    b_k: int


def nu(pic: ClusterPicture, cid: str) -> Fraction:
    if not pic[cid].is_proper:
        raise PictureError("nu is defined for proper clusters only")
    total = pic.leading_val
    for r in pic.leaves():
        total += pic.depth(pic.wedge(cid, r).id)
    return total


def lam(pic: ClusterPicture, cid: str) -> Fraction:
    halves = sum(k.size // 2 for k in pic.children(cid))
    return nu(pic, cid) / 2 - pic.depth(cid) * halves


def odd_children(pic: ClusterPicture, cid: str) -> int:
    return sum(1 for k in pic.children(cid) if k.size % 2)


def genus_ss(pic: ClusterPicture, cid: str) -> int:
    if pic.is_ubereven(cid):
        return 0
    return max(0, (odd_children(pic, cid) - 1) // 2)


def e_from(d: Fraction, nu_value: Fraction) -> int:
    """Least e with e*d integral and e*nu even."""
    b = d.denominator
    return b if (b * nu_value) % 2 == 0 else 2 * b


def lattice_genus(g_ss: int, d: Fraction, lam_value: Fraction) -> int:
    """#{1 <= x <= g_ss : lambda - x d integral}: interior integral points of the face."""
    return sum(1 for x in range(1, g_ss + 1) if (lam_value - x * d).denominator == 1)


def closed_form_genus(g_ss: int, b: int, lam_value: Fraction) -> int:
    """The three-case closed form; agrees with :func:`lattice_genus` when 2*lambda is integral."""
    if g_ss == 0:
        return 0
    if lam_value.denominator == 1:
        return g_ss // b
    if b % 2 == 0:
        return math.floor(Fraction(g_ss, b) + Fraction(1, 2))
    return 0


def eps_exponent(pic: ClusterPicture, cid: str) -> Fraction:
    star = pic.s_star(cid)
    return nu(pic, star.id) - star.size * pic.depth(star.id)


def epsilon(pic: ClusterPicture, cid: str) -> int:
    """+1/-1 for even clusters and cotwins, 0 otherwise, evaluated over K_X."""
    c = pic[cid]
    if not c.is_proper:
        raise PictureError("epsilon is defined for proper clusters only")
    if c.size % 2 and not pic.is_cotwin(cid):
        return 0
    n = pic.orbit_of(cid).size
    expo = n * eps_exponent(pic, cid)
    if expo.denominator != 1:
        raise PictureError(
            f"sign of cluster {cid}: parity exponent {expo} is not an integer (inconsistent input)"
        )
    return -1 if expo.numerator % 2 else 1


def e_cluster(pic: ClusterPicture, cid: str) -> int:
    return e_from(pic.depth(cid), nu(pic, cid))


def cluster_invariants(pic: ClusterPicture, cid: str) -> ClusterInvariants:
    d = pic.depth(cid)
    nu_v = nu(pic, cid)
    lam_v = lam(pic, cid)
    gss = genus_ss(pic, cid)
    n = pic.orbit_of(cid).size
    return ClusterInvariants(
        nu=nu_v,
        lam=lam_v,
        b=d.denominator,
        e_s=e_from(d, nu_v),
        eps=epsilon(pic, cid),
        g_ss=gss,
        g=lattice_genus(gss, n * d, n * lam_v),
        odd_children=odd_children(pic, cid),
        singleton_count=len(pic.singleton_children(cid)),
    )


def orbit_invariants(pic: ClusterPicture, tag: str) -> OrbitInvariants:
    orbit = pic.orbits[tag]
    values = None
    for member in orbit.members:
        v = _orbit_values(pic, member, orbit.size)
        if values is None:
            values = v
        elif v != values:
            raise PictureError(f"orbit {tag}: invariants depend on the chosen member")
    assert values is not None
    return OrbitInvariants(tag=tag, size=orbit.size, **values)


def _orbit_values(pic: ClusterPicture, cid: str, n: int) -> dict:
    d = pic.depth(cid)
    nu_v = nu(pic, cid)
    lam_v = lam(pic, cid)
    gss = genus_ss(pic, cid)
    d_k, nu_k, lam_k = n * d, n * nu_v, n * lam_v
    return dict(
        d=d,
        nu=nu_v,
        lam=lam_v,
        b=d.denominator,
        eps=epsilon(pic, cid),
        e=e_from(d_k, nu_k),
        g_ss=gss,
        g=lattice_genus(gss, d_k, lam_k),
        delta=None if cid == pic.root_id else pic.rel_depth(cid),
        d_k=d_k,
        nu_k=nu_k,
        lam_k=lam_k,
        b_k=d_k.denominator,
    )


class InvariantTable:
    """All cluster and orbit invariants of a picture, computed once."""

    def __init__(self, pic: ClusterPicture) -> None:
        self.picture = pic
        self.clusters = {c.id: cluster_invariants(pic, c.id) for c in pic.proper_clusters()}
        self.orbits = {o.tag: orbit_invariants(pic, o.tag) for o in pic.proper_orbits()}

    def of(self, cid: str) -> OrbitInvariants:
        return self.orbits[self.picture[cid].orbit_tag]

    def rows(self) -> list[dict]:
        pic = self.picture
        out = []
        for c in pic.proper_clusters():
            ci = self.clusters[c.id]
            oi = self.of(c.id)
            out.append(
                {
                    "id": c.id,
                    "orbit": c.orbit_tag,
                    "orbit_size": oi.size,
                    "size": c.size,
                    "depth": str(c.depth),
                    "nu": str(ci.nu),
                    "lambda": str(ci.lam),
                    "b": ci.b,
                    "eps": ci.eps,
                    "e": oi.e,
                    "g_ss": ci.g_ss,
                    "g": oi.g,
                    "classes": sorted(pic.classify(c.id)),
                }
            )
        return out


def semistable_degree(pic: ClusterPicture) -> int:
    """Degree of the tame extension over which the curve becomes semistable."""
    table = InvariantTable(pic)
    parts = []
    for o in pic.proper_orbits():
        inv = table.orbits[o.tag]
        parts.append(o.size)
        if pic.is_principal(o.representative):
            parts.append(o.size * inv.e)
    return lcm(parts)
