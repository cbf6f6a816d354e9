"""Reference models that do not go through the chain tables.

* :func:`semistable_model` builds the minimal regular model of a semistable
  picture straight from the dual graph of its stable model: one component per
  principal cluster, joined by chains of reduced rational curves whose lengths
  are read off the relative depths.
* :func:`golden_corpus` loads the hand-checked cases shipped in
  ``data/golden``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any

from .cluster_model import ClusterPicture, PictureError
from .fibre_graph import CENTRAL, CHAIN, FibreGraph, blow_down, from_description
from .invariants import nu


class NotSemistable(PictureError):
    pass


def is_semistable(pic: ClusterPicture) -> bool:
    """Proper clusters fixed by inertia, principal depths integral, principal nu even."""
    for c in pic.proper_clusters():
        if pic.orbit_of(c.id).size != 1:
            return False
        if pic.is_principal(c.id):
            if pic.depth(c.id).denominator != 1 or nu(pic, c.id) % 2 != 0:
                return False
    return True


@dataclass
class _Builder:
    pic: ClusterPicture
    graph: FibreGraph

    def __post_init__(self) -> None:
        self.ends: dict[str, tuple[int, int]] = {}

    def add_principal(self, cid: str) -> None:
        pic = self.pic
        if pic.is_ubereven(cid):
            plus = self.graph.add_component(1, 0, CENTRAL, f"{cid}+")
            minus = self.graph.add_component(1, 0, CENTRAL, f"{cid}-")
            self.ends[cid] = (plus, minus)
        else:
            odd = sum(1 for k in pic.children(cid) if k.size % 2)
            g = max(0, (odd - 1) // 2)
            comp = self.graph.add_component(1, g, CENTRAL, cid)
            self.ends[cid] = (comp, comp)

    def chain(self, a: int, b: int, length: Fraction, tag: str) -> None:
        if length.denominator != 1 or length < 1:
            raise NotSemistable(f"chain length {length} is not a positive integer")
        self.graph.add_chain(a, b, [1] * (int(length) - 1), CHAIN, tag)

    def join(self, top: str, child: str, delta: Fraction) -> None:
        """Edges between the components of ``top`` and a principal ``child``."""
        (tp, tm), (cp, cm) = self.ends[top], self.ends[child]
        if self.pic[child].size % 2:
            self.chain(tp, cp, delta / 2, f"{top}-{child}")
        else:
            self.chain(tp, cp, delta, f"{top}-{child}+")
            self.chain(tm, cm, delta, f"{top}-{child}-")

    def loop(self, cid: str, delta: Fraction, tag: str) -> None:
        plus, minus = self.ends[cid]
        self.chain(plus, minus, 2 * delta, tag)


def semistable_model(pic: ClusterPicture, minimal: bool = True) -> FibreGraph:
    if not is_semistable(pic):
        raise NotSemistable("the picture is not semistable")
    if pic.genus < 2:
        raise NotSemistable("the stable-graph oracle needs genus at least 2")
    b = _Builder(pic, FibreGraph())
    principal = [c.id for c in pic.proper_clusters() if pic.is_principal(c.id)]
    for cid in principal:
        b.add_principal(cid)
    root = pic.root_id
    for cid in principal:
        for k in pic.proper_children(cid):
            if k.id in b.ends:
                b.join(cid, k.id, pic.rel_depth(k.id))
            elif k.size == 2:
                b.loop(cid, pic.rel_depth(k.id), f"twin {k.id}")
            else:  # pragma: no cover - proper non-principal clusters below the top are twins
                raise PictureError(f"unexpected non-principal cluster {k.id}")
    if root not in b.ends:
        _nonprincipal_top(pic, b)
    g = b.graph
    return blow_down(g) if minimal else g


def _nonprincipal_top(pic: ClusterPicture, b: _Builder) -> None:
    root = pic.root_id
    kids = pic.children(root)
    big = [k for k in kids if k.size == 2 * pic.genus]
    if big and pic.is_principal(big[0].id):
        # cotwin top: moving an outside root to infinity turns it into a twin
        s = big[0]
        b.loop(s.id, pic.rel_depth(s.id), f"cotwin {root}")
        return
    if len(kids) != 2:  # pragma: no cover
        raise PictureError("unexpected shape of a non-principal top cluster")
    s1, s2 = kids
    if s1.is_leaf or s2.is_leaf:
        return
    delta = pic.rel_depth(s1.id) + pic.rel_depth(s2.id)
    p1, p2 = s1.id in b.ends, s2.id in b.ends
    if p1 and p2:
        b.join(s1.id, s2.id, delta)
    elif p1 or p2:
        b.loop(s1.id if p1 else s2.id, delta, f"twin {root}")
    else:  # pragma: no cover - two twins only occur in genus 1
        raise NotSemistable("two twins")


# golden corpus ---------------------------------------------------------------------


@dataclass(frozen=True)
class GoldenCase:
    name: str
    dsl: str
    fibre: FibreGraph
    kodaira: str | None = None
    note: str = ""


def _load(name: str) -> list[dict[str, Any]]:
    text = resources.files(__package__).joinpath("data", "golden", name).read_text(encoding="utf-8")
    return json.loads(text)["cases"]


def golden_corpus(kind: str = "all") -> list[GoldenCase]:
    """Golden cases: ``"kodaira"``, ``"figures"`` or ``"all"``."""
    files = {"kodaira": ["kodaira.json"], "figures": ["figures.json"]}
    names = files.get(kind, ["kodaira.json", "figures.json"])
    out = []
    for fname in names:
        for doc in _load(fname):
            out.append(
                GoldenCase(
                    name=doc["name"],
                    dsl=doc["dsl"],
                    fibre=from_description(doc["fibre"]),
                    kodaira=doc.get("kodaira"),
                    note=doc.get("note", ""),
                )
            )
    return out


# Kodaira type from the discriminant --------------------------------------------------

_POTENTIALLY_GOOD = {0: "I0", 2: "II", 3: "III", 4: "IV", 6: "I0*", 8: "IV*", 9: "III*", 10: "II*"}

Poly2 = dict[tuple[int, int], int]  # (power of x, power of p) -> integer coefficient


def _mul(a: Poly2, b: Poly2) -> Poly2:
    out: Poly2 = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def _add(*terms: tuple[int, Poly2]) -> Poly2:
    out: Poly2 = {}
    for scale, poly in terms:
        for k, c in poly.items():
            out[k] = out.get(k, 0) + scale * c
    return {k: c for k, c in out.items() if c}


def expand_dsl(expr: Any) -> Poly2:
    """``f / p^leading`` as an integer polynomial in ``x`` and ``p``.

    Every tower unit is taken to be 1; over an algebraically closed residue
    field this does not change the picture.
    """
    f: Poly2 = {(0, 0): 1}
    for tower in expr.factors:
        t: Poly2 = {(1, 0): 1}
        if tower.shift:
            t[(0, 0)] = -tower.shift
        for n, q in tower.levels:
            if Fraction(q).denominator != 1:
                raise ValueError("fractional exponents have no integral expansion")
            power: Poly2 = {(0, 0): 1}
            for _ in range(n):
                power = _mul(power, t)
            t = _add((1, power), (-1, {(0, int(q)): 1}))
        f = _mul(f, t)
    return f


def _coeff(f: Poly2, i: int) -> Poly2:
    return {(0, j): c for (k, j), c in f.items() if k == i}


def _val(poly: Poly2) -> int:
    if not poly:
        raise ValueError("vanishing invariant: the polynomial is not separable")
    return min(j for _, j in poly)


def kodaira_from_invariants(dsl: str) -> str:
    """Kodaira type of ``y^2 = f(x)`` for a cubic or quartic ``f``.

    Reads the type from ``v(Delta) mod 12`` and ``v(j)`` of the classical
    invariants of the binary quartic; valid in residue characteristic at
    least 5.
    """
    from .poly_frontend import parse_dsl

    expr = parse_dsl(dsl)
    lead = Fraction(expr.leading_val)
    if lead.denominator != 1:
        raise ValueError("the leading coefficient must have integral valuation")
    f = expand_dsl(expr)
    deg = max(i for i, _ in f)
    if deg not in (3, 4):
        raise ValueError("the invariant oracle needs a cubic or a quartic")
    a, b, c, d, e = (_coeff(f, i) for i in (4, 3, 2, 1, 0))
    inv_i = _add((12, _mul(a, e)), (-3, _mul(b, d)), (1, _mul(c, c)))
    inv_j = _add(
        (72, _mul(_mul(a, c), e)),
        (9, _mul(_mul(b, c), d)),
        (-27, _mul(_mul(a, d), d)),
        (-27, _mul(_mul(e, b), b)),
        (-2, _mul(_mul(c, c), c)),
    )
    disc = _add((4, _mul(_mul(inv_i, inv_i), inv_i)), (-1, _mul(inv_j, inv_j)))
    v_disc = _val(disc) + 6 * int(lead)
    v_i = (_val(inv_i) + 2 * int(lead)) if inv_i else None
    v_j = None if v_i is None else 3 * v_i - v_disc
    if v_j is None or v_j >= 0:
        return _POTENTIALLY_GOOD.get(v_disc % 12, f"?({v_disc})")
    n = -v_j
    r = (v_disc - n) % 12
    if r == 0:
        return f"I{n}"
    if r == 6:
        return f"I{n}*"
    return f"?({v_disc},{v_j})"
