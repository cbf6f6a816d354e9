"""Assemble the special fibre of the minimal SNC model from a cluster picture.

The work is split in two: :func:`build_plan` turns the picture into abstract
pieces (central components and sloped chains), :func:`realize` expands the
chains and wires everything into a :class:`FibreGraph`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import chain_engine as ce
from .cluster_model import ClusterPicture, PictureError
from .fibre_graph import CENTRAL, CHAIN, TAIL_KIND, FibreGraph, canonical_form, from_description
from .invariants import InvariantTable, OrbitInvariants, semistable_degree

PLUS, MINUS, ONLY = "+", "-", ""


class AssemblyError(ValueError):
    """The rules produced an inconsistent fibre."""


class UnsupportedPicture(PictureError):
    """A picture outside the supported shapes (wild, or an unhandled top cluster)."""


@dataclass(frozen=True)
class CentralSpec:
    tag: str
    sign: str
    multiplicity: int
    genus: int
    label: str


@dataclass(frozen=True)
class ChainPlan:
    name: str
    spec: ce.SlopedChainSpec
    start: tuple[str, str]
    end: tuple[str, str] | None = None
    crosses: tuple[int, ...] = ()
    count: int = 1
    # explicit multiplicities, bypassing the slope expansion
    fixed: tuple[int, ...] | None = None


@dataclass
class AssemblyPlan:
    picture: ClusterPicture
    centrals: list[CentralSpec] = field(default_factory=list)
    chains: list[ChainPlan] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def signs(self, tag: str) -> list[str]:
        return [c.sign for c in self.centrals if c.tag == tag]

    def key(self, tag: str, sign: str = ONLY) -> tuple[str, str]:
        """The central component for ``sign``; a lone component serves both signs."""
        signs = self.signs(tag)
        if not signs:
            raise AssemblyError(f"orbit {tag} has no central component")
        if signs == [ONLY]:
            return (tag, ONLY)
        if sign == ONLY:
            raise AssemblyError(f"orbit {tag} has two central components; a sign is needed")
        return (tag, sign)

    def both(self, tag: str) -> list[tuple[str, str]]:
        return [self.key(tag, PLUS), self.key(tag, MINUS)]


# central components --------------------------------------------------------------


def central_components(pic: ClusterPicture, table: InvariantTable) -> list[CentralSpec]:
    out = []
    for orbit in pic.proper_orbits():
        rep = orbit.representative
        if not pic.is_principal(rep):
            continue
        inv = table.orbits[orbit.tag]
        mult = orbit.size * inv.e
        if pic.is_ubereven(rep) and inv.eps == 1:
            out.append(CentralSpec(orbit.tag, PLUS, mult, 0, f"G_{rep}+"))
            out.append(CentralSpec(orbit.tag, MINUS, mult, 0, f"G_{rep}-"))
        else:
            out.append(CentralSpec(orbit.tag, ONLY, mult, inv.g, f"G_{rep}"))
    return out


# tails --------------------------------------------------------------------------------


def _tail(t1: Fraction, k: int) -> ce.SlopedChainSpec:
    return ce.SlopedChainSpec.tail(Fraction(t1), k)


def tails_for(pic: ClusterPicture, plan: AssemblyPlan, inv: OrbitInvariants) -> list[ChainPlan]:
    """Tails of the central component(s) of a principal orbit."""
    if inv.e <= 1:
        return []
    tag = inv.tag
    rep = pic.orbits[tag].representative
    n = inv.size
    uber = pic.is_ubereven(rep)
    out: list[ChainPlan] = []

    if rep == pic.root_id:
        if pic.root.size % 2:
            t1 = (inv.g_ss + 1) * inv.d - inv.lam
            out.append(ChainPlan("T_inf", _tail(t1, 1), plan.key(tag)))
        elif inv.eps == 1:
            for sign in (PLUS, MINUS):
                out.append(ChainPlan(f"T_inf{sign}", _tail(inv.d, 1), plan.key(tag, sign)))
        elif inv.e > 2:
            out.append(ChainPlan("T_inf", _tail(inv.d, 2), plan.key(tag)))

    # y=0 tails: one per orbit of singletons; with b' = 1 every singleton counts
    singles = len(pic.singleton_children(rep))
    b = inv.b_k
    groups = singles if b == 1 else singles // b
    if groups and inv.e > b:
        out.append(ChainPlan("T_y=0", _tail(-inv.lam, n * b), plan.key(tag), count=groups))

    stable = pic.stable_children(rep)
    if not stable:
        if inv.lam_k.denominator != 1:
            if inv.e > 2:
                out.append(ChainPlan("T_x=0", _tail(-inv.d, 2 * n), plan.key(tag)))
        else:
            for sign in (PLUS, MINUS):
                out.append(ChainPlan(f"T_x=0{sign}", _tail(-inv.d, n), plan.key(tag, sign)))

    if not uber and b > 1 and pic.stable_singleton(rep):
        out.append(ChainPlan("T_(0,0)", _tail(-inv.lam, n), plan.key(tag)))
    return out


# links between a principal orbit and its proper child orbits ---------------------------


def links_for(pic: ClusterPicture, plan: AssemblyPlan, table: InvariantTable, tag: str) -> list[ChainPlan]:
    inv = table.orbits[tag]
    out: list[ChainPlan] = []
    for child in pic.child_orbits(tag):
        rep = pic[child.representative]
        if not rep.is_proper:
            continue
        cinv = table.orbits[child.tag]
        k = child.size
        delta = cinv.delta
        name = f"L_{rep.id}"
        if pic.is_principal(rep.id):
            if rep.size % 2:
                spec = ce.SlopedChainSpec(-k * inv.lam, -k * (inv.lam + delta / 2), k)
                out.append(ChainPlan(name, spec, plan.key(tag), plan.key(child.tag)))
            elif cinv.eps == 1:
                spec = ce.SlopedChainSpec(-k * inv.d, -k * cinv.d, k)
                for sign in (PLUS, MINUS):
                    out.append(
                        ChainPlan(name + sign, spec, plan.key(tag, sign), plan.key(child.tag, sign))
                    )
            else:
                kk = 2 * k
                spec = ce.SlopedChainSpec(-kk * inv.d, -kk * cinv.d, kk)
                out.append(ChainPlan(name, spec, plan.key(tag), plan.key(child.tag)))
        else:  # twin orbit
            if cinv.eps == 1:
                spec = ce.SlopedChainSpec(-k * inv.d, -k * (inv.d + 2 * delta), k, ce.LOOP)
                out.append(ChainPlan(name, spec, plan.key(tag, MINUS), plan.key(tag, PLUS)))
            else:
                kk = 2 * k
                spec = ce.SlopedChainSpec(-kk * inv.d, -kk * (inv.d + delta) - 1, kk, ce.CROSSED_TAIL)
                out.append(ChainPlan(name, spec, plan.key(tag), crosses=(k, k)))
    return out


# a top cluster that is not principal ------------------------------------------------------


def moebius_normalise(pic: ClusterPicture) -> ClusterPicture:
    """Send the lone singleton of ``R = s + r`` to infinity; ``s`` becomes the top cluster."""
    root = pic.root
    (s,) = [k for k in pic.children(root.id) if k.is_proper]
    shift = -2 * root.depth

    tree = pic.to_tree()

    def move(node: dict) -> dict:
        out = dict(node)
        if "children" in node:
            out["depth"] = Fraction(node["depth"]) + shift
            out["children"] = [move(k) for k in node["children"]]
        return out

    (sub,) = [k for k in tree["children"] if k.get("id") == s.id]
    lead = pic.leading_val + (root.size - 1) * root.depth
    return ClusterPicture.from_tree(move(sub), lead)


def twin_pair_normalise(pic: ClusterPicture) -> ClusterPicture:
    """``R = t1 + t2`` with two fixed twins: move a K-rational centre of ``t2`` to infinity.

    The roots of ``t2`` become two singletons of a new top cluster of depth
    ``-d_t2`` and ``t1`` a twin at relative depth ``delta_1 + delta_2``.
    """
    root = pic.root
    t1, t2 = pic.children(root.id)
    d_r, d1, d2 = root.depth, t1.depth, t2.depth
    twin = {"id": t1.id, "orbit": t1.orbit_tag, "depth": d1 - 2 * d_r, "children": [{}, {}]}
    tree = {"id": root.id, "orbit": root.orbit_tag, "depth": -d2, "children": [twin, {}, {}]}
    return ClusterPicture.from_tree(tree, pic.leading_val + 2 * d_r + 2 * d2)


def _is_twin_pair(pic: ClusterPicture) -> bool:
    kids = pic.children(pic.root_id)
    return (
        len(kids) == 2
        and all(k.size == 2 for k in kids)
        and kids[0].orbit_tag != kids[1].orbit_tag
    )


def _is_moebius_case(pic: ClusterPicture) -> bool:
    kids = pic.children(pic.root_id)
    return pic.root.size % 2 == 0 and len(kids) == 2 and any(k.is_leaf for k in kids)


def nonprincipal_top(pic: ClusterPicture, plan: AssemblyPlan, table: InvariantTable) -> None:
    """Pieces coming from a top cluster that has no component of its own."""
    root = pic.root
    kids = pic.children(root.id)
    g = pic.genus

    if pic.is_cotwin(root.id):
        (s,) = [k for k in kids if k.size == 2 * g]
        sinv = table.of(s.id)
        delta = sinv.delta
        if s.size == 2:
            _bare_twin(plan, s.id, delta, sinv.eps)
            return
        d = sinv.d
        if sinv.eps == 1:
            spec = ce.SlopedChainSpec(d, d - 2 * delta, 1, ce.LOOP)
            plan.chains.append(ChainPlan("L_cotwin", spec, plan.key(sinv.tag, MINUS), plan.key(sinv.tag, PLUS)))
        else:
            spec = ce.SlopedChainSpec(2 * d, 2 * (d - delta) - 1, 2, ce.CROSSED_TAIL)
            plan.chains.append(ChainPlan("L_cotwin", spec, plan.key(sinv.tag), crosses=(1, 1)))
        return

    if root.size % 2 or len(kids) != 2 or any(k.is_leaf for k in kids):
        raise UnsupportedPicture(f"top cluster of shape {pic.shape(root.id)} is not supported")

    a, b = kids
    delta = pic.distance(a.id, b.id)
    if a.orbit_tag == b.orbit_tag:
        inv = table.of(a.id)
        if a.size == 2:
            # I_n or I_n* with n = 4 delta_t, the twist decided by the top cluster
            _bare_twin(plan, a.id, 2 * inv.delta, -table.of(root.id).eps)
            return
        if a.size % 2:
            t = (inv.g_ss + 1) * inv.d - inv.lam
            spec = ce.SlopedChainSpec(2 * t, 2 * t - delta / 2 - 1, 2, ce.CROSSED_TAIL)
            plan.chains.append(ChainPlan("L_swap", spec, plan.key(inv.tag), crosses=(1, 1)))
        elif inv.eps == 1:
            spec = ce.SlopedChainSpec(2 * inv.d, 2 * inv.d - delta - 1, 2, ce.CROSSED_TAIL)
            for sign in (PLUS, MINUS):
                plan.chains.append(ChainPlan("L_swap" + sign, spec, plan.key(inv.tag, sign), crosses=(1, 1)))
        else:
            spec = ce.SlopedChainSpec(4 * inv.d, 4 * (inv.d - delta / 2) - 1, 4, ce.CROSSED_TAIL)
            plan.chains.append(ChainPlan("L_swap", spec, plan.key(inv.tag), crosses=(2, 2)))
        return

    twins = [k for k in kids if k.size == 2]
    if len(twins) == 2:  # pragma: no cover - build_plan normalises this shape first
        raise UnsupportedPicture("a top cluster made of two twins is not supported")
    if twins:
        (t,) = twins
        (s,) = [k for k in kids if k.size != 2]
        sinv, tinv = table.of(s.id), table.of(t.id)
        d = sinv.d
        if tinv.eps == 1:
            spec = ce.SlopedChainSpec(d, d - 2 * delta, 1, ce.LOOP)
            plan.chains.append(ChainPlan(f"L_{t.id}", spec, plan.key(sinv.tag, PLUS), plan.key(sinv.tag, MINUS)))
        else:
            spec = ce.SlopedChainSpec(2 * d, 2 * (d - delta) - 1, 2, ce.CROSSED_TAIL)
            plan.chains.append(ChainPlan(f"L_{t.id}", spec, plan.key(sinv.tag), crosses=(1, 1)))
        return

    ainv, binv = table.of(a.id), table.of(b.id)
    if a.size % 2:
        top = (ainv.g_ss + 1) * ainv.d - ainv.lam
        spec = ce.SlopedChainSpec(top, top - delta / 2, 1)
        plan.chains.append(ChainPlan("L_R", spec, plan.key(ainv.tag), plan.key(binv.tag)))
    elif ainv.eps == 1:
        spec = ce.SlopedChainSpec(ainv.d, ainv.d - delta, 1)
        for sign in (PLUS, MINUS):
            plan.chains.append(ChainPlan("L_R" + sign, spec, plan.key(ainv.tag, sign), plan.key(binv.tag, sign)))
    else:
        spec = ce.SlopedChainSpec(2 * ainv.d, 2 * (ainv.d - delta), 2)
        plan.chains.append(ChainPlan("L_R", spec, plan.key(ainv.tag), plan.key(binv.tag)))


def _bare_twin(plan: AssemblyPlan, tid: str, delta: Fraction, eps: int) -> None:
    """Genus one with the top cluster a twin plus one or two singletons."""
    length = 2 * delta
    if length.denominator != 1:
        raise UnsupportedPicture(f"twin {tid}: relative depth {delta} is not a half-integer")
    n = int(length)
    key = ("twin", ONLY)
    spec = ce.SlopedChainSpec(Fraction(1), Fraction(0), 1, ce.LOOP)
    if eps == 1:
        # cycle of n rational curves; n = 1 is a nodal curve
        plan.centrals.append(CentralSpec("twin", ONLY, 1, 0, f"G_{tid}"))
        plan.chains.append(ChainPlan(f"L_{tid}", spec, key, key, fixed=(1,) * (n - 1)))
    else:
        plan.centrals.append(CentralSpec("twin", ONLY, 2, 0, f"G_{tid}"))
        crossed = ce.SlopedChainSpec(Fraction(1), Fraction(0), 2, ce.CROSSED_TAIL)
        plan.chains.append(ChainPlan(f"L_{tid}", crossed, key, crosses=(1, 1), fixed=(2,) * n))
        plan.chains.append(ChainPlan(f"L_{tid}'", crossed, key, crosses=(1, 1), fixed=()))


# plan and realisation ----------------------------------------------------------------------


def build_plan(pic: ClusterPicture) -> AssemblyPlan:
    if _is_twin_pair(pic):
        inner = build_plan(twin_pair_normalise(pic))
        inner.notes.insert(0, "twin pair")
        return inner
    if _is_moebius_case(pic):
        inner = build_plan(moebius_normalise(pic))
        inner.notes.insert(0, "moebius")
        return inner
    table = InvariantTable(pic)
    plan = AssemblyPlan(pic)
    plan.centrals.extend(central_components(pic, table))
    if not pic.is_principal(pic.root_id):
        nonprincipal_top(pic, plan, table)
    for orbit in pic.proper_orbits():
        if not pic.is_principal(orbit.representative):
            continue
        plan.chains.extend(tails_for(pic, plan, table.orbits[orbit.tag]))
        plan.chains.extend(links_for(pic, plan, table, orbit.tag))
    return plan


def realize(plan: AssemblyPlan) -> FibreGraph:
    g = FibreGraph()
    ids: dict[tuple[str, str], int] = {}
    for c in plan.centrals:
        ids[(c.tag, c.sign)] = g.add_component(c.multiplicity, c.genus, CENTRAL, c.label)
    for ch in plan.chains:
        start = ids[ch.start]
        end = ids[ch.end] if ch.end is not None else None
        if ch.fixed is None:
            exp = ce.expand_chain(ch.spec)
            if end is None and not exp.multiplicities and not ch.crosses:
                continue
            _check_ends(g, ch, exp, start, end)
            mults = exp.multiplicities
        else:
            mults = list(ch.fixed)
        kind = TAIL_KIND if end is None else CHAIN
        for _ in range(ch.count):
            g.add_chain(start, end, mults, kind, ch.name, ch.crosses, ch.spec.kind)
    g.metadata["notes"] = list(plan.notes)
    return g


def _check_ends(g: FibreGraph, ch: ChainPlan, exp: ce.ChainExpansion, start: int, end: int | None) -> None:
    mu = ch.spec.mu
    first = mu * exp.fractions[0].denominator
    if first != g.components[start].multiplicity:
        raise AssemblyError(
            f"chain {ch.name}: slope {ch.spec.top} gives end multiplicity {first}, "
            f"host has {g.components[start].multiplicity}"
        )
    if end is not None:
        last = mu * exp.fractions[-1].denominator
        if last != g.components[end].multiplicity:
            raise AssemblyError(
                f"chain {ch.name}: slope {ch.spec.bottom} gives end multiplicity {last}, "
                f"target has {g.components[end].multiplicity}"
            )


def assemble(pic: ClusterPicture, residue_char: int | None = None) -> FibreGraph:
    """Special fibre of the minimal SNC model.

    With ``residue_char`` given, pictures whose semistable degree is divisible
    by it (wild inertia) are refused.
    """
    if residue_char:
        deg = semistable_degree(pic)
        if deg % residue_char == 0:
            raise UnsupportedPicture(
                f"semistable degree {deg} is divisible by the residue characteristic {residue_char}"
            )
    return realize(build_plan(pic))


# Kodaira symbols ------------------------------------------------------------------------------


def _star(center: int, tails: list[list[int]]) -> FibreGraph:
    return from_description(
        {"centrals": {"c": [center, 0]}, "chains": [{"from": "c", "mults": t} for t in tails]}
    )


KODAIRA_TEMPLATES: dict[str, FibreGraph] = {
    "I0": from_description({"centrals": {"c": [1, 1]}}),
    "II": _star(6, [[1], [2], [3]]),
    "III": _star(4, [[1], [2], [1]]),
    "IV": _star(3, [[1], [1], [1]]),
    "I0*": _star(2, [[1], [1], [1], [1]]),
    "IV*": _star(3, [[2, 1], [2, 1], [2, 1]]),
    "III*": _star(4, [[3, 2, 1], [3, 2, 1], [2]]),
    "II*": _star(6, [[5, 4, 3, 2, 1], [4, 2], [3]]),
}


def cycle_graph(n: int) -> FibreGraph:
    g = FibreGraph()
    first = g.add_component(1, 0)
    if n == 1:
        g.add_edge(first, first)
    else:
        g.add_chain(first, first, [1] * (n - 1))
    return g


def dstar_graph(n: int) -> FibreGraph:
    g = FibreGraph()
    first = g.add_component(2, 0)
    g.add_chain(first, None, [], TAIL_KIND, crosses=(1, 1))
    g.add_chain(first, None, [2] * n, TAIL_KIND, crosses=(1, 1))
    return g


def kodaira_symbol(fibre: FibreGraph) -> str | None:
    """Kodaira symbol of a genus-one fibre, or None if it matches no type.

    A fibre whose multiplicities share a factor ``m > 1`` (a torsor without a
    rational point) is reported as ``m`` followed by the symbol of the reduced
    fibre, e.g. ``2I0``.
    """
    m = math.gcd(*(c.multiplicity for c in fibre.components))
    if m > 1:
        reduced = fibre.copy()
        for c in reduced.components:
            c.multiplicity //= m
        inner = kodaira_symbol(reduced)
        return None if inner is None else f"{m}{inner}"
    form = canonical_form(fibre)
    for name, tmpl in KODAIRA_TEMPLATES.items():
        if canonical_form(tmpl) == form:
            return name
    n = len(fibre.components)
    if all(c.multiplicity == 1 and c.genus == 0 for c in fibre.components):
        if canonical_form(cycle_graph(n)) == form:
            return f"I{n}"
    if n >= 6 and canonical_form(dstar_graph(n - 5)) == form:
        return f"I{n - 5}*"
    return None


def kodaira_type(pic: ClusterPicture) -> str:
    if pic.genus != 1:
        raise PictureError(f"Kodaira types need genus 1, picture has genus {pic.genus}")
    sym = kodaira_symbol(assemble(pic))
    if sym is None:
        raise AssemblyError("assembled fibre matches no Kodaira type")
    return sym


__all__ = [
    "AssemblyError",
    "AssemblyPlan",
    "CentralSpec",
    "ChainPlan",
    "UnsupportedPicture",
    "assemble",
    "build_plan",
    "central_components",
    "kodaira_symbol",
    "kodaira_type",
    "links_for",
    "moebius_normalise",
    "nonprincipal_top",
    "realize",
    "tails_for",
]
