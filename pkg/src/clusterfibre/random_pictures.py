"""Seeded generators of random inputs for the property suites."""

from __future__ import annotations

import random
from fractions import Fraction

from .cluster_model import ClusterPicture, PictureError
from .poly_frontend import DslError, picture_from_dsl

_LEVEL_DEGREES = (1, 2, 2, 2, 3, 3, 4, 5, 6)


def _tower(rng: random.Random, shift: int, max_degree: int) -> tuple[str, int]:
    base = "x" if shift == 0 else f"(x-{shift})"
    degree = 1
    text = base
    for _ in range(rng.randint(1, 3)):
        n = rng.choice(_LEVEL_DEGREES)
        if degree * n > max_degree:
            break
        q = rng.randint(1, 12)
        if n == 1 and text == base:
            text = f"(x-{shift}-p^{q})" if shift else f"(x-p^{q})"
            continue
        inner = text if text == "x" else text
        text = f"({inner}^{n}-p^{q})"
        degree *= n
    return text, degree


def random_dsl(rng: random.Random, max_degree: int = 12, max_factors: int = 4) -> str:
    while True:
        parts, total = [], 0
        for _ in range(rng.randint(1, max_factors)):
            room = max_degree - total
            if room <= 0:
                break
            shift = rng.choice((0, 0, 1, 1, 2, 3))
            if rng.random() < 0.15:
                text, deg = ("x" if shift == 0 else f"(x-{shift})"), 1
            else:
                text, deg = _tower(rng, shift, room)
            if not text.startswith("("):
                text = f"({text})"
            parts.append(text)
            total += deg
        if 3 <= total <= max_degree:
            lead = rng.choice(("", "", "p*", "p^2*", "p^3*"))
            return lead + "".join(parts)


def random_picture(rng: random.Random, max_degree: int = 12, tries: int = 200) -> tuple[str, ClusterPicture]:
    """A DSL string together with its (realizable) picture."""
    for _ in range(tries):
        text = random_dsl(rng, max_degree)
        try:
            return text, picture_from_dsl(text)
        except (DslError, PictureError):
            continue
    raise RuntimeError("no valid random polynomial found")


def random_nested(
    rng: random.Random,
    max_gss: int = 8,
    max_b: int = 12,
    with_child: bool | None = None,
) -> ClusterPicture:
    """Top cluster with at most one proper child whose children are all singletons.

    Singleton counts respect the orbit rule: under a cluster of depth
    denominator ``b`` they come in groups of ``b`` plus at most one stable
    root, and a stable proper child leaves no room for a stable singleton.
    """
    while True:
        b_r = rng.randint(1, max_b)
        d_r = Fraction(rng.randint(-2 * b_r, 3 * b_r), b_r)
        child = rng.random() < 0.6 if with_child is None else with_child
        kids: list[dict] = []
        if child:
            b_s = rng.randint(1, max_b)
            d_s = d_r + Fraction(rng.randint(1, 3 * b_s), b_s)
            b_s = d_s.denominator
            size = rng.randint(2, 2 * max_gss + 2)
            if b_s > 1 and size % b_s not in (0, 1):
                size -= size % b_s
                if size < 2:
                    continue
            kids.append({"depth": str(d_s), "orbit": "s", "children": [{} for _ in range(size)]})
        b_r = d_r.denominator
        k = rng.randint(0 if child else 3, 2 * max_gss + 2)
        if b_r > 1:
            k -= k % b_r
            if not child and rng.random() < 0.5:
                k += 1
        kids += [{} for _ in range(k)]
        if len(kids) < 2:
            continue
        tree = {"depth": str(d_r), "children": kids}
        try:
            pic = ClusterPicture.from_tree(tree, rng.randint(0, 3))
        except PictureError:
            continue
        if pic.genus < 1 or pic.root.size > 2 * max_gss + 4:
            continue
        return pic


def random_tree(
    rng: random.Random,
    max_size: int = 12,
    half_twins: bool = True,
    leading: int | None = None,
) -> ClusterPicture:
    """Random picture with every proper cluster fixed by inertia.

    Relative depths are positive integers, except that twins may sit at half
    integral depth when ``half_twins`` is set.
    """

    def grow(size: int) -> dict:
        if size == 1:
            return {}
        if size == 2:
            k = 2
        else:
            k = rng.randint(2, min(size, 5))
        cuts = sorted(rng.sample(range(1, size), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [size])]
        kids = []
        for part in parts:
            node = grow(part)
            if part > 1:
                step = rng.randint(1, 4)
                if part == 2 and half_twins and rng.random() < 0.4:
                    node["rel"] = Fraction(2 * step - 1, 2)
                else:
                    node["rel"] = Fraction(step)
            kids.append(node)
        return {"children": kids}

    def place(node: dict, depth: Fraction) -> dict:
        if not node:
            return {}
        kids = [place(k, depth + k.get("rel", 0)) for k in node["children"]]
        return {"depth": str(depth), "children": kids}

    while True:
        size = rng.randint(3, max_size)
        tree = place(grow(size), Fraction(rng.randint(-2, 2)))
        lead = rng.randint(0, 3) if leading is None else leading
        try:
            pic = ClusterPicture.from_tree(tree, lead)
        except PictureError:
            continue
        if any(pic.orbit_of(c.id).size != 1 for c in pic.proper_clusters()):
            continue
        return pic
