"""Cluster pictures: the rooted tree of clusters, depths and Galois orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping

ODD = "odd"
EVEN = "even"
TWIN = "twin"
PROPER = "proper"
PRINCIPAL = "principal"
UBEREVEN = "übereven"
COTWIN = "cotwin"


class PictureError(ValueError):
    """Raised when a cluster picture violates a structural invariant."""


@dataclass(frozen=True)
class Cluster:
    id: str
    size: int
    depth: Fraction | None
    children: tuple[str, ...]
    orbit_tag: str
    parent: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.size == 1

    @property
    def is_proper(self) -> bool:
        return self.size >= 2


@dataclass(frozen=True)
class Orbit:
    tag: str
    members: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def representative(self) -> str:
        return self.members[0]


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise PictureError(f"depth {value!r} must be exact, not a float")
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise PictureError(f"cannot read {value!r} as a rational") from exc


class ClusterPicture:
    """Immutable cluster picture.

    Build with :meth:`from_tree`.  Leaves may omit orbit tags; those are then
    derived from the parent orbits (groups of ``b`` conjugate singletons per
    member, the remainder being the stable singleton).
    """

    def __init__(
        self,
        clusters: Mapping[str, Cluster],
        root: str,
        leading_val: Fraction,
    ) -> None:
        self._clusters = dict(clusters)
        self.explicit: frozenset[tuple[str, str]] = frozenset()
        self.root_id = root
        self.leading_val = _as_fraction(leading_val)
        if self.leading_val.denominator != 1:
            raise PictureError(f"leading coefficient valuation {self.leading_val} is not an integer")
        orbit_members: dict[str, list[str]] = {}
        for cid in self._preorder(root):
            orbit_members.setdefault(self._clusters[cid].orbit_tag, []).append(cid)
        self.orbits = {tag: Orbit(tag, tuple(m)) for tag, m in orbit_members.items()}
        self._check()

    # construction -----------------------------------------------------------

    @classmethod
    def from_tree(cls, tree: Mapping[str, Any], leading_val: Any = 0) -> "ClusterPicture":
        """Build from nested dicts ``{"depth", "orbit", "children", "id"?}``; leaves ``{}``."""
        raw: dict[str, dict[str, Any]] = {}
        counter = iter(range(10**9))
        explicit: set[tuple[str, str]] = set()

        def walk(node: Mapping[str, Any], parent: str | None) -> str:
            kids = node.get("children") or []
            if not isinstance(kids, list):
                raise PictureError("children must be a list")
            if kids and len(kids) < 2:
                raise PictureError("a proper cluster needs at least two children")
            cid = str(node.get("id") or (f"c{next(counter)}" if kids else f"r{next(counter)}"))
            if cid in raw:
                raise PictureError(f"duplicate cluster id {cid!r}")
            explicit.update((cid, key) for key in ("id", "orbit") if node.get(key) is not None)
            raw[cid] = {"parent": parent, "node": node}
            raw[cid]["children"] = tuple(walk(k, cid) for k in kids)
            return cid

        root = walk(tree, None)
        if not raw[root]["children"]:
            raise PictureError("the top cluster must be proper")

        sizes: dict[str, int] = {}

        def size(cid: str) -> int:
            if cid not in sizes:
                kids = raw[cid]["children"]
                sizes[cid] = sum(size(k) for k in kids) if kids else 1
            return sizes[cid]

        clusters: dict[str, Cluster] = {}
        for cid, info in raw.items():
            node = info["node"]
            kids = info["children"]
            if kids:
                if "depth" not in node:
                    raise PictureError(f"proper cluster {cid} has no depth")
                depth = _as_fraction(node["depth"])
                tag = node.get("orbit")
                if tag is None:
                    if info["parent"] is not None:
                        raise PictureError(f"proper cluster {cid} has no orbit tag")
                    tag = f"orbit:{cid}"
            else:
                if "depth" in node:
                    raise PictureError(f"singleton {cid} carries a depth")
                depth = None
                tag = node.get("orbit")
            clusters[cid] = Cluster(cid, size(cid), depth, kids, str(tag) if tag is not None else "", info["parent"])

        _derive_leaf_orbits(clusters, root)
        pic = cls(clusters, root, _as_fraction(leading_val))
        pic.explicit = frozenset(explicit)
        return pic

    def to_tree(self, explicit_only: bool = False) -> dict[str, Any]:
        """Nested-dict form; ``explicit_only`` drops generated ids and derived tags."""

        def keep(cid: str, key: str) -> bool:
            return not explicit_only or (cid, key) in self.explicit

        def node(cid: str) -> dict[str, Any]:
            c = self._clusters[cid]
            out: dict[str, Any] = {}
            if keep(cid, "id"):
                out["id"] = cid
            if c.is_leaf:
                if keep(cid, "orbit"):
                    out["orbit"] = c.orbit_tag
                return out
            out["depth"] = str(c.depth)
            if keep(cid, "orbit"):
                out["orbit"] = c.orbit_tag
            out["children"] = [node(k) for k in c.children]
            return out

        return node(self.root_id)

    # basic access ------------------------------------------------------------

    def __getitem__(self, cid: str) -> Cluster:
        try:
            return self._clusters[cid]
        except KeyError:
            raise KeyError(f"unknown cluster id {cid!r}") from None

    def __contains__(self, cid: object) -> bool:
        return cid in self._clusters

    def __iter__(self) -> Iterator[Cluster]:
        return (self._clusters[c] for c in self._preorder(self.root_id))

    @property
    def root(self) -> Cluster:
        return self._clusters[self.root_id]

    @property
    def genus(self) -> int:
        return (self.root.size - 1) // 2

    def _preorder(self, cid: str) -> Iterator[str]:
        yield cid
        for k in self._clusters[cid].children:
            yield from self._preorder(k)

    def proper_clusters(self) -> list[Cluster]:
        return [c for c in self if c.is_proper]

    def leaves(self, cid: str | None = None) -> list[str]:
        return [k for k in self._preorder(cid or self.root_id) if self._clusters[k].is_leaf]

    def parent(self, cid: str) -> Cluster | None:
        p = self[cid].parent
        return None if p is None else self._clusters[p]

    def children(self, cid: str) -> list[Cluster]:
        return [self._clusters[k] for k in self[cid].children]

    def proper_children(self, cid: str) -> list[Cluster]:
        return [c for c in self.children(cid) if c.is_proper]

    def singleton_children(self, cid: str) -> list[Cluster]:
        return [c for c in self.children(cid) if c.is_leaf]

    def ancestors(self, cid: str) -> list[str]:
        out = []
        cur = self[cid].parent
        while cur is not None:
            out.append(cur)
            cur = self._clusters[cur].parent
        return out

    def depth(self, cid: str) -> Fraction:
        c = self[cid]
        if c.depth is None:
            raise PictureError(f"singleton {cid} has no depth")
        return c.depth

    def orbit_of(self, cid: str) -> Orbit:
        return self.orbits[self[cid].orbit_tag]

    def proper_orbits(self) -> list[Orbit]:
        return [o for o in self.orbits.values() if self._clusters[o.representative].is_proper]

    # relations ---------------------------------------------------------------

    def wedge(self, a: str, b: str) -> Cluster:
        up_a = [a, *self.ancestors(a)]
        seen = set(up_a)
        for c in [b, *self.ancestors(b)]:
            if c in seen:
                return self._clusters[c]
        raise PictureError("clusters share no ancestor")  # pragma: no cover

    def distance(self, a: str, b: str) -> Fraction:
        w = self.wedge(a, b)
        return self.depth(a) + self.depth(b) - 2 * self.depth(w.id)

    def rel_depth(self, cid: str) -> Fraction:
        p = self[cid].parent
        if p is None:
            raise PictureError("the top cluster has no relative depth")
        return self.depth(cid) - self.depth(p)

    # classification ------------------------------------------------------------

    def is_ubereven(self, cid: str) -> bool:
        c = self[cid]
        return c.is_proper and all(k.size % 2 == 0 for k in self.children(cid))

    def is_cotwin(self, cid: str) -> bool:
        c = self[cid]
        g = self.genus
        if not c.is_proper:
            return False
        for k in self.children(cid):
            if k.size == 2 * g:
                rest = [o for o in self.children(cid) if o.id != k.id]
                complement_is_twin = len(rest) == 1 and rest[0].size == 2
                if not complement_is_twin:
                    return True
        return False

    def is_principal(self, cid: str) -> bool:
        c = self[cid]
        if c.size < 3:
            return False
        if cid == self.root_id:
            if c.size % 2 == 0 and len(c.children) == 2:
                return False
            if any(k.size == 2 * self.genus for k in self.children(cid)):
                return False
        return True

    def classify(self, cid: str) -> frozenset[str]:
        c = self[cid]
        flags = {ODD if c.size % 2 else EVEN}
        if c.size == 2:
            flags.add(TWIN)
        if c.is_proper:
            flags.add(PROPER)
        if self.is_principal(cid):
            flags.add(PRINCIPAL)
        if self.is_ubereven(cid):
            flags.add(UBEREVEN)
        if self.is_cotwin(cid):
            flags.add(COTWIN)
        return frozenset(flags)

    def s_star(self, cid: str) -> Cluster:
        c = self[cid]
        if not c.is_proper:
            raise PictureError("s* is defined for proper clusters only")
        if self.is_cotwin(cid):
            for k in self.children(cid):
                if k.size == 2 * self.genus:
                    return k
        cur = c
        while cur.parent is not None:
            if not self.is_ubereven(cur.parent):
                return cur
            cur = self._clusters[cur.parent]
        return self.root

    def stable_children(self, cid: str) -> list[Cluster]:
        n = self.orbit_of(cid).size
        return [k for k in self.children(cid) if self.orbits[k.orbit_tag].size == n]

    def has_stable_child(self, cid: str) -> bool:
        return bool(self.stable_children(cid))

    def stable_singleton(self, cid: str) -> bool:
        return any(k.is_leaf for k in self.stable_children(cid))

    def child_orbits(self, tag: str) -> list[Orbit]:
        """Orbits whose members are children of members of orbit ``tag``."""
        seen: dict[str, None] = {}
        for m in self.orbits[tag].members:
            for k in self[m].children:
                seen.setdefault(self._clusters[k].orbit_tag, None)
        return [self.orbits[t] for t in seen]

    # validation ----------------------------------------------------------------

    def shape(self, cid: str) -> tuple:
        c = self[cid]
        if c.is_leaf:
            return ()
        return (c.size, c.depth, tuple(sorted(self.shape(k) for k in c.children)))

    def _check(self) -> None:
        root = self.root
        if root.size < 3:
            raise PictureError("the top cluster needs at least 3 roots")
        if not self.orbits[root.orbit_tag].size == 1:
            raise PictureError("the top cluster must be alone in its orbit")
        for c in self:
            if c.is_leaf:
                if c.children:
                    raise PictureError(f"singleton {c.id} has children")
                continue
            if len(c.children) < 2:
                raise PictureError(f"cluster {c.id} has fewer than two children")
            if c.size != sum(self._clusters[k].size for k in c.children):
                raise PictureError(f"cluster {c.id}: size differs from the sum of child sizes")
            for k in self.proper_children(c.id):
                if not k.depth > c.depth:
                    raise PictureError(f"child depth <= parent depth at {k.id} (under {c.id})")
        for orbit in self.orbits.values():
            reps = [self._clusters[m] for m in orbit.members]
            r0 = reps[0]
            if not r0.orbit_tag:
                raise PictureError(f"cluster {r0.id} has no orbit tag")
            shape0 = self.shape(r0.id)
            for r in reps[1:]:
                if r.size != r0.size or r.depth != r0.depth or self.shape(r.id) != shape0:
                    raise PictureError(
                        f"orbit {orbit.tag}: members {r0.id} and {r.id} have different subtrees"
                    )
            parent_tags = {self._clusters[r.parent].orbit_tag for r in reps if r.parent}
            if len(parent_tags) > 1:
                raise PictureError(f"orbit {orbit.tag}: members have parents in different orbits")
            if parent_tags:
                ptag = parent_tags.pop()
                porbit = self.orbits[ptag]
                per_parent = {p: 0 for p in porbit.members}
                for r in reps:
                    per_parent[r.parent] += 1
                if len(set(per_parent.values())) != 1 or 0 in per_parent.values():
                    raise PictureError(
                        f"orbit {orbit.tag}: not spread evenly over the members of parent orbit {ptag}"
                    )
        for orbit in self.proper_orbits():
            self._check_orbit_sizes(orbit)

    def _check_orbit_sizes(self, orbit: Orbit) -> None:
        """Child orbit sizes of a member: |X| (stable) or |X| times the depth denominator."""
        n = orbit.size
        rep = self._clusters[orbit.representative]
        b = (n * rep.depth).denominator
        stable = 0
        for child in self.child_orbits(orbit.tag):
            if child.size == n:
                stable += 1
            elif child.size != n * b:
                raise PictureError(
                    f"orbit sizes: child orbit {child.tag} of {orbit.tag} has size {child.size}, "
                    f"expected {n} or {n * b} (children of a cluster lie in orbits of size b)"
                )
        if b > 1 and stable > 1:
            raise PictureError(
                f"orbit sizes: {orbit.tag} has {stable} stable children but depth denominator {b} "
                "allows at most one"
            )


def _derive_leaf_orbits(clusters: dict[str, Cluster], root: str) -> None:
    """Fill in missing singleton orbit tags from the parent orbit structure."""
    by_tag: dict[str, list[str]] = {}

    def order(cid: str) -> Iterator[str]:
        yield cid
        for k in clusters[cid].children:
            yield from order(k)

    for cid in order(root):
        c = clusters[cid]
        if c.size >= 2:
            by_tag.setdefault(c.orbit_tag, []).append(cid)

    for tag, members in by_tag.items():
        n = len(members)
        rep = clusters[members[0]]
        b = (n * rep.depth).denominator
        untagged = [[k for k in clusters[m].children if clusters[k].size == 1 and not clusters[k].orbit_tag] for m in members]
        counts = {len(u) for u in untagged}
        if len(counts) != 1:
            raise PictureError(f"orbit {tag}: members have different numbers of singletons")
        count = counts.pop()
        group = 1 if b == 1 else b
        for j in range(0, count, group):
            chunk = range(j, min(j + group, count))
            if len(chunk) not in (group, 1):
                raise PictureError(
                    f"orbit sizes: {count} singletons under {tag} cannot form orbits of size {n * b} "
                    "plus at most one stable singleton"
                )
            new_tag = f"{tag}/r{j}"
            for u in untagged:
                for i in chunk:
                    leaf = clusters[u[i]]
                    clusters[u[i]] = Cluster(leaf.id, 1, None, (), new_tag, leaf.parent)


def lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out
