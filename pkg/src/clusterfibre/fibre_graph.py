"""Dual graphs of special fibres: construction, intersection checks,
canonical forms and rendering."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Iterable

CENTRAL = "central"
CHAIN = "chain"
TAIL_KIND = "tail"
CROSS = "cross"
COMPONENT_KINDS = (CENTRAL, CHAIN, TAIL_KIND, CROSS)


class IntegralityError(ValueError):
    """A self-intersection came out non-integral."""


@dataclass
class FibreComponent:
    id: int
    multiplicity: int
    genus: int = 0
    kind: str = CENTRAL
    provenance: str = ""
    self_intersection: int | None = None


@dataclass
class FibreGraph:
    components: list[FibreComponent] = field(default_factory=list)
    edges: list[tuple[int, int]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    # building ---------------------------------------------------------------

    def add_component(self, multiplicity: int, genus: int = 0, kind: str = CENTRAL, provenance: str = "") -> int:
        if multiplicity < 1:
            raise ValueError(f"multiplicity must be positive, got {multiplicity}")
        if kind not in COMPONENT_KINDS:
            raise ValueError(f"unknown component kind {kind!r}")
        cid = len(self.components)
        self.components.append(FibreComponent(cid, int(multiplicity), int(genus), kind, provenance))
        return cid

    def add_edge(self, a: int, b: int) -> None:
        self.edges.append((min(a, b), max(a, b)))

    def add_chain(
        self,
        start: int,
        end: int | None,
        multiplicities: Iterable[int],
        kind: str = CHAIN,
        provenance: str = "",
        crosses: Iterable[int] = (),
        chain_kind: str | None = None,
    ) -> list[int]:
        """Attach a chain to ``start``; ``end`` None makes a tail.

        An empty chain between two components is a direct intersection.
        Crosses meet the far end of the chain.
        """
        ids = [self.add_component(m, 0, kind, provenance) for m in multiplicities]
        prev = start
        for c in ids:
            self.add_edge(prev, c)
            prev = c
        if end is not None:
            self.add_edge(prev, end)
        cross_ids = []
        for m in crosses:
            x = self.add_component(m, 0, CROSS, provenance)
            self.add_edge(prev, x)
            cross_ids.append(x)
        self.metadata.setdefault("chains", []).append(
            {
                "kind": chain_kind or (kind if end is None else "link"),
                "from": start,
                "to": end,
                "components": ids,
                "crosses": cross_ids,
                "provenance": provenance,
            }
        )
        return ids

    # queries ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.components)

    def component(self, cid: int) -> FibreComponent:
        return self.components[cid]

    def intersection_counts(self) -> tuple[dict[tuple[int, int], int], Counter]:
        pair: dict[tuple[int, int], int] = Counter()
        loops: Counter = Counter()
        for a, b in self.edges:
            if a == b:
                loops[a] += 1
            else:
                pair[(a, b)] += 1
                pair[(b, a)] += 1
        return pair, loops

    def neighbours(self, cid: int) -> Counter:
        out: Counter = Counter()
        for a, b in self.edges:
            if a == cid and b != cid:
                out[b] += 1
            elif b == cid and a != cid:
                out[a] += 1
        return out

    def branch_count(self, cid: int) -> int:
        """Number of intersection points counted on ``cid`` (a node counts twice)."""
        return sum(2 if a == b == cid else 1 for a, b in self.edges if cid in (a, b))

    def is_connected(self) -> bool:
        if not self.components:
            return False
        adj: dict[int, set[int]] = {c.id: set() for c in self.components}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.components)

    def copy(self) -> "FibreGraph":
        return from_json(to_json(self))


# intersection theory ---------------------------------------------------------


def _self_intersection_values(g: FibreGraph) -> dict[int, Fraction]:
    pair, loops = g.intersection_counts()
    total: Counter = Counter()
    for (a, b), n in pair.items():
        total[a] += n * g.components[b].multiplicity
    out = {}
    for c in g.components:
        m = c.multiplicity
        out[c.id] = Fraction(-(total[c.id] + 2 * m * loops[c.id]), m)
    return out


def derive_self_intersections(g: FibreGraph) -> FibreGraph:
    """Copy of ``g`` with each E_i^2 fixed by E_i . (whole fibre) = 0."""
    vals = _self_intersection_values(g)
    bad = [cid for cid, v in vals.items() if v.denominator != 1]
    if bad:
        raise IntegralityError(
            "non-integral self-intersection at "
            + ", ".join(f"{cid} ({vals[cid]})" for cid in bad)
        )
    out = g.copy()
    for c in out.components:
        c.self_intersection = int(vals[c.id])
    return out


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str]
    self_intersections: dict[int, Fraction]

    def __bool__(self) -> bool:
        return self.ok


def validate(g: FibreGraph) -> ValidationReport:
    problems: list[str] = []
    if not g.is_connected():
        problems.append("graph is not connected")
    vals = _self_intersection_values(g)
    for cid, v in vals.items():
        if v.denominator != 1:
            problems.append(f"non-integral self-intersection {v} at {cid}")
    single = len(g.components) == 1
    for c in g.components:
        v = vals[c.id]
        if v.denominator != 1:
            continue
        if c.kind != CENTRAL and v > -2:
            problems.append(f"non-minimal chain at {c.id}: self-intersection {v}")
        if c.genus > 0 and c.kind != CENTRAL:
            problems.append(f"non-central component {c.id} has positive genus")
        if v > -1 and not single:
            problems.append(f"self-intersection {v} > -1 at {c.id}")
        if c.genus == 0 and v == -1 and g.branch_count(c.id) < 3:
            problems.append(
                f"exceptional curve at {c.id}: genus 0, self-intersection -1, "
                f"{g.branch_count(c.id)} branches"
            )
    return ValidationReport(not problems, problems, vals)


def betti_genus_check(g: FibreGraph, expected_genus: int) -> bool:
    if any(c.multiplicity != 1 for c in g.components):
        raise ValueError("betti_genus_check needs a reduced fibre")
    b1 = len(g.edges) - len(g.components) + 1
    return sum(c.genus for c in g.components) + b1 == expected_genus


def blow_down(g: FibreGraph) -> FibreGraph:
    """Contract exceptional genus-0 curves meeting the rest in at most two points.

    A curve meeting a single component twice becomes a node (self-edge) on it.
    """
    cur = g.copy()
    while True:
        vals = _self_intersection_values(cur)
        target = None
        for c in cur.components:
            if c.genus or vals[c.id] != -1:
                continue
            if any(a == b == c.id for a, b in cur.edges):
                continue
            nb = cur.neighbours(c.id)
            if sum(nb.values()) <= 2 and len(cur.components) > 1:
                target = (c.id, nb)
                break
        if target is None:
            return cur
        cid, nb = target
        ends = [v for v, k in nb.items() for _ in range(k)]
        keep = [e for e in cur.edges if cid not in e]
        if len(ends) == 2:
            keep.append((min(ends), max(ends)))
        cur = _drop_component(FibreGraph(cur.components, keep, cur.metadata), cid)


def _drop_component(g: FibreGraph, cid: int) -> FibreGraph:
    remap = {}
    comps = []
    for c in g.components:
        if c.id == cid:
            continue
        remap[c.id] = len(comps)
        comps.append(FibreComponent(len(comps), c.multiplicity, c.genus, c.kind, c.provenance))
    edges = [(remap[a], remap[b]) for a, b in g.edges]
    meta = {k: v for k, v in g.metadata.items() if k != "chains"}
    return FibreGraph(comps, [(min(e), max(e)) for e in edges], meta)


# canonical form ----------------------------------------------------------------


class _Canon:
    """Individualisation-refinement search for the least certificate.

    Vertex colours are (multiplicity, genus, number of nodes).  Branches that
    are images of explored ones under automorphisms already found (fixing the
    current path) are skipped.
    """

    def __init__(self, g: FibreGraph) -> None:
        self.n = len(g.components)
        pair, loops = g.intersection_counts()
        self.adj = [[0] * self.n for _ in range(self.n)]
        for (a, b), k in pair.items():
            self.adj[a][b] = k
        self.colour = [(c.multiplicity, c.genus, loops[c.id]) for c in g.components]
        self.best: tuple | None = None
        self.first_cert: tuple | None = None
        self.first_path: list[int] = []
        self.generators: list[list[int]] = []

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        while True:
            index = {v: i for i, cell in enumerate(cells) for v in cell}
            new: list[list[int]] = []
            for cell in cells:
                if len(cell) == 1:
                    new.append(cell)
                    continue
                sig = {}
                for v in cell:
                    row = self.adj[v]
                    counts = Counter()
                    for w in range(self.n):
                        if row[w]:
                            counts[index[w]] += row[w]
                    sig[v] = tuple(sorted(counts.items()))
                groups: dict[tuple, list[int]] = {}
                for v in cell:
                    groups.setdefault(sig[v], []).append(v)
                for key in sorted(groups):
                    new.append(groups[key])
            if len(new) == len(cells):
                return new
            cells = new

    def certificate(self, order: list[int]) -> tuple:
        pos = {v: i for i, v in enumerate(order)}
        verts = tuple(self.colour[v] for v in order)
        edges = tuple(
            sorted(
                (pos[a], pos[b], self.adj[a][b])
                for a in range(self.n)
                for b in range(a + 1, self.n)
                if self.adj[a][b]
            )
        )
        edges = tuple(sorted((min(i, j), max(i, j), k) for i, j, k in edges))
        return verts, edges

    def orbit_reps(self, cell: list[int], path: list[int]) -> list[int]:
        gens = [p for p in self.generators if all(p[v] == v for v in path)]
        parent = {v: v for v in range(self.n)}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p in gens:
            for v in range(self.n):
                a, b = find(v), find(p[v])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return [find(v) for v in cell]

    def search(self, cells: list[list[int]], path: list[int]) -> int | None:
        cells = self.refine(cells)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            order = [c[0] for c in cells]
            cert = self.certificate(order)
            if self.first_cert is None:
                self.first_cert, self.first_order, self.first_path = cert, order, list(path)
                self.best, self.best_order = cert, order
                return None
            if cert == self.first_cert:
                perm = [0] * self.n
                for a, b in zip(self.first_order, order):
                    perm[a] = b
                self.generators.append(perm)
                common = 0
                for a, b in zip(path, self.first_path):
                    if a != b:
                        break
                    common += 1
                return common
            if cert < self.best:
                self.best, self.best_order = cert, order
            return None
        cell = cells[target]
        explored: list[int] = []
        level = len(path)
        for v in sorted(cell):
            if explored:
                root_of = dict(zip(cell, self.orbit_reps(cell, path)))
                if any(root_of[v] == root_of[u] for u in explored):
                    continue
            explored.append(v)
            rest = [w for w in cell if w != v]
            new_cells = cells[:target] + [[v], rest] + cells[target + 1:]
            jump = self.search(new_cells, path + [v])
            if jump is not None and jump < level:
                return jump
        return None

    def run(self) -> tuple:
        groups: dict[tuple, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(self.colour[v], []).append(v)
        cells = [groups[k] for k in sorted(groups)]
        self.search(cells, [])
        assert self.best is not None
        return self.best


def canonical_certificate(g: FibreGraph) -> tuple:
    return _Canon(g).run()


def canonical_form(g: FibreGraph) -> str:
    """Relabelling-invariant string; equal strings mean isomorphic fibres."""
    if not g.components:
        return "V:|E:"
    verts, edges = canonical_certificate(g)
    vs = ";".join(f"m{m}g{gen}" + (f"n{loops}" if loops else "") for m, gen, loops in verts)
    es = ";".join(f"{a}-{b}" + (f"x{k}" if k > 1 else "") for a, b, k in edges)
    return f"V:{vs}|E:{es}"


def isomorphic(a: FibreGraph, b: FibreGraph) -> bool:
    return canonical_form(a) == canonical_form(b)


# serialisation and rendering ---------------------------------------------------


def to_json(g: FibreGraph) -> dict[str, Any]:
    return {
        "components": [asdict(c) for c in g.components],
        "edges": [list(e) for e in g.edges],
        "metadata": json.loads(json.dumps(g.metadata, default=str)),
    }


def from_json(doc: Any) -> FibreGraph:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    try:
        comps = []
        for i, c in enumerate(doc["components"]):
            comp = FibreComponent(
                id=int(c.get("id", i)),
                multiplicity=int(c["multiplicity"]),
                genus=int(c.get("genus", 0)),
                kind=c.get("kind", CENTRAL),
                provenance=c.get("provenance", ""),
                self_intersection=c.get("self_intersection"),
            )
            if comp.id != i:
                raise ValueError("component ids must be 0..n-1 in order")
            if comp.multiplicity < 1 or comp.genus < 0:
                raise ValueError(f"bad multiplicity or genus at component {i}")
            comps.append(comp)
        edges = []
        for e in doc.get("edges", []):
            a, b = int(e[0]), int(e[1])
            if not (0 <= a < len(comps) and 0 <= b < len(comps)):
                raise ValueError(f"edge {e} refers to a missing component")
            edges.append((min(a, b), max(a, b)))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed fibre graph document: {exc}") from exc
    return FibreGraph(comps, edges, dict(doc.get("metadata", {})))


def from_description(desc: dict[str, Any]) -> FibreGraph:
    """Build a fibre from a figure transcription.

    ``{"centrals": {name: [mult, genus]}, "chains": [{"from", "to"?, "mults",
    "crosses"?, "count"?}]}``.  A chain without ``to`` is a tail; ``to`` equal
    to ``from`` is a loop.
    """
    g = FibreGraph()
    names = {}
    for name, (mult, genus) in desc["centrals"].items():
        names[name] = g.add_component(mult, genus, CENTRAL, name)
    for ch in desc.get("chains", []):
        for _ in range(ch.get("count", 1)):
            end = names[ch["to"]] if ch.get("to") is not None else None
            kind = CHAIN if end is not None else TAIL_KIND
            g.add_chain(names[ch["from"]], end, ch.get("mults", []), kind, ch.get("name", ""), ch.get("crosses", []))
    for name in desc.get("nodes", []):
        g.add_edge(names[name], names[name])
    return g


def render_dot(g: FibreGraph, name: str = "fibre") -> str:
    lines = [f"graph {name} {{", "  node [shape=box];"]
    for c in g.components:
        label = f"m{c.multiplicity} g{c.genus}"
        style = ', style=bold' if c.kind == CENTRAL else ""
        lines.append(f'  n{c.id} [label="{label}"{style}];')
    for a, b in g.edges:
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_ascii(g: FibreGraph) -> str:
    """Central components with their chains, in the spirit of hand-drawn fibres."""
    chains = g.metadata.get("chains")
    central = [c for c in g.components if c.kind == CENTRAL]
    if not chains:
        out = []
        for c in g.components:
            nb = ", ".join(f"[{n}]x{k}" if k > 1 else f"[{n}]" for n, k in sorted(g.neighbours(c.id).items()))
            out.append(f"[{c.id}] m{c.multiplicity} g{c.genus} {c.kind}" + (f" -- {nb}" if nb else ""))
        return "\n".join(out) + "\n"
    lines = []
    for c in central:
        head = f"[{c.id}] {c.provenance or 'central'}: multiplicity {c.multiplicity}, genus {c.genus}"
        lines.append(head)
        loops = sum(1 for a, b in g.edges if a == b == c.id)
        if loops:
            lines.append(f"    node x{loops}")
        for ch in chains:
            if ch["from"] != c.id:
                continue
            mults = "-".join(str(g.components[i].multiplicity) for i in ch["components"]) or "(direct)"
            if ch["to"] is None:
                desc = f"{ch['kind']}: {mults}"
                if ch["crosses"]:
                    crosses = ",".join(str(g.components[i].multiplicity) for i in ch["crosses"])
                    desc += f" < crosses {crosses}"
            elif ch["to"] == c.id:
                desc = f"loop: {mults}"
            else:
                desc = f"link -> [{ch['to']}]: {mults}"
            tag = f" ({ch['provenance']})" if ch.get("provenance") else ""
            lines.append(f"    |- {desc}{tag}")
    return "\n".join(lines) + "\n"
