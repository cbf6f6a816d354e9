"""Independent model of nested pictures through the Newton polytope of y^2 - f(x).

Only pictures with one or two proper clusters (the top cluster and at most one
proper child) are handled.  The expansion is centred inside the innermost
cluster, so every root has a known valuation; the polytope then yields a
regular SNC model that is blown down to the minimal one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import chain_engine as ce
from .cluster_model import ClusterPicture, PictureError
from .fibre_graph import CENTRAL, CHAIN, TAIL_KIND, FibreGraph, blow_down

APEX = (0, 2)

Point = tuple[int, int]


def _lcm_denominators(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class Face:
    """Triangle spanned by the apex and a lower-hull segment of the baseline."""

    index: int
    left: int
    right: int
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    def v(self, p: tuple[int, int] | tuple[Fraction, Fraction]) -> Fraction:
        return self.alpha + self.beta * p[0] + self.gamma * p[1]

    def lattice_points(self) -> list[Point]:
        pts = [(x, 0) for x in range(self.left, self.right + 1)]
        lo, hi = math.ceil(Fraction(self.left, 2)), math.floor(Fraction(self.right, 2))
        pts += [(x, 1) for x in range(lo, hi + 1)]
        pts.append(APEX)
        return pts

    def interior_points(self) -> list[Point]:
        return [
            (x, 1)
            for x in range(math.floor(Fraction(self.left, 2)) + 1, math.ceil(Fraction(self.right, 2)))
        ]

    @property
    def multiplicity(self) -> int:
        return _lcm_denominators(self.v(p) for p in self.lattice_points())

    @property
    def genus(self) -> int:
        return sum(1 for p in self.interior_points() if self.v(p).denominator == 1)

    def centroid(self) -> tuple[Fraction, Fraction]:
        return (Fraction(self.left + self.right, 3), Fraction(2, 3))


@dataclass(frozen=True)
class Edge:
    name: str
    p: Point
    q: Point
    faces: tuple[int, ...]

    @property
    def outer(self) -> bool:
        return len(self.faces) == 1

    def lattice_points(self) -> list[Point]:
        dx, dy = self.q[0] - self.p[0], self.q[1] - self.p[1]
        g = math.gcd(dx, dy)
        return [(self.p[0] + k * dx // g, self.p[1] + k * dy // g) for k in range(g + 1)]


@dataclass
class NewtonPolytope:
    leading_val: Fraction
    baseline: dict[int, Fraction]
    hull: list[int]
    faces: list[Face]
    edges: list[Edge]


# building -----------------------------------------------------------------------------


def root_valuations(pic: ClusterPicture) -> list[Fraction | None]:
    """Valuations of the roots after centring inside the innermost cluster.

    ``None`` marks a root placed at the centre itself.
    """
    root = pic.root
    proper = pic.proper_children(root.id)
    if len(proper) > 1 or any(pic.proper_children(k.id) for k in proper):
        raise PictureError("the Newton oracle needs a nested picture with at most two proper clusters")
    inner = proper[0] if proper else root
    d_in = pic.depth(inner.id)
    vals: list[Fraction | None] = [pic.depth(root.id)] * (root.size - inner.size)
    ins = [d_in] * inner.size
    b = d_in.denominator
    if b > 1 and inner.size % b == 1:
        ins[0] = None
    return ins + vals


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[int]:
    hull: list[tuple[int, Fraction]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless the turn is strictly convex
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return [x for x, _ in hull]


def polytope_from_valuations(leading_val: Fraction, vals: list[Fraction | None]) -> NewtonPolytope:
    n = len(vals)
    finite = sorted(v for v in vals if v is not None)
    at_centre = n - len(finite)
    baseline: dict[int, Fraction] = {}
    for i in range(n + 1):
        # a_i is, up to a unit, the product of the n - i smallest root terms
        k = n - i
        if k > len(finite) and at_centre:
            continue
        baseline[i] = Fraction(leading_val) + sum(finite[:k], Fraction(0))
    pts = sorted(baseline.items())
    hull = _lower_hull(pts)
    faces = []
    for j, (a, b) in enumerate(zip(hull, hull[1:])):
        beta = (baseline[b] - baseline[a]) / (b - a)
        alpha = baseline[a] - beta * a
        faces.append(Face(j, a, b, alpha, beta, -alpha / 2))
    edges = [Edge(f"y=0[{f.left},{f.right}]", (f.left, 0), (f.right, 0), (f.index,)) for f in faces]
    m = len(faces)
    for j, x in enumerate(hull):
        adj = tuple(i for i in (j - 1, j) if 0 <= i < m)
        edges.append(Edge(f"apex-{x}", APEX, (x, 0), adj))
    return NewtonPolytope(Fraction(leading_val), baseline, hull, faces, edges)


def polytope_from_nested(pic: ClusterPicture) -> NewtonPolytope:
    return polytope_from_valuations(pic.leading_val, root_valuations(pic))


# faces and edges ----------------------------------------------------------------------


@dataclass(frozen=True)
class FaceData:
    index: int
    multiplicity: int
    genus: int


def face_data(poly: NewtonPolytope) -> list[FaceData]:
    return [FaceData(f.index, f.multiplicity, f.genus) for f in poly.faces]


@dataclass(frozen=True)
class EdgeData:
    edge: Edge
    s1: Fraction
    s2: Fraction
    delta: int
    chains: int


def edge_slopes(poly: NewtonPolytope, edge: Edge) -> EdgeData:
    f1 = poly.faces[edge.faces[0]]
    pts = edge.lattice_points()
    delta = _lcm_denominators(f1.v(p) for p in pts)
    integral = sum(1 for p in pts if f1.v(p).denominator == 1)
    ux, uy = pts[1][0] - pts[0][0], pts[1][1] - pts[0][1]
    p0 = pts[0]

    def lstar(p) -> Fraction:
        return uy * (p[0] - p0[0]) - ux * (p[1] - p0[1])

    sign = 1 if lstar(f1.centroid()) > 0 else -1
    # solve sign * (uy*a - ux*b) = 1
    g, a, b = _ext_gcd(uy, -ux)
    assert g == 1
    p1 = (p0[0] + sign * a, p0[1] + sign * b)
    assert sign * lstar(p1) == 1
    s1 = delta * (f1.v(p1) - f1.v(p0))
    if edge.outer:
        s2 = Fraction(math.floor(s1 - 1))
    else:
        f2 = poly.faces[edge.faces[1]]
        s2 = delta * (f2.v(p1) - f2.v(p0))
    return EdgeData(edge, s1, s2, delta, integral - 1)


# the model ----------------------------------------------------------------------------


def model_from_polytope(poly: NewtonPolytope, minimal: bool = True) -> FibreGraph:
    g = FibreGraph()
    ids = [g.add_component(f.multiplicity, f.genus, CENTRAL, f"F{f.index}") for f in poly.faces]
    for edge in poly.edges:
        data = edge_slopes(poly, edge)
        if data.chains <= 0:
            continue
        if not data.s1 > data.s2:
            raise PictureError(f"edge {edge.name}: slopes {data.s1} <= {data.s2}")
        exp = ce.reduced_sequence(data.s1, data.s2)
        mults = [data.delta * d for d in exp.denominators]
        start = ids[edge.faces[0]]
        end = ids[edge.faces[1]] if not edge.outer else None
        if end is None and not mults:
            continue
        kind = TAIL_KIND if end is None else CHAIN
        for _ in range(data.chains):
            g.add_chain(start, end, mults, kind, edge.name)
    return blow_down(g) if minimal else g


def newton_model(pic: ClusterPicture, minimal: bool = True) -> FibreGraph:
    return model_from_polytope(polytope_from_nested(pic), minimal)
