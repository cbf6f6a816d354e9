"""Input frontends: a JSON picture document and a factored-polynomial DSL.

DSL grammar (whitespace is ignored)::

    poly   := coeff? '*'? ( tower | factor ('*'? factor)* )
    factor := 'x' | '(' tower ')'
    tower  := atom ( '^' INT sign const )?
            | 'x' sign const                      # shift or degree-1 level
    atom   := 'x' | '(' tower ')'
    const  := term ( sign term )*
    term   := INT? 'p' ( '^' RAT )? | INT
    RAT    := INT ( '/' INT )? | '(' RAT ')' | '{' RAT '}'
    sign   := '-' | '+'

A tower ``(...((x - a)^n1 - c1)^n2 - ...)^nk - ck`` has roots indexed by
``(k1, ..., kk)`` with ``ki`` mod ``ni``.  Two roots first differing at level
``i`` are at distance ``q_i/n_i + sum_{j<i} (q_j/n_j - q_j)`` where ``q_j`` is
the valuation of ``c_j``.  Inertia adds ``q_i`` to ``k_i``.  The residue field
is taken to be algebraically closed, so units and signs never matter.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .cluster_model import ClusterPicture, PictureError

INF = None  # profile of a bare root


class DslError(ValueError):
    def __init__(self, message: str, offset: int | None = None) -> None:
        self.offset = offset
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


@dataclass
class Tower:
    shift: int = 0
    levels: list[tuple[int, Fraction]] = field(default_factory=list)

    def distances(self) -> list[Fraction]:
        out, acc = [], Fraction(0)
        for n, q in self.levels:
            out.append(Fraction(q, n) + acc)
            acc += Fraction(q, n) - q
        return out

    @property
    def profile(self) -> Fraction | None:
        return self.distances()[0] if self.levels else INF

    @property
    def degree(self) -> int:
        return math.prod(n for n, _ in self.levels) if self.levels else 1


@dataclass
class PolyExpr:
    leading_val: Fraction
    factors: list[Tower]
    text: str = ""


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    # low level
    def _skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, k: int = 0) -> str:
        self._skip()
        i = self.pos
        for _ in range(k):
            i += 1
            while i < len(self.text) and self.text[i].isspace():
                i += 1
        return self.text[i] if i < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            found = self.peek() or "end of input"
            raise DslError(f"expected {ch!r}, found {found!r}", self.pos)
        self.pos += 1

    def maybe(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def integer(self) -> int:
        self._skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            found = self.peek() or "end of input"
            raise DslError(f"expected an integer, found {found!r}", start)
        return int(self.text[start:self.pos])

    def rational(self) -> Fraction:
        for open_, close in (("(", ")"), ("{", "}")):
            if self.maybe(open_):
                val = self.rational()
                self.take(close)
                return val
        num = self.integer()
        if self.maybe("/"):
            den = self.integer()
            if den == 0:
                raise DslError("zero denominator", self.pos)
            return Fraction(num, den)
        return Fraction(num)

    def sign(self) -> int:
        if self.maybe("-"):
            return -1
        if self.maybe("+"):
            return 1
        found = self.peek() or "end of input"
        raise DslError(f"expected '-' or '+', found {found!r}", self.pos)

    # grammar
    def term(self) -> tuple[int, Fraction | None]:
        """Returns (integer part, p-exponent or None)."""
        self._skip()
        start = self.pos
        unit = self.integer() if self.peek().isdigit() else 1
        if self.maybe("p"):
            expo = self.rational() if self.maybe("^") else Fraction(1)
            if unit == 0:
                raise DslError("zero coefficient", start)
            return unit, expo
        if start == self.pos:
            found = self.peek() or "end of input"
            raise DslError(f"expected a constant, found {found!r}", self.pos)
        return unit, None

    def const(self) -> tuple[Fraction, bool]:
        """Valuation of a sum of terms (generic: the minimum) and whether it is a plain integer."""
        terms = [self.term()]
        while self.peek() in ("+", "-"):
            self.sign()
            terms.append(self.term())
        plain = all(e is None for _, e in terms)
        if plain:
            total = sum(u for u, _ in terms)
            return (Fraction(0) if total else None), True  # type: ignore[return-value]
        vals = [Fraction(0) if e is None else e for _, e in terms]
        return min(vals), False

    def atom(self) -> Tower:
        if self.maybe("x"):
            return Tower()
        if self.maybe("("):
            t = self.tower()
            self.take(")")
            return t
        found = self.peek() or "end of input"
        raise DslError(f"expected 'x' or '(', found {found!r}", self.pos)

    def tower(self) -> Tower:
        start = self.pos
        base = self.atom()
        if self.maybe("^"):
            n = self.integer()
            if n < 1:
                raise DslError("tower exponent must be positive", self.pos)
            self.sign()
            cpos = self.pos
            val, plain = self.const()
            if val is None:
                raise DslError("zero constant makes the polynomial non-squarefree", cpos)
            if val.denominator != 1:
                raise DslError("tower constants need an integral p-exponent", cpos)
            if not plain and val < 0:
                raise DslError("negative exponent", cpos)
            base.levels.append((n, val))
            self._check_generic(base, start)
            return base
        if self.peek() in ("-", "+"):
            if base.levels or base.shift:
                raise DslError("expected '^' after a tower", self.pos)
            sgn = self.sign()
            cpos = self.pos
            self._skip()
            save = self.pos
            val, plain = self.const()
            if plain:
                self.pos = save
                terms = [self.term()]
                while self.peek() in ("+", "-"):
                    terms.append((self.sign() * self.term()[0], None))
                base.shift = -sgn * sum(u for u, _ in terms)
                return base
            if val == 0:
                raise DslError("shifts mixing integers and p-terms are not supported", cpos)
            base.levels.append((1, val))
            return base
        return base

    def _check_generic(self, t: Tower, start: int) -> None:
        ds = t.distances()
        if any(b <= a for a, b in zip(ds, ds[1:])):
            raise DslError(
                "non-generic tower: each level must sit strictly deeper than the one below "
                f"(distances {', '.join(map(str, ds))})",
                start,
            )

    def poly(self) -> PolyExpr:
        lead = Fraction(0)
        if self.peek().isdigit() or self.peek() == "p":
            lead_val, plain = self.const_leading()
            lead = lead_val
            self.maybe("*")
        if not self.peek():
            raise DslError("expected a factor, found end of input", self.pos)
        factors: list[Tower] = []
        if self.peek() == "x" and self.peek(1) in ("^", "-", "+"):
            factors.append(self.tower())
        else:
            while True:
                if self.maybe("x"):
                    factors.append(Tower())
                else:
                    self.take("(")
                    factors.append(self.tower())
                    self.take(")")
                self.maybe("*")
                if not self.peek():
                    break
        if self.peek():
            raise DslError(f"unexpected {self.peek()!r}", self.pos)
        return PolyExpr(lead, factors, self.text)

    def const_leading(self) -> tuple[Fraction, bool]:
        unit, expo = self.term()
        return (expo if expo is not None else Fraction(0)), expo is None


def parse_dsl(text: str) -> PolyExpr:
    expr = _Parser(text).poly()
    _check_profiles(expr)
    return expr


def _check_profiles(expr: PolyExpr) -> None:
    by_shift: dict[int, list[Tower]] = {}
    for t in expr.factors:
        by_shift.setdefault(t.shift, []).append(t)
    for shift, towers in by_shift.items():
        profiles = [t.profile for t in towers]
        seen = set()
        for prof in profiles:
            key = "inf" if prof is INF else prof
            if key in seen:
                what = "repeated root" if prof is INF else f"repeated shift {shift} with valuation profile {prof}"
                raise DslError(f"non-squarefree or ambiguous input: {what}")
            seen.add(key)
    if len(expr.factors) > 1 and any(t.profile is not INF and t.profile <= 0 for t in expr.factors):
        raise DslError("non-generic: a tower with roots at unit distance needs to be the only factor")


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Root:
    factor: int
    index: tuple[int, ...]


def _roots(expr: PolyExpr) -> list[_Root]:
    out = []
    for f, t in enumerate(expr.factors):
        ranges = [range(n) for n, _ in t.levels]
        for idx in itertools.product(*ranges):
            out.append(_Root(f, tuple(idx)))
    return out


def _valuation(expr: PolyExpr, a: _Root, b: _Root) -> Fraction | None:
    if a == b:
        return None
    ta, tb = expr.factors[a.factor], expr.factors[b.factor]
    if a.factor == b.factor:
        ds = ta.distances()
        for i, (x, y) in enumerate(zip(a.index, b.index)):
            if x != y:
                return ds[i]
        raise AssertionError("distinct roots with equal indices")  # pragma: no cover
    if ta.shift != tb.shift:
        return Fraction(0)
    pa, pb = ta.profile, tb.profile
    if pa is INF:
        return pb
    if pb is INF:
        return pa
    return min(pa, pb)


def _sigma(expr: PolyExpr, r: _Root) -> _Root:
    t = expr.factors[r.factor]
    return _Root(r.factor, tuple((k + int(q)) % n for k, (n, q) in zip(r.index, t.levels)))


def picture_from_poly(expr: PolyExpr) -> ClusterPicture:
    roots = _roots(expr)
    if len(roots) < 3:
        raise DslError("need at least three roots (genus >= 1)")
    pos = {r: i for i, r in enumerate(roots)}
    val = [[_valuation(expr, a, b) for b in roots] for a in roots]
    perm = [pos[_sigma(expr, r)] for r in roots]
    return picture_from_roots(val, perm, expr.leading_val)


def rerooted_picture(expr: PolyExpr, which: int = 0) -> ClusterPicture:
    """Picture of the same curve after ``x -> 1/(x - r)`` for a K-rational root ``r``.

    ``which`` picks among the rational roots.  The point at infinity becomes a
    root when the degree is odd.  Distances transform as
    ``v(a'-b') = v(a-b) - v(a-r) - v(b-r)``.
    """
    roots = _roots(expr)
    fixed = [r for r in roots if _sigma(expr, r) == r]
    if not fixed:
        raise DslError("no K-rational root to move to infinity")
    r = fixed[which % len(fixed)]
    rest = [a for a in roots if a != r]
    to_r = {a: _valuation(expr, a, r) for a in rest}
    pos = {a: i for i, a in enumerate(rest)}
    val: list[list[Fraction | None]] = [
        [None if a == b else _valuation(expr, a, b) - to_r[a] - to_r[b] for b in rest] for a in rest
    ]
    perm = [pos[_sigma(expr, a)] for a in rest]
    if len(roots) % 2:
        for i, a in enumerate(rest):
            val[i].append(-to_r[a])
        val.append([-to_r[a] for a in rest] + [None])
        perm.append(len(rest))
    lead = Fraction(expr.leading_val) + sum(to_r.values(), Fraction(0))
    return picture_from_roots(val, perm, lead)


def picture_from_roots(
    val: list[list[Fraction | None]], perm: list[int], leading_val: Fraction
) -> ClusterPicture:
    """Cluster picture from pairwise root valuations and the inertia permutation."""
    roots = range(len(perm))

    def split(members: list[int]) -> tuple[Fraction, list[list[int]]]:
        depth = min(val[a][b] for a, b in itertools.combinations(members, 2))
        groups: list[list[int]] = []
        for m in members:
            for g in groups:
                if val[g[0]][m] > depth:
                    g.append(m)
                    break
            else:
                groups.append([m])
        return depth, groups

    clusters: dict[frozenset[int], Fraction] = {}
    tree: dict[frozenset[int], list[frozenset[int]]] = {}

    def build(members: list[int]) -> frozenset[int]:
        key = frozenset(members)
        if len(members) == 1:
            tree[key] = []
            return key
        depth, groups = split(members)
        clusters[key] = depth
        tree[key] = [build(g) for g in groups]
        return key

    top = build(list(range(len(roots))))

    def image(s: frozenset[int]) -> frozenset[int]:
        return frozenset(perm[i] for i in s)

    orbit_tag: dict[frozenset[int], str] = {}
    counter = itertools.count(1)
    order: list[frozenset[int]] = []

    def visit(s: frozenset[int]) -> None:
        order.append(s)
        for k in sorted(tree[s], key=lambda c: (-len(c), min(c))):
            visit(k)

    visit(top)
    for s in order:
        if s in orbit_tag:
            continue
        tag = "R" if s == top else (f"X{next(counter)}" if len(s) > 1 else f"L{next(counter)}")
        cur = s
        while cur not in orbit_tag:
            if cur not in tree:
                raise DslError("inertia does not preserve the cluster tree (non-generic input)")
            orbit_tag[cur] = tag
            cur = image(cur)

    names: dict[frozenset[int], str] = {}
    pc, lc = itertools.count(1), itertools.count(1)
    for s in order:
        names[s] = "R" if s == top else (f"s{next(pc)}" if len(s) > 1 else f"r{next(lc)}")

    def node(s: frozenset[int]) -> dict[str, Any]:
        out: dict[str, Any] = {"id": names[s], "orbit": orbit_tag[s]}
        if len(s) > 1:
            out["depth"] = clusters[s]
            out["children"] = [node(k) for k in sorted(tree[s], key=lambda c: (-len(c), min(c)))]
        return out

    return ClusterPicture.from_tree(node(top), leading_val)


def picture_from_dsl(text: str) -> ClusterPicture:
    return picture_from_poly(parse_dsl(text))


# JSON ------------------------------------------------------------------------


def read_json(doc: Any) -> ClusterPicture:
    """Read a picture document: ``{"leading_val": "a/b", "root": {...}}``."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise PictureError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "root" not in doc:
        raise PictureError("schema: expected an object with a 'root' cluster")
    unknown = set(doc) - {"root", "leading_val", "name", "comment"}
    if unknown:
        raise PictureError(f"schema: unknown top-level keys {sorted(unknown)}")
    _check_node(doc["root"], "root")
    return ClusterPicture.from_tree(doc["root"], doc.get("leading_val", 0))


def _check_node(node: Any, path: str) -> None:
    if not isinstance(node, dict):
        raise PictureError(f"schema: {path} must be an object")
    unknown = set(node) - {"id", "depth", "orbit", "children"}
    if unknown:
        raise PictureError(f"schema: unknown keys {sorted(unknown)} at {path}")
    for i, k in enumerate(node.get("children") or []):
        _check_node(k, f"{path}.children[{i}]")


def write_json(pic: ClusterPicture) -> dict[str, Any]:
    return {"leading_val": str(pic.leading_val), "root": pic.to_tree(explicit_only=True)}


def load_picture(text: str, fmt: str) -> ClusterPicture:
    if fmt == "dsl":
        return picture_from_dsl(text)
    if fmt == "json":
        return read_json(text)
    raise ValueError(f"unknown input format {fmt!r}")
