"""Hirzebruch-Jung expansions, determinant-1 Farey chains and sloped chains.

A chain between two slopes ``top > bottom`` is the unique minimal sequence of
fractions ``top = m0/d0 > m1/d1 > ... > bottom`` with ``m_i d_{i+1} -
m_{i+1} d_i = 1``.  Interior entries become rational curves whose
multiplicities are ``mu`` times their denominators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

TAIL = "tail"
LINK = "link"
LOOP = "loop"
CROSSED_TAIL = "crossed_tail"
CHAIN_KINDS = (TAIL, LINK, LOOP, CROSSED_TAIL)


@dataclass(frozen=True)
class SlopedChainSpec:
    """One chain before expansion.  ``top`` and ``bottom`` are already mu-scaled."""

    top: Fraction
    bottom: Fraction
    mu: int
    kind: str = LINK

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", Fraction(self.top))
        object.__setattr__(self, "bottom", Fraction(self.bottom))
        if self.kind not in CHAIN_KINDS:
            raise ValueError(f"unknown chain kind {self.kind!r}")
        if self.mu < 1:
            raise ValueError("mu must be a positive integer")
        if not self.top > self.bottom:
            raise ValueError(f"chain needs top > bottom, got {self.top} <= {self.bottom}")

    @classmethod
    def tail(cls, t1: Fraction, mu: int) -> "SlopedChainSpec":
        """Tail with unscaled slope ``t1``; the far end is ``floor(mu*t1 - 1)``."""
        top = Fraction(t1) * mu
        return cls(top, Fraction(math.floor(top - 1)), mu, TAIL)


@dataclass
class ChainExpansion:
    fractions: list[Fraction]
    multiplicities: list[int]
    sections: dict[str, range] = field(default_factory=dict)

    @property
    def denominators(self) -> list[int]:
        return [f.denominator for f in self.fractions[1:-1]]

    @property
    def interior(self) -> list[Fraction]:
        return self.fractions[1:-1]

    def __len__(self) -> int:
        return len(self.multiplicities)


def hj_expand(m: int, r: int) -> list[int]:
    """Hirzebruch-Jung continued fraction ``m/r = b1 - 1/(b2 - ...)``."""
    if not (m > 1 and 0 < r < m and math.gcd(m, r) == 1):
        raise ValueError(f"hj_expand needs m > 1, 0 < r < m, gcd = 1; got ({m}, {r})")
    out = []
    while r:
        b = -(-m // r)
        out.append(b)
        m, r = r, b * r - m
    return out


def hj_value(coeffs: Iterable[int]) -> Fraction:
    coeffs = list(coeffs)
    val = Fraction(coeffs[-1])
    for b in reversed(coeffs[:-1]):
        val = b - 1 / val
    return val


def _det(a: Fraction, b: Fraction) -> int:
    return a.numerator * b.denominator - b.numerator * a.denominator


def _descend(start: Fraction, stop: Fraction) -> list[Fraction]:
    """Left-parent chain from ``start`` down to ``stop`` (both included).

    The denominators come from the HJ expansion of ``d / d1`` where ``d1`` is
    the denominator of the left Farey parent of ``start``.
    """
    out = [start]
    d = start.denominator
    if start == stop:
        return out
    if d == 1:
        if start != stop:
            raise ValueError("descent target not on the parent chain")
        return out
    m = start.numerator
    d1 = pow(m % d, -1, d)
    denoms = [d, d1]
    for b in hj_expand(d, d1):
        nxt = b * denoms[-1] - denoms[-2]
        if nxt <= 0:
            break
        denoms.append(nxt)
    cur = start
    for dn in denoms[1:]:
        # m d' - m' d = 1
        num = (cur.numerator * dn - 1) // cur.denominator
        cur = Fraction(num, dn)
        out.append(cur)
        if cur == stop:
            return out
    raise ValueError(f"{stop} not reached descending from {start}")


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction of least denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    n = math.ceil(lo)
    if n <= hi:
        # pick the integer nearest zero, denominators all equal 1
        if lo <= 0 <= hi:
            return Fraction(0)
        return Fraction(n) if n > 0 else Fraction(math.floor(hi))
    fl = math.floor(lo)
    inner = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def _sections(fracs: list[Fraction]) -> dict[str, range]:
    interior = fracs[1:-1]
    level = [i for i, f in enumerate(interior) if f.denominator == 1]
    if level:
        lo, hi = level[0], level[-1] + 1
    else:
        # turning point (least denominator) closes the downhill part
        if interior:
            k = min(range(len(interior)), key=lambda i: interior[i].denominator)
            if interior[k].denominator < fracs[0].denominator:
                lo = hi = k + 1
            else:
                lo = hi = 0
        else:
            lo = hi = 0
    return {
        "downhill": range(0, lo),
        "level": range(lo, hi),
        "uphill": range(hi, len(interior)),
    }


def _expansion(fracs: list[Fraction], mu: int = 1) -> ChainExpansion:
    return ChainExpansion(
        fractions=fracs,
        multiplicities=[mu * f.denominator for f in fracs[1:-1]],
        sections=_sections(fracs),
    )


def reduced_fractions(top: Fraction, bottom: Fraction) -> list[Fraction]:
    top, bottom = Fraction(top), Fraction(bottom)
    if not top > bottom:
        raise ValueError(f"need top > bottom, got {top}, {bottom}")
    lo_int, hi_int = math.ceil(bottom), math.floor(top)
    if lo_int <= hi_int:
        down = _descend(top, Fraction(hi_int))
        mid = [Fraction(k) for k in range(hi_int - 1, lo_int - 1, -1)]
        up = [-f for f in reversed(_descend(-bottom, Fraction(-lo_int)))]
        return down + mid + up[1:]
    q = simplest_between(bottom, top)
    down = _descend(top, q)
    up = [-f for f in reversed(_descend(-bottom, -q))]
    return down + up[1:]


def reduced_sequence(top: Fraction, bottom: Fraction) -> ChainExpansion:
    """Minimal determinant-1 chain from ``top`` down to ``bottom`` (mu = 1)."""
    return _expansion(reduced_fractions(top, bottom))


def expand_chain(spec: SlopedChainSpec) -> ChainExpansion:
    exp = _expansion(reduced_fractions(spec.top, spec.bottom), spec.mu)
    if spec.kind == TAIL and len(exp.sections["uphill"]):
        raise AssertionError("tail expansion with an uphill section")
    return exp


def _farey_successor(a: int, b: int, n: int) -> tuple[int, int]:
    """The term after ``a/b`` in the Farey sequence of order ``n``."""
    d0 = 0 if b == 1 else (-pow(a, -1, b)) % b
    d = d0 + b * ((n - d0) // b)
    return (1 + a * d) // b, d


def _farey_pairs(top: Fraction, bottom: Fraction, bound: int) -> list[tuple[int, int]]:
    """Reduced ``(numerator, denominator)`` pairs in [bottom, top], ascending."""
    lo = bottom
    if bottom.denominator > bound:
        lo = min(Fraction(math.ceil(bottom * d), d) for d in range(1, bound + 1))
    if lo > top:
        return []
    a, b = lo.numerator, lo.denominator
    out = [(a, b)]
    c, d = _farey_successor(a, b, bound)
    while c * top.denominator <= top.numerator * d:
        out.append((c, d))
        k = (bound + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return out


def farey_between(top: Fraction, bottom: Fraction, bound: int) -> list[Fraction]:
    """All fractions in [bottom, top] with denominator <= bound, descending."""
    top, bottom = Fraction(top), Fraction(bottom)
    return [Fraction(n, d) for n, d in reversed(_farey_pairs(top, bottom, bound))]


def brute_force_reduce(top: Fraction, bottom: Fraction, denom_bound: int | None = None) -> ChainExpansion:
    """Oracle: full Farey list, then remove mediant terms until none remain."""
    top, bottom = Fraction(top), Fraction(bottom)
    bound = denom_bound or max(top.denominator, bottom.denominator)
    if bound < max(top.denominator, bottom.denominator):
        raise ValueError("denominator bound below endpoint denominators")
    # one left-to-right pass reaches the fixpoint: removing a mediant only
    # creates a new candidate triple at the current end of the stack
    seq: list[tuple[int, int]] = []
    for c in reversed(_farey_pairs(top, bottom, bound)):
        while len(seq) >= 2 and seq[-1] == (seq[-2][0] + c[0], seq[-2][1] + c[1]):
            seq.pop()
        seq.append(c)
    return _expansion([Fraction(n, d) for n, d in seq])


def is_determinant_one(fracs: list[Fraction]) -> bool:
    return all(_det(a, b) == 1 for a, b in zip(fracs, fracs[1:]))


def _is_mediant(a: Fraction, b: Fraction, c: Fraction) -> bool:
    return b.numerator == a.numerator + c.numerator and b.denominator == a.denominator + c.denominator


def is_minimal(fracs: list[Fraction]) -> bool:
    return not any(_is_mediant(a, b, c) for a, b, c in zip(fracs, fracs[1:], fracs[2:]))


def self_intersections(fracs: list[Fraction]) -> list[int]:
    """Self-intersections of the interior curves: -(d_{i-1} + d_{i+1}) / d_i."""
    ds = [f.denominator for f in fracs]
    out = []
    for i in range(1, len(ds) - 1):
        s = Fraction(-(ds[i - 1] + ds[i + 1]), ds[i])
        out.append(int(s))
    return out


def small_distance_merge(s1: Fraction, s2: Fraction) -> list[Fraction] | None:
    """Rebuild the chain from ``s1`` down to ``s2`` out of two tails.

    Needs ``0 < s2 < s1 < 1``.  With ``m/d`` the simplest fraction in
    ``[s2, s1]``, the chain is the tail from ``s1`` cut at ``m/d``, then the
    tail from ``1 - s2`` cut at ``1 - m/d``, mirrored back.  Returns None when
    the interval contains an integer (non-empty level section).
    """
    s1, s2 = Fraction(s1), Fraction(s2)
    if math.ceil(s2) <= math.floor(s1):
        return None
    q = simplest_between(s2, s1)
    t1 = reduced_fractions(s1, Fraction(math.floor(s1 - 1)))
    t2 = reduced_fractions(1 - s2, Fraction(math.floor(-s2)))
    if q not in t1 or (1 - q) not in t2:
        raise AssertionError("turning point missing from a tail")
    head = t1[: t1.index(q) + 1]
    tail = [1 - f for f in t2[: t2.index(1 - q) + 1]]
    return head + list(reversed(tail))[1:]
