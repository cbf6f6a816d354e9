from __future__ import annotations

import math
import random
from fractions import Fraction as F

import pytest

from clusterfibre import chain_engine as ce


@pytest.mark.parametrize("m,r,expected", [(2, 1, [2]), (12, 5, [3, 2, 3]), (4, 1, [4]), (7, 3, [3, 2, 2])])
def test_hj_expand(m, r, expected):
    out = ce.hj_expand(m, r)
    assert out == expected
    assert ce.hj_value(out) == F(m, r)


@pytest.mark.parametrize("m,r", [(1, 1), (4, 2), (5, 0), (5, 5)])
def test_hj_expand_preconditions(m, r):
    with pytest.raises(ValueError):
        ce.hj_expand(m, r)


def test_reduced_sequence_two_orbit_link():
    exp = ce.reduced_sequence(F(-2, 3), F(-11, 4))
    assert exp.interior == [F(-1), F(-2), F(-5, 2), F(-8, 3)]
    assert exp.denominators == [1, 1, 2, 3]


def test_reduced_sequence_examples():
    assert ce.reduced_sequence(F(3, 4), F(-1)).interior == [F(2, 3), F(1, 2), F(0)]
    assert ce.reduced_sequence(F(1, 2), F(-1, 2)).interior == [F(0)]
    assert ce.reduced_sequence(F(1), F(0)).interior == []


def test_expand_chain_examples():
    assert ce.expand_chain(ce.SlopedChainSpec.tail(F(-1, 2), 3)).multiplicities == [3]
    link = ce.SlopedChainSpec(F(-3, 2), F(-15, 2), 3)
    assert ce.expand_chain(link).multiplicities == [3] * 6
    crossed = ce.SlopedChainSpec(F(-8), F(-12), 6, ce.CROSSED_TAIL)
    assert ce.expand_chain(crossed).multiplicities == [6, 6, 6]


def test_tail_bottom_and_sections():
    spec = ce.SlopedChainSpec.tail(F(3, 4), 1)
    assert spec.bottom == -1
    exp = ce.expand_chain(spec)
    assert exp.multiplicities == [3, 2, 1]
    assert len(exp.sections["uphill"]) == 0
    assert len(exp.sections["level"]) <= 1


def test_spec_validation():
    with pytest.raises(ValueError):
        ce.SlopedChainSpec(F(0), F(1), 1)
    with pytest.raises(ValueError):
        ce.SlopedChainSpec(F(1), F(0), 0)
    with pytest.raises(ValueError):
        ce.SlopedChainSpec(F(1), F(0), 1, "spiral")


def test_brute_force_agrees_and_is_idempotent():
    a = ce.brute_force_reduce(F(-2, 3), F(-11, 4))
    assert a.fractions == ce.reduced_sequence(F(-2, 3), F(-11, 4)).fractions
    again = ce.brute_force_reduce(a.fractions[0], a.fractions[-1], 4)
    assert again.fractions == a.fractions


def test_brute_force_bound_check():
    with pytest.raises(ValueError):
        ce.brute_force_reduce(F(1, 5), F(0), 3)


def test_hj_approximants_match_chain():
    # chain from r/m down to 0: interior denominators are the numerators of the
    # HJ approximants of m/r, innermost first, without m itself
    for m in range(2, 30):
        for r in range(1, m):
            if F(r, m).denominator != m:
                continue
            exp = ce.reduced_sequence(F(r, m), F(0))
            assert ce.is_determinant_one(exp.fractions)
            bs = ce.hj_expand(m, r)
            nums = [ce.hj_value(bs[:k]).numerator for k in range(1, len(bs) + 1)]
            assert nums[-1] == m
            assert exp.denominators == nums[-2::-1]


def test_self_intersections_of_chain():
    fr = ce.reduced_sequence(F(3, 4), F(-1)).fractions
    assert ce.self_intersections(fr) == [-2, -2, -3]


def test_simplest_between():
    assert ce.simplest_between(F(1, 3), F(1, 2)) == F(1, 2)
    assert ce.simplest_between(F(2, 5), F(3, 7)) == F(2, 5)
    assert ce.simplest_between(F(-1, 2), F(1, 2)) == 0


def test_small_distance_merge_matches_reduction():
    rng = random.Random(4)
    checked = 0
    while checked < 50:
        a, b = sorted(F(rng.randint(1, 40), rng.randint(2, 41)) for _ in range(2))
        if not (0 < a < b < 1) or a == b:
            continue
        merged = ce.small_distance_merge(b, a)
        assert merged == ce.reduced_fractions(b, a)
        checked += 1
    assert ce.small_distance_merge(F(3, 2), F(1, 2)) is None


def test_farey_between_matches_enumeration():
    def naive(top, bottom, bound):
        out = set()
        for d in range(1, bound + 1):
            for n in range(math.ceil(bottom * d), math.floor(top * d) + 1):
                out.add(F(n, d))
        return sorted(out, reverse=True)

    rng = random.Random(3)
    for _ in range(400):
        a = F(rng.randint(-60, 60), rng.randint(1, 30))
        b = F(rng.randint(-60, 60), rng.randint(1, 30))
        if a == b:
            continue
        top, bottom = max(a, b), min(a, b)
        bound = rng.randint(1, 32)
        assert ce.farey_between(top, bottom, bound) == naive(top, bottom, bound)
