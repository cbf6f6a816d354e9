from __future__ import annotations

from fractions import Fraction as F

import pytest

from clusterfibre.cluster_model import ClusterPicture, PictureError
from clusterfibre.invariants import (
    InvariantTable,
    closed_form_genus,
    cluster_invariants,
    e_cluster,
    epsilon,
    genus_ss,
    lam,
    lattice_genus,
    nu,
    semistable_degree,
)
from clusterfibre.poly_frontend import picture_from_dsl


def single(depth, n, lead=0):
    return ClusterPicture.from_tree({"depth": str(depth), "children": [{} for _ in range(n)]}, lead)


def test_two_orbit_values():
    pic = picture_from_dsl("(x^3-p^2)*(x^4-p^11)")
    s = pic.proper_children("R")[0].id
    assert nu(pic, "R") == F(14, 3)
    assert nu(pic, s) == 13
    assert lam(pic, "R") == 1
    assert lam(pic, s) == F(13, 2)
    assert epsilon(pic, s) == 1
    assert epsilon(pic, "R") == 0
    assert e_cluster(pic, s) == 4
    assert semistable_degree(pic) == 12


def test_single_cluster_values():
    pic = single(F(1, 3), 3)
    assert nu(pic, pic.root_id) == 1
    assert lam(pic, pic.root_id) == F(1, 2)
    assert e_cluster(pic, pic.root_id) == 6
    assert cluster_invariants(pic, pic.root_id).g == 0


def test_nu_on_singleton_is_an_error():
    pic = single(0, 3)
    leaf = pic.leaves()[0]
    with pytest.raises(PictureError):
        nu(pic, leaf)


@pytest.mark.parametrize("lead,eps", [(0, 1), (1, -1), (2, 1)])
def test_epsilon_potentially_good_even(lead, eps):
    pic = single(0, 4, lead)
    assert epsilon(pic, pic.root_id) == eps


@pytest.mark.parametrize(
    "g_ss,b,lam_value,g",
    [(1, 3, F(1), 0), (2, 1, F(2), 2), (1, 2, F(1, 2), 1)],
)
def test_closed_form_genus(g_ss, b, lam_value, g):
    assert closed_form_genus(g_ss, b, lam_value) == g


def test_genus_formula_matches_lattice_count():
    for b in range(1, 13):
        for g_ss in range(0, 9):
            for a in range(-3 * b, 3 * b):
                d = F(a, b)
                if d.denominator != b:
                    continue
                for k in range(-6, 30):
                    lam_value = F(k, 2)
                    assert closed_form_genus(g_ss, b, lam_value) == lattice_genus(g_ss, d, lam_value)


def test_lattice_genus_outside_half_integers():
    # 3 roots at depth -5/2: lambda = -15/4, so the closed form does not apply;
    # a genus-one curve cannot carry a genus-one component of multiplicity 4
    pic = single(F(-5, 2), 3)
    ci = cluster_invariants(pic, pic.root_id)
    assert ci.lam == F(-15, 4) and ci.e_s == 4
    assert ci.g == lattice_genus(1, F(-5, 2), ci.lam) == 0


def test_e_is_b_or_2b_and_g_bounded():
    for b in range(1, 9):
        for n in range(3, 12):
            if b > 1 and n % b not in (0, 1):
                continue
            for lead in range(0, 3):
                pic = single(F(1, b), n, lead)
                ci = cluster_invariants(pic, pic.root_id)
                assert ci.e_s in (b, 2 * b)
                assert (ci.e_s == 2 * b) == ((b * ci.nu) % 2 == 1)
                assert ci.g <= ci.g_ss == genus_ss(pic, pic.root_id)


def test_semistable_degree_examples():
    assert semistable_degree(single(0, 6)) == 1
    assert semistable_degree(picture_from_dsl("(x^3-p)((x^3-p^4)^2-p^9)")) == 6


def test_orbit_invariants_independent_of_representative():
    pic = picture_from_dsl("((x^3-p)^3-p^15)*((x-1)^4-p^9)")
    table = InvariantTable(pic)
    for orbit in pic.proper_orbits():
        vals = {(cluster_invariants(pic, m).nu, cluster_invariants(pic, m).lam) for m in orbit.members}
        assert len(vals) == 1
        assert table.of(orbit.members[-1]) == table.orbits[orbit.tag]


def test_rows_cover_every_proper_cluster():
    pic = picture_from_dsl("(x^3-p)((x^3-p^4)^2-p^9)")
    rows = InvariantTable(pic).rows()
    assert [r["id"] for r in rows] == [c.id for c in pic.proper_clusters()]
    twin = [r for r in rows if r["size"] == 2][0]
    assert "twin" in twin["classes"] and twin["orbit_size"] == 3
