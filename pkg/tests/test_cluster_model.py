from __future__ import annotations

from fractions import Fraction as F

import pytest

from clusterfibre.cluster_model import ClusterPicture, PictureError
from clusterfibre.poly_frontend import picture_from_dsl


def leaves(n):
    return [{} for _ in range(n)]


def test_sizes_genus_and_classes():
    pic = picture_from_dsl("(x^3-p^2)*(x^4-p^11)")
    assert pic.root.size == 7 and pic.genus == 3
    assert pic.classify("R") == {"odd", "proper", "principal"}
    s = pic.proper_children("R")[0]
    assert s.size == 4
    assert "ubereven" not in pic.classify(s.id)
    assert "principal" in pic.classify(s.id)


def test_three_root_cluster_is_principal():
    pic = ClusterPicture.from_tree({"depth": 0, "children": [{"depth": 1, "orbit": "a", "children": leaves(3)}] + leaves(2)})
    child = pic.proper_children(pic.root_id)[0]
    assert pic.classify(child.id) == {"odd", "proper", "principal"}


def test_root_with_two_children_is_not_principal():
    tree = {"depth": 0, "children": [{"depth": 1, "orbit": "a", "children": leaves(3)}, {"depth": 2, "orbit": "b", "children": leaves(3)}]}
    pic = ClusterPicture.from_tree(tree)
    assert not pic.is_principal(pic.root_id)
    assert "twin" not in pic.classify(pic.root_id)


def test_cotwin_and_s_star():
    tree = {"id": "R", "depth": 0, "children": [{"id": "s", "depth": 1, "orbit": "s", "children": leaves(4)}, {}]}
    pic = ClusterPicture.from_tree(tree)
    assert pic.is_cotwin("R")
    assert pic.s_star("R").id == "s"
    assert pic.s_star("s").id == "s"


def test_s_star_walks_through_ubereven_parents():
    twin = {"id": "t", "depth": 3, "orbit": "t", "children": leaves(2)}
    s = {"id": "s", "depth": 1, "orbit": "s", "children": [twin, {"depth": 2, "orbit": "u", "children": leaves(2)}]}
    pic = ClusterPicture.from_tree({"id": "R", "depth": 0, "children": [s] + leaves(3)})
    assert pic.is_ubereven("s")
    assert pic.s_star("t").id == "s"


def test_distances():
    pic = picture_from_dsl("(x^3-p^2)*(x^4-p^11)")
    s = pic.proper_children("R")[0].id
    assert pic.rel_depth(s) == F(25, 12)
    assert pic.distance(s, s) == 0
    with pytest.raises(PictureError):
        pic.rel_depth("R")
    tree = {"id": "R", "depth": 0, "children": [
        {"id": "a", "depth": "1/2", "orbit": "a", "children": leaves(2)},
        {"id": "b", "depth": "2/3", "orbit": "b", "children": leaves(3)}, {}]}
    pic = ClusterPicture.from_tree(tree)
    assert pic.distance("a", "b") == F(7, 6)
    assert pic.wedge("a", "b").id == "R"


def test_stable_children():
    pic = picture_from_dsl("(x^3-p)((x^3-p^4)^2-p^9)")
    s = pic.proper_children(pic.root_id)[0].id
    assert pic.stable_children(s) == []
    pic = picture_from_dsl("(x^3-p^2)*(x^4-p^11)")
    assert len(pic.stable_children("R")) == 1   # only the inner cluster
    tree = {"depth": "1/3", "children": leaves(4)}
    pic = ClusterPicture.from_tree(tree)
    assert pic.stable_singleton(pic.root_id)
    assert len(pic.stable_children(pic.root_id)) == 1


@pytest.mark.parametrize(
    "tree,msg",
    [
        ({"depth": 1, "children": [{"depth": 1, "orbit": "a", "children": leaves(2)}, {}]}, "depth"),
        ({"depth": 0, "children": [{}]}, "two children"),
        ({"depth": "1/3", "children": leaves(5)}, "orbit"),
        ({"depth": 0.5, "children": leaves(3)}, "exact"),
    ],
)
def test_ingest_errors(tree, msg):
    with pytest.raises(PictureError, match=msg):
        ClusterPicture.from_tree(tree)


def test_orbit_members_must_match():
    tree = {"depth": "1/2", "children": [
        {"depth": 1, "orbit": "A", "children": leaves(2)},
        {"depth": 1, "orbit": "A", "children": leaves(3)}, {}]}
    with pytest.raises(PictureError):
        ClusterPicture.from_tree(tree)


def test_orbit_representative_independence():
    pic = picture_from_dsl("((x^3-p)^3-p^15)*((x-1)^4-p^9)")
    big = [o for o in pic.proper_orbits() if o.size == 3][0]
    shapes = {pic.shape(m) for m in big.members}
    assert len(shapes) == 1


def test_leading_valuation_must_be_integral():
    with pytest.raises(PictureError):
        ClusterPicture.from_tree({"depth": "0", "children": [{}, {}, {}]}, "1/2")
