from __future__ import annotations

import json
import random
from fractions import Fraction as F

import pytest

from clusterfibre.cluster_model import PictureError
from clusterfibre.fibre_graph import canonical_form
from clusterfibre.poly_frontend import (
    DslError,
    load_picture,
    parse_dsl,
    picture_from_dsl,
    read_json,
    rerooted_picture,
    write_json,
)
from clusterfibre.snc_assembler import UnsupportedPicture, assemble


def depths(pic):
    return sorted((c.size, c.depth) for c in pic.proper_clusters())


def test_parse_examples():
    e = parse_dsl("(x^3-p^2)*(x^4-p^11)")
    assert len(e.factors) == 2
    e = parse_dsl("((x^3-p)^3-p^15)*((x-1)^4-p^9)")
    assert [f.shift for f in e.factors] == [0, 1]
    assert parse_dsl("2p^3(x^3-p)").leading_val == 3


def test_syntax_error_offset():
    with pytest.raises(DslError) as info:
        parse_dsl("x^3-p^2-")
    assert info.value.offset == 8


@pytest.mark.parametrize("text", ["(x^2-p)(x^2-p)", "(x-1)(x-1)(x)", "(x^3-p^2/3)(x-1)", "(x^3-p", ""])
def test_rejected_inputs(text):
    with pytest.raises(DslError):
        picture_from_dsl(text)


def test_figure_depths():
    assert depths(picture_from_dsl("(x^3-p^2)(x^4-p^11)")) == [(4, F(11, 4)), (7, F(2, 3))]
    pic = picture_from_dsl("((x^3-p)^3-p^15)((x-1)^4-p^9)")
    assert depths(pic) == [(3, F(13, 3))] * 3 + [(4, F(9, 4)), (9, F(1, 3)), (13, F(0))]
    assert sorted(o.size for o in pic.proper_orbits()) == [1, 1, 1, 3]
    pic = picture_from_dsl("(x^3-p)((x^3-p^4)^2-p^9)")
    assert depths(pic) == [(2, F(11, 6))] * 3 + [(6, F(4, 3)), (9, F(1, 3))]


def test_whitespace_and_factor_order():
    a = picture_from_dsl("(x^3-p^2)*(x^4-p^11)")
    b = picture_from_dsl(" ( x^4 - p^11 ) ( x^3 - p^2 ) ")
    assert canonical_form(assemble(a)) == canonical_form(assemble(b))
    assert depths(a) == depths(b)


def test_json_round_trip():
    pic = picture_from_dsl("(x^3-p)((x^3-p^4)^2-p^9)")
    doc = write_json(pic)
    again = read_json(json.dumps(doc))
    assert write_json(again) == doc
    assert load_picture(json.dumps(doc), "json").genus == pic.genus


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        {"leading_val": 0},
        {"root": {"depth": 0, "children": [{}, {}, {}]}, "extra": 1},
        {"root": {"depth": 0, "colour": "red", "children": [{}, {}, {}]}},
        {"root": {"depth": 1, "children": [{"depth": 1, "orbit": "a", "children": [{}, {}]}, {}]}},
    ],
)
def test_json_errors(doc):
    with pytest.raises(PictureError):
        read_json(doc if isinstance(doc, str) else json.dumps(doc))


def test_unknown_format():
    with pytest.raises(ValueError):
        load_picture("(x^3-1)", "yaml")


def test_reroot_preserves_genus_and_fibre():
    rng = random.Random(8)
    from clusterfibre.random_pictures import random_dsl

    done = 0
    while done < 40:
        text = random_dsl(rng)
        try:
            pic = picture_from_dsl(text)
            other = rerooted_picture(parse_dsl(text))
        except (DslError, PictureError):
            continue
        assert other.genus == pic.genus
        try:
            a, b = assemble(pic), assemble(other)
        except UnsupportedPicture:
            continue
        assert canonical_form(a) == canonical_form(b), text
        done += 1


def test_reroot_needs_rational_root():
    with pytest.raises(DslError):
        rerooted_picture(parse_dsl("(x^3-p)"))
