from __future__ import annotations

import json
import random

import pytest

from clusterfibre.fibre_graph import (
    CENTRAL,
    CHAIN,
    TAIL_KIND,
    FibreGraph,
    IntegralityError,
    betti_genus_check,
    blow_down,
    canonical_form,
    derive_self_intersections,
    from_description,
    from_json,
    isomorphic,
    render_ascii,
    render_dot,
    to_json,
    validate,
)
from clusterfibre.poly_frontend import picture_from_dsl
from clusterfibre.snc_assembler import KODAIRA_TEMPLATES, assemble, cycle_graph


def star(centre, tails):
    g = FibreGraph()
    c = g.add_component(centre, 0, CENTRAL, "c")
    for t in tails:
        g.add_chain(c, None, t, TAIL_KIND)
    return g


def selfs(g):
    return [c.self_intersection for c in derive_self_intersections(g).components]


def test_self_intersections_type_iii_and_ii():
    assert selfs(star(4, [[1], [2], [1]])) == [-1, -4, -2, -4]
    assert selfs(star(6, [[3], [2], [1]])) == [-1, -2, -3, -6]


def test_cycle_self_intersections():
    g = cycle_graph(5)
    assert selfs(g) == [-2] * 5
    assert betti_genus_check(g, 1)


def test_non_integral_is_an_error():
    with pytest.raises(IntegralityError):
        derive_self_intersections(star(4, [[1], [2]]))


def test_validate_accepts_kodaira_templates():
    for name, g in KODAIRA_TEMPLATES.items():
        assert validate(g), name


def test_validate_flags_planted_defects():
    # chain interior curve with self-intersection -1
    g = FibreGraph()
    a = g.add_component(1, 1, CENTRAL)
    b = g.add_component(1, 1, CENTRAL)
    g.add_chain(a, b, [2], CHAIN)
    rep = validate(g)
    assert not rep and any("non-minimal chain" in v for v in rep.violations)
    # type III with a tail removed: the central curve becomes exceptional
    g = star(2, [[1], [1]])
    rep = validate(g)
    assert not rep and any("exceptional" in v for v in rep.violations)


def test_disconnected():
    g = FibreGraph()
    g.add_component(1, 1)
    g.add_component(1, 1)
    assert any("connected" in v for v in validate(g).violations)


def test_betti_genus_check():
    g = FibreGraph()
    g.add_component(1, 1)
    assert betti_genus_check(g, 1)
    g = FibreGraph()
    a = g.add_component(1, 1)
    b = g.add_component(1, 0)
    g.add_chain(a, b, [], CHAIN)
    g.add_chain(a, b, [1], CHAIN)
    assert betti_genus_check(g, 2)
    with pytest.raises(ValueError):
        betti_genus_check(star(2, [[1]] * 4), 1)


def test_canonical_form_relabelling():
    g = KODAIRA_TEMPLATES["IV*"]
    rng = random.Random(0)
    for _ in range(5):
        perm = list(range(len(g.components)))
        rng.shuffle(perm)
        h = FibreGraph()
        inv = {old: new for new, old in enumerate(perm)}
        comps = sorted(g.components, key=lambda c: inv[c.id])
        for c in comps:
            h.add_component(c.multiplicity, c.genus, c.kind)
        for a, b in g.edges:
            h.add_edge(inv[a], inv[b])
        assert canonical_form(h) == canonical_form(g)
        assert isomorphic(g, h)
    assert not isomorphic(KODAIRA_TEMPLATES["IV*"], KODAIRA_TEMPLATES["III*"])


def test_renderers_and_json():
    g = assemble(picture_from_dsl("(x^3-p)"))
    dot = render_dot(g)
    assert dot.count("label=") == 4 and dot.count(" -- ") == 3
    assert "m6 g0" in dot
    text = render_ascii(g)
    assert "multiplicity 6" in text
    doc = to_json(derive_self_intersections(g))
    again = from_json(json.dumps(doc))
    assert to_json(again) == json.loads(json.dumps(doc))
    assert canonical_form(again) == canonical_form(g)


def test_from_json_errors():
    with pytest.raises(ValueError):
        from_json({"components": [{"multiplicity": 0}]})
    with pytest.raises(ValueError):
        from_json({"components": [{"multiplicity": 1}], "edges": [[0, 3]]})
    with pytest.raises(ValueError):
        from_json({"edges": []})


def test_from_description_loop_and_crosses():
    g = from_description({
        "centrals": {"A": [2, 0]},
        "chains": [{"from": "A", "mults": [2, 2], "crosses": [1, 1]}, {"from": "A", "to": "A", "mults": [2]}],
    })
    assert len(g.components) == 6
    assert sorted(c.multiplicity for c in g.components) == [1, 1, 2, 2, 2, 2]


def test_blow_down_contracts_exceptional_curves():
    g = FibreGraph()
    a = g.add_component(1, 1)
    g.add_chain(a, None, [1], TAIL_KIND)
    assert len(blow_down(g).components) == 1
    # a multiplicity-2 curve meeting a reduced curve twice becomes a node
    g = FibreGraph()
    a = g.add_component(1, 0)
    g.add_chain(a, a, [2], CHAIN)
    out = blow_down(g)
    assert len(out.components) == 1 and out.edges == [(0, 0)]
