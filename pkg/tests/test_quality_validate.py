import json
import random
from collections import Counter
from pathlib import Path

import pytest

from odcat import ns
from odcat.quality import (
    DEFAULT_SHAPES,
    MalformedShapeError,
    PropertyConstraint,
    Shape,
    validate,
)
from odcat.rdf import IRI, BlankNode, Literal, parse_turtle

import odcat

FIXTURES = Path(odcat.__file__).parent / "fixtures" / "validation"


def violation_key(v):
    return (v.focus_node, v.path, v.kind, v.severity)


def test_fixture_corpus_matches_expected_multisets():
    expected = json.loads((FIXTURES / "expected.json").read_text())
    assert len(expected) == 10
    for name, expected_list in expected.items():
        graph = parse_turtle((FIXTURES / name).read_text())
        got = Counter(violation_key(v) for v in validate(graph, DEFAULT_SHAPES))
        want = Counter(
            (e["focusNode"], e["path"], e["kind"], e["severity"]) for e in expected_list
        )
        assert got == want, f"{name}: {got} != {want}"


def test_missing_title_names_path():
    graph = parse_turtle((FIXTURES / "d01.ttl").read_text())
    (v,) = validate(graph, DEFAULT_SHAPES)
    assert v.path == ns.DCT_TITLE
    assert v.kind == "minCount"
    assert "title" in v.message


def test_conforming_fixture_empty():
    graph = parse_turtle((FIXTURES / "d02.ttl").read_text())
    assert validate(graph, DEFAULT_SHAPES) == []


def test_malformed_shapes_rejected():
    with pytest.raises(MalformedShapeError):
        PropertyConstraint("http://x/p", "between")
    with pytest.raises(MalformedShapeError):
        PropertyConstraint("http://x/p", "minCount")
    with pytest.raises(MalformedShapeError):
        PropertyConstraint("http://x/p", "nodeKind", node_kind="resource")
    with pytest.raises(MalformedShapeError):
        PropertyConstraint("http://x/p", "inList")


# -- random graphs against a naive reference evaluator ------------------------


def naive_validate(graph, shapes):
    """Small independent evaluator: one loop per constraint kind."""
    results = []
    types = {}
    for s, p, o in graph:
        if p.value == ns.RDF_TYPE and isinstance(o, IRI):
            types.setdefault(s, set()).add(o.value)

    def values_of(node, path):
        return [o for s, p, o in graph if s == node and p.value == path]

    def text(t):
        return t.value if isinstance(t, IRI) else (str(t) if isinstance(t, BlankNode) else t.lexical)

    for shape in shapes:
        for node in [n for n, cs in types.items() if shape.target_class in cs]:
            for c in shape.constraints:
                vals = values_of(node, c.path)
                if c.kind == "minCount" and len(vals) < c.count:
                    results.append((text(node), c.path, "minCount", c.severity))
                if c.kind == "maxCount" and len(vals) > c.count:
                    results.append((text(node), c.path, "maxCount", c.severity))
                if c.kind == "class":
                    for v in vals:
                        if isinstance(v, Literal) or c.class_iri not in types.get(v, set()):
                            results.append((text(node), c.path, "class", c.severity))
                if c.kind == "datatype":
                    for v in vals:
                        if not isinstance(v, Literal) or v.datatype != c.datatype:
                            results.append((text(node), c.path, "datatype", c.severity))
                if c.kind == "nodeKind":
                    for v in vals:
                        kinds = c.node_kind.split("_or_")
                        actual = "iri" if isinstance(v, IRI) else "literal" if isinstance(v, Literal) else "blank"
                        if actual not in kinds:
                            results.append((text(node), c.path, "nodeKind", c.severity))
                if c.kind == "inList":
                    for v in vals:
                        if text(v) not in c.values:
                            results.append((text(node), c.path, "inList", c.severity))
    return results


def random_shape(rng):
    path = rng.choice(["http://x/p1", "http://x/p2", "http://x/p3"])
    kind = rng.choice(["minCount", "maxCount", "class", "datatype", "nodeKind", "inList"])
    severity = rng.choice(["violation", "warning"])
    kwargs = {}
    if kind in ("minCount", "maxCount"):
        kwargs["count"] = rng.randint(0, 2)
    elif kind == "class":
        kwargs["class_iri"] = "http://x/SomeClass"
    elif kind == "datatype":
        kwargs["datatype"] = rng.choice([ns.XSD + "decimal", ns.XSD + "string"])
    elif kind == "nodeKind":
        kwargs["node_kind"] = rng.choice(["iri", "literal", "blank", "iri_or_blank"])
    else:
        kwargs["values"] = ("http://x/allowed-1", "http://x/allowed-2")
    return Shape("http://x/Thing", (PropertyConstraint(path, kind, severity, **kwargs),))


def random_graph(rng):
    nodes = [IRI(f"http://x/n{i}") for i in range(3)] + [BlankNode("b0")]
    objects = nodes + [
        Literal("v"),
        Literal("1", ns.XSD + "decimal"),
        IRI("http://x/allowed-1"),
        IRI("http://x/SomeClass"),
    ]
    graph = []
    for node in nodes:
        if rng.random() < 0.8:
            graph.append((node, IRI(ns.RDF_TYPE), IRI("http://x/Thing")))
        if rng.random() < 0.2:
            graph.append((node, IRI(ns.RDF_TYPE), IRI("http://x/SomeClass")))
        for pred in ("http://x/p1", "http://x/p2", "http://x/p3"):
            for _ in range(rng.randint(0, 2)):
                graph.append((node, IRI(pred), rng.choice(objects)))
    return list(dict.fromkeys(graph))


def test_random_graphs_match_reference_evaluator():
    rng = random.Random(321)
    for trial in range(150):
        graph = random_graph(rng)
        shapes = [random_shape(rng) for _ in range(rng.randint(1, 3))]
        got = Counter(violation_key(v) for v in validate(graph, shapes))
        want = Counter(naive_validate(graph, shapes))
        assert got == want, f"trial {trial}"


def test_every_mandatory_omission_yields_one_violation():
    """Validator completeness on the default dataset shape."""
    full = parse_turtle((FIXTURES / "d02.ttl").read_text())
    mandatory = [ns.DCT_TITLE, ns.DCT_DESCRIPTION]
    for path in mandatory:
        pruned = [t for t in full if t[1].value != path]
        hits = [
            v for v in validate(pruned, DEFAULT_SHAPES)
            if v.severity == "violation" and v.kind == "minCount"
        ]
        assert len(hits) == 1
        assert hits[0].path == path
