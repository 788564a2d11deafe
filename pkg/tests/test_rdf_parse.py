import pytest
from hypothesis import given, settings

from odcat.rdf import (
    IRI,
    BlankNode,
    Literal,
    ParseError,
    UnresolvedPrefixError,
    isomorphic,
    parse_ntriples,
    parse_turtle,
    serialize,
    serialize_ntriples,
    serialize_turtle,
)

from conftest import graphs

DCT = "http://purl.org/dc/terms/"
XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


def test_minimal_turtle_document():
    text = '@prefix dct: <http://purl.org/dc/terms/> . <http://x/d1> dct:title "Rain"@en .'
    ts = parse_turtle(text)
    assert ts == [(IRI("http://x/d1"), IRI(DCT + "title"), Literal("Rain", lang="en"))]


def test_language_tag_lowercased():
    (t,) = parse_turtle('<http://x/d> <http://x/p> "x"@EN-GB .')
    assert t[2].lang == "en-gb"


def test_ntriples_typed_literal():
    (t,) = parse_ntriples('<http://x/s> <http://x/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .')
    assert t[2] == Literal("5", XSD + "integer")


def test_numeric_and_boolean_shorthand():
    ts = parse_turtle("<http://x/s> <http://x/p> 5, 3.14, 1.0e3, true, false .")
    datatypes = [t[2].datatype for t in ts]
    assert datatypes == [
        XSD + "integer",
        XSD + "decimal",
        XSD + "double",
        XSD + "boolean",
        XSD + "boolean",
    ]
    assert [t[2].lexical for t in ts] == ["5", "3.14", "1.0e3", "true", "false"]


def test_a_keyword_and_semicolon_comma():
    text = """
    @prefix dcat: <http://www.w3.org/ns/dcat#> .
    @prefix dct: <http://purl.org/dc/terms/> .
    <http://x/d> a dcat:Dataset ;
        dct:title "One"@en, "Eins"@de ;
        dct:issued "2024-01-01"^^<http://www.w3.org/2001/XMLSchema#date> .
    """
    ts = parse_turtle(text)
    assert len(ts) == 4
    assert ts[0][1] == IRI(RDF_TYPE)


def test_blank_node_label_and_anon():
    text = """
    @prefix dcat: <http://www.w3.org/ns/dcat#> .
    <http://x/d> dcat:distribution _:d1, [ dcat:accessURL <http://x/f.csv> ] .
    _:d1 dcat:accessURL <http://x/g.csv> .
    """
    ts = parse_turtle(text)
    assert len(ts) == 4
    anon = [o for s, p, o in ts if isinstance(o, BlankNode) and o.label != "d1"]
    assert len(anon) == 1


def test_base_resolution():
    ts = parse_turtle("@base <http://x/dir/> . <doc> <http://x/p> <../up> .")
    assert ts[0][0] == IRI("http://x/dir/doc")
    assert ts[0][2] == IRI("http://x/up")


def test_base_argument():
    ts = parse_turtle("<doc> <http://x/p> <o> .", base_iri="http://root/base/")
    assert ts[0][0] == IRI("http://root/base/doc")


def test_sparql_style_prefix():
    ts = parse_turtle('PREFIX dct: <http://purl.org/dc/terms/>\n<http://x/d> dct:title "t" .')
    assert ts[0][1] == IRI(DCT + "title")


def test_collections_rejected():
    with pytest.raises(ParseError) as err:
        parse_turtle("<http://x/s> <http://x/p> (1 2) .")
    assert "not supported" in str(err.value)


def test_unresolved_prefix():
    with pytest.raises(UnresolvedPrefixError):
        parse_turtle('<http://x/d> dct:title "Rain" .')


def test_parse_error_location():
    with pytest.raises(ParseError) as err:
        parse_turtle('<http://x/d> <http://x/p> "unterminated .')
    assert err.value.line == 1
    assert err.value.column > 1


def test_error_location_multiline():
    with pytest.raises(ParseError) as err:
        parse_turtle('<http://x/a> <http://x/p> "ok" .\n<http://x/b> <bad iri> "x" .')
    assert err.value.line == 2


def test_ntriples_rejects_turtle_sugar():
    with pytest.raises(ParseError):
        parse_ntriples('<http://x/s> a "x" .')


def test_escapes_round_trip():
    lex = 'tab\t"quote"\\back\nnl'
    ts = [(IRI("http://x/s"), IRI("http://x/p"), Literal(lex))]
    out = serialize_ntriples(ts)
    assert parse_ntriples(out) == ts


def test_unicode_escape():
    (t,) = parse_ntriples('<http://x/s> <http://x/p> "caf\\u00E9" .')
    assert t[2].lexical == "café"


def test_empty_graph_serializes_empty():
    assert serialize_ntriples([]) == ""
    assert serialize_turtle([]) == ""


def test_serialization_deterministic():
    text = """
    @prefix dct: <http://purl.org/dc/terms/> .
    <http://x/d> dct:title "A", "B" ; dct:description [ dct:title "inner" ] .
    """
    g = parse_turtle(text)
    assert serialize_ntriples(g) == serialize_ntriples(g)
    assert serialize_turtle(g) == serialize_turtle(g)


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_roundtrip_ntriples_isomorphic(g):
    assert isomorphic(parse_ntriples(serialize_ntriples(g)), g)


@settings(max_examples=150, deadline=None)
@given(graphs)
def test_roundtrip_turtle_isomorphic(g):
    assert isomorphic(parse_turtle(serialize_turtle(g)), g)


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_serialize_format_dispatch(g):
    assert serialize(g, "ntriples") == serialize_ntriples(g)
    assert serialize(g, "turtle") == serialize_turtle(g)
