"""Shared strategies and oracles for the test suite."""

from __future__ import annotations

import socket
from itertools import permutations

from hypothesis import strategies as st

from odcat.rdf import IRI, BlankNode, Literal

XSD = "http://www.w3.org/2001/XMLSchema#"

IRIS = [
    "http://example.org/s1",
    "http://example.org/s2",
    "http://example.org/other#x",
    "http://purl.org/dc/terms/title",
    "http://purl.org/dc/terms/description",
    "http://www.w3.org/ns/dcat#keyword",
    "http://www.w3.org/ns/dcat#distribution",
]

iri_terms = st.sampled_from([IRI(v) for v in IRIS])
predicate_terms = st.sampled_from([IRI(v) for v in IRIS[3:]])
blank_terms = st.builds(BlankNode, st.sampled_from(["b0", "b1", "b2", "b3"]))

_literal_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\ud800"),
    max_size=12,
)

literal_terms = st.one_of(
    st.builds(Literal, _literal_text),
    st.builds(Literal, _literal_text, st.just(XSD + "string"), st.sampled_from(["en", "de", "fr", "en-GB"])),
    st.builds(Literal, st.sampled_from(["1", "01", "3.5", "true"]), st.sampled_from([XSD + "integer", XSD + "decimal", XSD + "boolean"])),
)

subject_terms = st.one_of(iri_terms, blank_terms)
object_terms = st.one_of(iri_terms, blank_terms, literal_terms)

triples = st.tuples(subject_terms, predicate_terms, object_terms)
graphs = st.lists(triples, min_size=0, max_size=14).map(lambda ts: list(dict.fromkeys(ts)))


def blank_labels(graph):
    return sorted({t.label for tr in graph for t in (tr[0], tr[2]) if isinstance(t, BlankNode)})


def relabeled(graph, mapping):
    def sub(term):
        if isinstance(term, BlankNode):
            return BlankNode(mapping[term.label])
        return term

    return [(sub(s), p, sub(o)) for s, p, o in graph]


def isomorphic_oracle(a, b) -> bool:
    """Factorial-search blank-node isomorphism (only for small graphs)."""
    la, lb = blank_labels(a), blank_labels(b)
    if len(la) != len(lb):
        return False
    set_b = set(b)
    if len(set(a)) != len(set_b):
        return False
    for perm in permutations(lb):
        mapping = dict(zip(la, perm))
        if set(relabeled(a, mapping)) == set_b:
            return True
    return False


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]
