"""Turtle and N-Triples serialization.

N-Triples output is canonical: blank nodes are relabeled deterministically
and lines are sorted bytewise, so equal graphs serialize to equal bytes.
"""

from __future__ import annotations

import re
from typing import Iterable

from .terms import IRI, RDF_TYPE, XSD_STRING, BlankNode, Literal, Term, Triple

DEFAULT_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "dct": "http://purl.org/dc/terms/",
    "dcat": "http://www.w3.org/ns/dcat#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "skos": "http://www.w3.org/2004/02/skos/core#",
    "dqv": "http://www.w3.org/ns/dqv#",
    "prov": "http://www.w3.org/ns/prov#",
}

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}
_LOCAL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*$")


def _escape_string(s: str) -> str:
    out = []
    for c in s:
        if c in _ESCAPES:
            out.append(_ESCAPES[c])
        elif ord(c) < 0x20:
            out.append(f"\\u{ord(c):04X}")
        else:
            out.append(c)
    return "".join(out)


def format_term(term: Term) -> str:
    """N-Triples form of one term."""
    if isinstance(term, IRI):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        body = f'"{_escape_string(term.lexical)}"'
        if term.lang is not None:
            return f"{body}@{term.lang}"
        if term.datatype == XSD_STRING:
            return body
        return f"{body}^^<{term.datatype}>"
    raise TypeError(f"not an RDF term: {term!r}")


def format_triple(triple: Triple) -> str:
    s, p, o = triple
    return f"{format_term(s)} {format_term(p)} {format_term(o)} ."


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Canonical N-Triples: deterministic blank labels, bytewise-sorted lines."""
    from .canon import canonicalize

    lines = sorted({format_triple(t) for t in canonicalize(list(triples))}, key=lambda s: s.encode("utf-8"))
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_turtle(triples: Iterable[Triple], prefixes: dict[str, str] | None = None) -> str:
    """Compact Turtle grouped by subject, deterministic ordering."""
    triples = list(triples)
    if not triples:
        return ""
    prefix_map = dict(DEFAULT_PREFIXES)
    if prefixes:
        prefix_map.update(prefixes)
    by_iri = sorted(((iri, name) for name, iri in prefix_map.items()), key=lambda x: -len(x[0]))

    used: set[str] = set()

    def term_text(term: Term, as_predicate: bool = False) -> str:
        if isinstance(term, IRI):
            if as_predicate and term.value == RDF_TYPE:
                return "a"
            for iri, name in by_iri:
                if term.value.startswith(iri):
                    local = term.value[len(iri):]
                    if local == "" or _LOCAL_RE.match(local):
                        used.add(name)
                        return f"{name}:{local}"
            return f"<{term.value}>"
        if isinstance(term, Literal) and term.lang is None and term.datatype != XSD_STRING:
            for iri, name in by_iri:
                if term.datatype.startswith(iri):
                    local = term.datatype[len(iri):]
                    if _LOCAL_RE.match(local):
                        used.add(name)
                        return f'"{_escape_string(term.lexical)}"^^{name}:{local}'
            return format_term(term)
        return format_term(term)

    def sort_key(term: Term) -> tuple:
        return (isinstance(term, BlankNode), format_term(term).encode("utf-8"))

    grouped: dict[Term, dict[IRI, list[Term]]] = {}
    for s, p, o in triples:
        grouped.setdefault(s, {}).setdefault(p, []).append(o)

    blocks: list[str] = []
    for s in sorted(grouped, key=sort_key):
        pred_lines = []
        type_first = sorted(grouped[s], key=lambda p: (p.value != RDF_TYPE, sort_key(p)))
        for p in type_first:
            objects = ", ".join(term_text(o) for o in sorted(set(grouped[s][p]), key=sort_key))
            pred_lines.append(f"    {term_text(p, as_predicate=True)} {objects}")
        blocks.append(term_text(s) + "\n" + " ;\n".join(pred_lines) + " .")

    body = "\n\n".join(blocks)
    header = "".join(
        f"@prefix {name}: <{prefix_map[name]}> .\n" for name in sorted(used)
    )
    return (header + "\n" if header else "") + body + "\n"


def serialize(triples: Iterable[Triple], fmt: str = "turtle", prefixes: dict[str, str] | None = None) -> str:
    """Serialize triples as 'turtle' or 'ntriples'."""
    if fmt == "turtle":
        return serialize_turtle(triples, prefixes)
    if fmt == "ntriples":
        return serialize_ntriples(triples)
    raise ValueError(f"unknown serialization format: {fmt!r}")
