"""Declarative mapping rules turning tree-structured records into DCAT RDF."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .. import ns
from ..rdf import BlankNode, IRI, Literal, Term, Triple, parse_ntriples, parse_turtle
from ..registry.ids import slugify
from .records import SourceRecord

_SEGMENT_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_-]*)((\[(\d+|\*)\])*)$")
_INDEX_RE = re.compile(r"\[(\d+|\*)\]")
_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*://")

TERM_KINDS = ("iri", "literal", "langLiteral", "typedLiteral")
RDF_CONTENT_TYPES = ("text/turtle", "application/n-triples")


class PathError(ValueError):
    """Source path is syntactically invalid."""


class MappingError(ValueError):
    """A required path is absent (record-level failure)."""


def _parse_path(path: str) -> list[str | int | None]:
    """'a.b[0].c[*]' -> ['a', 'b', 0, 'c', None]; None is the wildcard."""
    if not path:
        raise PathError("empty path")
    steps: list[str | int | None] = []
    for segment in path.split("."):
        m = _SEGMENT_RE.match(segment)
        if not m:
            raise PathError(f"bad path segment {segment!r} in {path!r}")
        steps.append(m.group(1))
        for idx in _INDEX_RE.findall(m.group(2)):
            steps.append(None if idx == "*" else int(idx))
    return steps


def resolve_path(obj, path: str) -> list:
    """All values at a dot/bracket path; missing branches yield nothing."""
    current = [obj]
    for step in _parse_path(path):
        nxt = []
        for value in current:
            if isinstance(step, str):
                if isinstance(value, dict) and step in value:
                    nxt.append(value[step])
            elif step is None:  # wildcard
                if isinstance(value, list):
                    nxt.extend(value)
            else:
                if isinstance(value, list) and 0 <= step < len(value):
                    nxt.append(value[step])
        current = nxt
    return current


@dataclass
class MappingRule:
    source_path: str
    target_predicate: str
    term_kind: str = "literal"
    lang: str | None = None
    datatype: str | None = None
    value_map: dict[str, str] = field(default_factory=dict)
    required: bool = False
    scope: str = "dataset"  # dataset | distribution

    def __post_init__(self) -> None:
        _parse_path(self.source_path)
        if not _SCHEME_RE.match(self.target_predicate) and "://" not in self.target_predicate:
            raise ValueError(f"target predicate must be an absolute IRI: {self.target_predicate!r}")
        if self.term_kind not in TERM_KINDS:
            raise ValueError(f"unknown term kind {self.term_kind!r}")
        if self.term_kind == "langLiteral" and not self.lang:
            raise ValueError("langLiteral needs a language")
        if self.term_kind == "typedLiteral" and not self.datatype:
            raise ValueError("typedLiteral needs a datatype IRI")
        if self.scope not in ("dataset", "distribution"):
            raise ValueError(f"unknown rule scope {self.scope!r}")

    def to_json(self) -> dict:
        out = {
            "sourcePath": self.source_path,
            "targetPredicate": self.target_predicate,
            "termKind": self.term_kind,
        }
        if self.lang:
            out["lang"] = self.lang
        if self.datatype:
            out["datatype"] = self.datatype
        if self.value_map:
            out["valueMap"] = self.value_map
        if self.required:
            out["required"] = True
        if self.scope != "dataset":
            out["scope"] = self.scope
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MappingRule":
        return cls(
            source_path=obj["sourcePath"],
            target_predicate=obj["targetPredicate"],
            term_kind=obj.get("termKind", "literal"),
            lang=obj.get("lang"),
            datatype=obj.get("datatype"),
            value_map=dict(obj.get("valueMap", {})),
            required=bool(obj.get("required", False)),
            scope=obj.get("scope", "dataset"),
        )


@dataclass
class MappingRuleSet:
    rules: list[MappingRule]
    distributions_path: str | None = None

    def to_json(self) -> dict:
        out: dict = {"rules": [r.to_json() for r in self.rules]}
        if self.distributions_path:
            out["distributionsPath"] = self.distributions_path
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MappingRuleSet":
        return cls(
            rules=[MappingRule.from_json(r) for r in obj.get("rules", [])],
            distributions_path=obj.get("distributionsPath"),
        )


def _as_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _make_term(value, rule: MappingRule) -> Term | None:
    text = rule.value_map.get(_as_text(value), _as_text(value))
    if rule.term_kind == "iri":
        if not _SCHEME_RE.match(text):
            return None  # dropped with a warning by the caller
        return IRI(text)
    if rule.term_kind == "langLiteral":
        return Literal(text, lang=rule.lang)
    if rule.term_kind == "typedLiteral":
        return Literal(text, rule.datatype)
    return Literal(text)


def transform(record: SourceRecord, rules: MappingRuleSet, base_iri: str) -> list[Triple]:
    """Deterministic record -> DCAT graph mapping.

    RDF records pass through unchanged; JSON records get one dcat:Dataset
    node with a triple per matched rule and blank distribution nodes that
    the registry later rewrites to fragment IRIs.
    """
    if record.contentType in RDF_CONTENT_TYPES:
        if record.contentType == "application/n-triples":
            return parse_ntriples(record.content)
        return parse_turtle(record.content, base_iri=base_iri)

    try:
        tree = json.loads(record.content)
    except json.JSONDecodeError as exc:
        raise MappingError(f"record {record.sourceId!r} is not valid JSON: {exc}") from exc
    if not isinstance(tree, dict):
        raise MappingError(f"record {record.sourceId!r} is not a JSON object")

    slug = slugify(record.sourceId) or "record"
    dataset = IRI(f"{base_iri.rstrip('/')}/datasets/{slug}")
    triples: list[Triple] = [
        (dataset, IRI(ns.RDF_TYPE), IRI(ns.DCAT_DATASET)),
        (dataset, IRI(ns.DCT_IDENTIFIER), Literal(record.sourceId)),
    ]

    def apply(rule: MappingRule, node: Term, tree_part) -> None:
        values = resolve_path(tree_part, rule.source_path)
        if rule.required and not values:
            raise MappingError(
                f"record {record.sourceId!r}: required path {rule.source_path!r} is absent"
            )
        for value in values:
            if isinstance(value, (dict, list)):
                continue
            term = _make_term(value, rule)
            if term is not None:
                triples.append((node, IRI(rule.target_predicate), term))

    for rule in rules.rules:
        if rule.scope == "dataset":
            apply(rule, dataset, tree)

    if rules.distributions_path:
        items = resolve_path(tree, rules.distributions_path)
        flat = items[0] if len(items) == 1 and isinstance(items[0], list) else items
        for i, item in enumerate(x for x in flat if isinstance(x, dict)):
            node = BlankNode(f"dist{i}")
            triples.append((dataset, IRI(ns.DCAT_DISTRIBUTION), node))
            triples.append((node, IRI(ns.RDF_TYPE), IRI(ns.DCAT_DISTRIBUTION_CLASS)))
            for rule in rules.rules:
                if rule.scope == "distribution":
                    apply(rule, node, item)

    return triples
