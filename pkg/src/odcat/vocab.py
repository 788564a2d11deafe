"""Bundled SKOS-like vocabularies and format classification lists."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import ns
from .rdf import IRI, Literal, parse_turtle

BUNDLED_DIR = Path(__file__).parent / "vocabularies"
FORMATS_DIR = Path(__file__).parent / "formats"

_LABEL_PREDICATES = (ns.SKOS_PREFLABEL, ns.RDFS_LABEL)


@dataclass
class Vocabulary:
    """IRI -> preferred label per language; lookups always return something."""

    name: str
    labels: dict[str, dict[str, str]] = field(default_factory=dict)

    def add(self, iri: str, label: str, lang: str = "und") -> None:
        self.labels.setdefault(iri, {})[lang] = label

    def knows(self, iri: str) -> bool:
        return iri in self.labels

    def label(self, iri: str, lang: str = "en") -> str:
        per_lang = self.labels.get(iri)
        if per_lang:
            for key in (lang, "en", "und"):
                if key in per_lang:
                    return per_lang[key]
            return next(iter(per_lang.values()))
        return IRI(iri).local_name()

    @classmethod
    def from_turtle(cls, name: str, text: str) -> "Vocabulary":
        vocab = cls(name)
        for s, p, o in parse_turtle(text):
            if p.value in _LABEL_PREDICATES and isinstance(s, IRI) and isinstance(o, Literal):
                vocab.add(s.value, o.lexical, o.lang or "und")
        return vocab


def load_vocabularies(directory: str | Path | None = None) -> dict[str, Vocabulary]:
    """Load every *.ttl vocabulary in the directory (bundled set by default)."""
    directory = Path(directory) if directory else BUNDLED_DIR
    out: dict[str, Vocabulary] = {}
    for path in sorted(directory.glob("*.ttl")):
        name = path.stem
        out[name] = Vocabulary.from_turtle(name, path.read_text(encoding="utf-8"))
    return out


def _load_list(path: Path) -> frozenset[str]:
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            entries.append(line)
    return frozenset(entries)


def load_format_lists(directory: str | Path | None = None) -> tuple[frozenset[str], frozenset[str]]:
    """(machine-readable labels, non-proprietary labels), lowercased."""
    directory = Path(directory) if directory else FORMATS_DIR
    return (
        _load_list(directory / "machine_readable.txt"),
        _load_list(directory / "non_proprietary.txt"),
    )
