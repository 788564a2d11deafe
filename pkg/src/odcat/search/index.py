"""Embedded inverted index with field-weighted ranking and facet counts."""

from __future__ import annotations

import re
import threading
from collections import Counter

from .flatten import SearchDocument

_TOKEN_RE = re.compile(r"[a-z0-9]+")

FIELD_WEIGHTS = {"title": 3.0, "keywords": 2.0, "description": 1.0}
FACET_FIELDS = ("format", "license", "catalogue", "publisher")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _doc_field_tokens(doc: SearchDocument) -> dict[str, Counter]:
    return {
        "title": Counter(t for v in doc.title.values() for t in tokenize(v)),
        "description": Counter(t for v in doc.description.values() for t in tokenize(v)),
        "keywords": Counter(t for kw in doc.keywords for t in tokenize(kw)),
    }


def _facet_values(doc: SearchDocument, facet: str) -> list[str]:
    if facet == "format":
        return doc.formats
    if facet == "license":
        return doc.licenses
    if facet == "catalogue":
        return [doc.catalogueId] if doc.catalogueId else []
    if facet == "publisher":
        return [doc.publisherName] if doc.publisherName else []
    return []


class SearchIndex:
    """Token -> {doc id -> weighted term frequency}; AND query semantics."""

    def __init__(self) -> None:
        self._docs: dict[str, SearchDocument] = {}
        self._postings: dict[str, dict[str, float]] = {}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._docs)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._docs)

    def get(self, doc_id: str) -> SearchDocument | None:
        with self._lock:
            return self._docs.get(doc_id)

    def index(self, doc: SearchDocument) -> None:
        with self._lock:
            self._remove_postings(doc.id)
            self._docs[doc.id] = doc
            weights: dict[str, float] = {}
            for fld, counts in _doc_field_tokens(doc).items():
                w = FIELD_WEIGHTS[fld]
                for token, tf in counts.items():
                    weights[token] = weights.get(token, 0.0) + w * tf
            for token, weight in weights.items():
                self._postings.setdefault(token, {})[doc.id] = weight

    def remove(self, doc_id: str) -> None:
        with self._lock:
            self._remove_postings(doc_id)
            self._docs.pop(doc_id, None)

    def _remove_postings(self, doc_id: str) -> None:
        for token in list(self._postings):
            bucket = self._postings[token]
            bucket.pop(doc_id, None)
            if not bucket:
                del self._postings[token]

    def set_quality(self, doc_id: str, score: float) -> None:
        with self._lock:
            doc = self._docs.get(doc_id)
            if doc is not None:
                doc.qualityScore = score

    # -- search ----------------------------------------------------------

    def _query_matches(self, tokens: list[str]) -> dict[str, float]:
        """Doc id -> score for docs containing every token."""
        if not tokens:
            return {doc_id: 0.0 for doc_id in self._docs}
        postings = [self._postings.get(t, {}) for t in tokens]
        if any(not p for p in postings):
            return {}
        candidate_ids = set(postings[0])
        for p in postings[1:]:
            candidate_ids &= set(p)
        return {doc_id: sum(p[doc_id] for p in postings) for doc_id in candidate_ids}

    def search(
        self,
        q: str = "",
        facets: dict[str, str] | None = None,
        page: int = 0,
        page_size: int = 10,
    ) -> dict:
        """Ranked hits plus multi-select facet counts.

        Facet counts for a field are computed over the query result filtered
        by every *other* facet, so already-selected values keep their
        alternatives visible.
        """
        facets = {k: v for k, v in (facets or {}).items() if v}
        with self._lock:
            scored = self._query_matches(tokenize(q))

            def passes(doc: SearchDocument, skip: str | None = None) -> bool:
                for fld, wanted in facets.items():
                    if fld == skip:
                        continue
                    if wanted not in _facet_values(doc, fld):
                        return False
                return True

            final_ids = [doc_id for doc_id in scored if passes(self._docs[doc_id])]
            ranked = sorted(final_ids, key=lambda d: (-scored[d], d))

            facet_counts: dict[str, dict[str, int]] = {}
            for fld in FACET_FIELDS:
                counts: Counter = Counter()
                for doc_id in scored:
                    doc = self._docs[doc_id]
                    if passes(doc, skip=fld):
                        counts.update(_facet_values(doc, fld))
                facet_counts[fld] = dict(sorted(counts.items()))

            window = ranked[page * page_size : (page + 1) * page_size]
            return {
                "total": len(ranked),
                "page": page,
                "pageSize": page_size,
                "hits": [self._docs[d].to_json() for d in window],
                "facets": facet_counts,
            }
