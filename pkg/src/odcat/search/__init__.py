"""Flattened search documents, inverted index, faceted keyword search."""

from .flatten import SearchDocument, flatten
from .index import SearchIndex, tokenize
from .service import SearchService, build_search_router

__all__ = [
    "SearchDocument",
    "flatten",
    "SearchIndex",
    "tokenize",
    "SearchService",
    "build_search_router",
]
