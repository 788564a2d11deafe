"""Registry middleware: DCAT resources over the quad store."""

from .ids import EmptyIdError, normalize_id, slugify
from .core import (
    Event,
    EventBus,
    MultipleDatasetNodesError,
    NoDatasetNodeError,
    NotFoundError,
    Registry,
    UnknownCatalogueError,
    UriScheme,
)
from .http import build_registry_router, negotiate

__all__ = [
    "normalize_id",
    "slugify",
    "EmptyIdError",
    "Registry",
    "UriScheme",
    "Event",
    "EventBus",
    "NoDatasetNodeError",
    "MultipleDatasetNodesError",
    "UnknownCatalogueError",
    "NotFoundError",
    "build_registry_router",
    "negotiate",
]
