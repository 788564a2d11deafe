"""Metrics subsystem: validation, URL checks, scoring, similarity, reports."""

from .shapes import (
    DEFAULT_SHAPES,
    ConstraintViolation,
    MalformedShapeError,
    PropertyConstraint,
    Shape,
    validate,
)
from .urlcheck import UrlCheckResult, check_urls
from .scoring import (
    DIMENSION_WEIGHTS,
    QualityMeasurement,
    QualityReport,
    annotate,
)
from .similarity import EmptyTokenSetError, MinHashIndex, exact_jaccard, shingles
from .reports import aggregate_catalogue, render, report_to_triples
from .service import QualityService, build_quality_router

__all__ = [
    "Shape",
    "PropertyConstraint",
    "ConstraintViolation",
    "MalformedShapeError",
    "DEFAULT_SHAPES",
    "validate",
    "UrlCheckResult",
    "check_urls",
    "QualityMeasurement",
    "QualityReport",
    "DIMENSION_WEIGHTS",
    "annotate",
    "MinHashIndex",
    "EmptyTokenSetError",
    "shingles",
    "exact_jaccard",
    "report_to_triples",
    "aggregate_catalogue",
    "render",
    "QualityService",
    "build_quality_router",
]
