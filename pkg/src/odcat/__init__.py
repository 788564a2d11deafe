"""odcat: a self-contained open-data metadata management suite.

Subsystems: a decentralized pipeline protocol and service runtime, a trigger
scheduler, an embedded RDF quad store (Turtle / N-Triples), a DCAT registry
with content negotiation, harvesting services, a faceted search index,
machine-translation tagging, and metadata quality reports.
"""

__version__ = "0.1.0"
