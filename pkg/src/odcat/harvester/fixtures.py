"""Deterministic synthetic source records and the default mapping rules."""

from __future__ import annotations

import random

from .. import ns

TOPICS = [
    ("Rainfall", "rain", "ENVI"),
    ("Air quality", "air", "ENVI"),
    ("Traffic counts", "traffic", "TRAN"),
    ("Noise levels", "noise", "ENVI"),
    ("Budget plan", "budget", "GOVE"),
    ("School locations", "schools", "EDUC"),
    ("Tree register", "trees", "ENVI"),
    ("Parking zones", "parking", "TRAN"),
    ("Energy usage", "energy", "ENER"),
    ("Population grid", "population", "SOCI"),
]
CITIES = ["berlin", "hamburg", "munich", "cologne", "dresden", "bremen"]
FORMATS = ["csv", "json", "xml", "geojson", "xls"]
AUTHORITY = "http://publications.europa.eu/resource/authority"


def synthetic_records(count: int, seed: int = 7) -> list[dict]:
    """Reproducible portal records shaped like a typical JSON catalog API."""
    rng = random.Random(seed)
    records = []
    for i in range(count):
        topic, keyword, theme = TOPICS[i % len(TOPICS)]
        city = CITIES[rng.randrange(len(CITIES))]
        year = 2020 + rng.randrange(5)
        resources = [
            {
                "format": rng.choice(FORMATS),
                "url": f"http://files.portal.test/{city}/{keyword}-{i:05d}.{fmt_i}",
            }
            for fmt_i in range(rng.randint(1, 2))
        ]
        records.append(
            {
                "id": f"set-{i:05d}",
                "title": f"{topic} {city} {year}",
                "description": f"{topic} data for {city}, reporting year {year}, series {i}.",
                "keywords": [keyword, city],
                "theme": f"{AUTHORITY}/data-theme/{theme}",
                "spatial": f"http://sws.geonames.org/{2000000 + i}/",
                "issued": f"{year}-01-01T00:00:00Z",
                "publisher": f"{city.title()} Open Data Office",
                "license": f"{AUTHORITY}/licence/CC0",
                "resources": resources,
            }
        )
    return records


def default_mapping_rules() -> dict:
    """Rule set matching the synthetic record shape (JSON form)."""
    file_type = f"{AUTHORITY}/file-type"
    return {
        "distributionsPath": "resources",
        "rules": [
            {"sourcePath": "title", "targetPredicate": ns.DCT_TITLE, "termKind": "langLiteral", "lang": "en", "required": True},
            {"sourcePath": "description", "targetPredicate": ns.DCT_DESCRIPTION, "termKind": "langLiteral", "lang": "en"},
            {"sourcePath": "keywords[*]", "targetPredicate": ns.DCAT_KEYWORD, "termKind": "langLiteral", "lang": "en"},
            {"sourcePath": "theme", "targetPredicate": ns.DCAT_THEME, "termKind": "iri"},
            {"sourcePath": "spatial", "targetPredicate": ns.DCT_SPATIAL, "termKind": "iri"},
            {"sourcePath": "issued", "targetPredicate": ns.DCT_ISSUED, "termKind": "typedLiteral", "datatype": ns.XSD + "dateTime"},
            {"sourcePath": "publisher", "targetPredicate": ns.DCT_PUBLISHER, "termKind": "literal"},
            {"sourcePath": "license", "targetPredicate": ns.DCT_LICENSE, "termKind": "iri"},
            {
                "scope": "distribution",
                "sourcePath": "format",
                "targetPredicate": ns.DCT_FORMAT,
                "termKind": "iri",
                "valueMap": {
                    "csv": f"{file_type}/CSV",
                    "json": f"{file_type}/JSON",
                    "xml": f"{file_type}/XML",
                    "geojson": f"{file_type}/GEOJSON",
                    "xls": f"{file_type}/XLS",
                },
            },
            {"scope": "distribution", "sourcePath": "url", "targetPredicate": ns.DCAT_ACCESS_URL, "termKind": "iri"},
        ],
    }


def records_to_dump_turtle(records: list[dict], base: str = "http://portal.test") -> str:
    """Render the same records as a single DCAT Turtle dump."""
    lines = [
        "@prefix dcat: <http://www.w3.org/ns/dcat#> .",
        "@prefix dct: <http://purl.org/dc/terms/> .",
        "",
    ]
    for rec in records:
        subject = f"<{base}/datasets/{rec['id']}>"
        lines.append(f"{subject} a dcat:Dataset ;")
        lines.append(f'    dct:identifier "{rec["id"]}" ;')
        lines.append(f'    dct:title "{rec["title"]}"@en ;')
        lines.append(f'    dct:description "{rec["description"]}"@en ;')
        for kw in rec.get("keywords", []):
            lines.append(f'    dcat:keyword "{kw}"@en ;')
        if rec.get("theme"):
            lines.append(f"    dcat:theme <{rec['theme']}> ;")
        if rec.get("license"):
            lines.append(f"    dct:license <{rec['license']}> ;")
        for j, res in enumerate(rec.get("resources", [])):
            lines.append(f"    dcat:distribution _:d{rec['id'].replace('-', '')}x{j} ;")
        lines[-1] = lines[-1].rstrip(";") + "."
        for j, res in enumerate(rec.get("resources", [])):
            node = f"_:d{rec['id'].replace('-', '')}x{j}"
            lines.append(f"{node} a dcat:Distribution ; dcat:accessURL <{res['url']}> .")
        lines.append("")
    return "\n".join(lines)
