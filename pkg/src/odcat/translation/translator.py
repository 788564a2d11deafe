"""Original-language detection and dataset translation orchestration."""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

from .. import ns
from ..httpkit import Request, Response, Router
from ..rdf import IRI, Literal, Term, Triple
from ..registry.core import Event, Registry
from .providers import ProviderError
from .tags import ExtendedLangTag, is_machine_tag

logger = logging.getLogger(__name__)

DEFAULT_PROPERTIES = (ns.DCT_TITLE, ns.DCT_DESCRIPTION)


def _now_literal() -> Literal:
    ts = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
    return Literal(ts, ns.XSD + "dateTime")


def detect_original(graph: list[Triple], catalogue_default_lang: str = "en") -> list[tuple[Term, str, Literal, str]]:
    """(subject, predicate, literal, source language) for every original literal.

    A literal's own tag wins; untagged literals assume the catalogue default;
    machine-translated literals (extended "-t-" tags) are never originals.
    """
    out = []
    for s, p, o in graph:
        if not isinstance(o, Literal):
            continue
        if is_machine_tag(o.lang):
            continue
        if o.lang is not None:
            source = o.lang.split("-", 1)[0]
        else:
            source = catalogue_default_lang
        out.append((s, p.value, o, source))
    return out


def translate_dataset(
    registry: Registry,
    dataset_id: str,
    targets: list[str],
    provider,
    properties: tuple[str, ...] = DEFAULT_PROPERTIES,
    default_lang: str = "en",
) -> dict:
    """Translate missing target languages for the configured properties.

    Human translations (plain target-language tags) and previous machine
    translations are never overwritten; a run with nothing to do leaves the
    graph byte-identical.
    """
    graph = registry.dataset_graph(dataset_id)
    dataset_nodes = [
        s for s, p, o in graph
        if p.value == ns.RDF_TYPE and isinstance(o, IRI) and o.value == ns.DCAT_DATASET
    ]
    if not dataset_nodes:
        return {"added": 0, "targets": []}
    dataset = dataset_nodes[0]

    originals = {
        (s, p): []
        for s, p, lit, lang in detect_original(graph, default_lang)
    }
    for s, p, lit, lang in detect_original(graph, default_lang):
        originals[(s, p)].append((lit, lang))

    present_langs: dict[str, set[str]] = {p: set() for p in properties}
    for s, p, o in graph:
        if s == dataset and p.value in present_langs and isinstance(o, Literal):
            lang = (o.lang or "und").split("-", 1)[0]
            present_langs[p.value].add(lang)

    # one bundled request per source language
    work: dict[str, list[tuple[str, str, str]]] = {}  # source -> [(prop, text, target)]
    for prop in properties:
        candidates = originals.get((dataset, prop), [])
        if not candidates:
            continue
        by_lang = {lang: lit for lit, lang in candidates}
        source = default_lang if default_lang in by_lang else sorted(by_lang)[0]
        text = by_lang[source].lexical
        for target in targets:
            if target == source:
                continue
            if target in present_langs[prop]:
                continue
            work.setdefault(source, []).append((prop, text, target))

    if not work:
        return {"added": 0, "targets": []}

    new_triples = list(graph)
    started = (dataset, IRI(ns.ODN_TRANSLATION_STARTED), _now_literal())
    new_triples = [
        t for t in new_triples
        if not (t[0] == dataset and t[1].value in (ns.ODN_TRANSLATION_STARTED, ns.ODN_TRANSLATION_COMPLETED))
    ]
    new_triples.append(started)

    added = 0
    added_targets: set[str] = set()
    failed = False
    for source, items in sorted(work.items()):
        texts = sorted({text for _, text, _ in items})
        wanted = sorted({target for _, _, target in items})
        translations: dict[tuple[str, str], str] = {}
        batch = max(1, getattr(provider, "batch_limit", 100))
        try:
            for i in range(0, len(texts), batch):
                result = provider.submit(texts[i : i + batch], source, wanted)
                translations.update(result.translations)
        except ProviderError:
            # leave status at started; a later registry event retries
            failed = True
            logger.warning("provider failed for dataset %s (source %s)", dataset_id, source)
            continue
        for prop, text, target in items:
            translated = translations.get((text, target))
            if translated is None:
                continue  # partial result: missing languages stay absent
            tag = ExtendedLangTag(target, source, provider.tag).render()
            new_triples.append((dataset, IRI(prop), Literal(translated, lang=tag)))
            added += 1
            added_targets.add(target)

    if not failed:
        new_triples.append((dataset, IRI(ns.ODN_TRANSLATION_COMPLETED), _now_literal()))
    registry.update_dataset_triples(dataset_id, new_triples)
    return {"added": added, "targets": sorted(added_targets), "completed": not failed}


class TranslationService:
    """Translates datasets on registry mutation events."""

    def __init__(
        self,
        registry: Registry,
        provider,
        targets: list[str],
        default_lang: str = "en",
        workers: int = 4,
    ):
        self.registry = registry
        self.provider = provider
        self.targets = targets
        self.default_lang = default_lang
        self.pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="translate")
        self._in_flight: set[str] = set()
        self._lock = threading.Lock()
        registry.events.subscribe(self.on_event)

    def on_event(self, event: Event) -> None:
        if event.kind == "deleted" or not self.targets:
            return
        with self._lock:
            if event.dataset_id in self._in_flight:
                return
            self._in_flight.add(event.dataset_id)
        self.pool.submit(self._run, event.dataset_id)

    def _run(self, dataset_id: str) -> None:
        try:
            translate_dataset(
                self.registry, dataset_id, self.targets, self.provider, default_lang=self.default_lang
            )
        except Exception:
            logger.exception("translation failed for %s", dataset_id)
        finally:
            with self._lock:
                self._in_flight.discard(dataset_id)

    def translate_now(self, dataset_id: str) -> dict:
        return translate_dataset(
            self.registry, dataset_id, self.targets, self.provider, default_lang=self.default_lang
        )

    def drain(self, timeout: float = 10.0) -> None:
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if not self._in_flight:
                    return
            time.sleep(0.02)


def build_translation_router(service: TranslationService, token: str | None = None) -> Router:
    router = Router(name="translation", token=token)

    def translate(req: Request) -> Response:
        dataset_id = req.params["datasetId"]
        if not service.registry.has_dataset(dataset_id):
            return Response.error(404, "NotFound", f"no dataset {dataset_id!r}")
        return Response.json(service.translate_now(dataset_id))

    router.route("POST", "/translate/{datasetId}", translate, protected=True)
    return router
