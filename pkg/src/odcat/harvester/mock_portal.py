"""Mock source portal serving a paged JSON API and a Turtle dump.

Backed by an in-memory record list or a fixture directory (records.json and
dump.ttl). Fault injection hooks support sync-safety tests.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..httpkit import HttpService, Request, Response, Router


class MockPortal:
    def __init__(
        self,
        records: list[dict] | None = None,
        fixture_dir: str | Path | None = None,
        dump_turtle: str | None = None,
    ):
        if fixture_dir is not None:
            fixture_dir = Path(fixture_dir)
            records = json.loads((fixture_dir / "records.json").read_text(encoding="utf-8"))
            dump_path = fixture_dir / "dump.ttl"
            if dump_turtle is None and dump_path.exists():
                dump_turtle = dump_path.read_text(encoding="utf-8")
        self.records: list[dict] = list(records or [])
        self.dump_turtle = dump_turtle or ""
        self.requests_served = 0
        self._fail_after: int | None = None
        self._lock = threading.Lock()
        self.router = Router(name="portal")
        self.router.route("GET", "/api/datasets", self._page)
        self.router.route("GET", "/dump.ttl", self._dump)
        self._http: HttpService | None = None

    # -- fault injection ------------------------------------------------

    def fail_after(self, n_requests: int | None) -> None:
        """Answer 500 to every API request after the next n."""
        with self._lock:
            self._fail_after = n_requests

    def set_records(self, records: list[dict]) -> None:
        with self._lock:
            self.records = list(records)

    def _should_fail(self) -> bool:
        with self._lock:
            self.requests_served += 1
            if self._fail_after is None:
                return False
            if self._fail_after <= 0:
                return True
            self._fail_after -= 1
            return False

    # -- endpoints ---------------------------------------------------------

    def _page(self, req: Request) -> Response:
        if self._should_fail():
            return Response.error(500, "Injected", "injected portal fault")
        try:
            offset = int(req.query.get("offset", "0"))
            limit = int(req.query.get("limit", "100"))
        except ValueError:
            return Response.error(400, "BadRequest", "offset and limit must be integers")
        with self._lock:
            rows = self.records[offset : offset + limit]
            count = len(self.records)
        return Response.json({"count": count, "results": rows})

    def _dump(self, req: Request) -> Response:
        if self._should_fail():
            return Response.error(500, "Injected", "injected portal fault")
        return Response.text(self.dump_turtle, content_type="text/turtle; charset=utf-8")

    # -- lifecycle -----------------------------------------------------------

    def start(self, host: str = "127.0.0.1", port: int = 0) -> "MockPortal":
        self._http = HttpService(self.router, host, port).start()
        return self

    @property
    def url(self) -> str:
        assert self._http is not None, "portal not started"
        return self._http.url

    @property
    def api_url(self) -> str:
        return f"{self.url}/api/datasets"

    @property
    def dump_url(self) -> str:
        return f"{self.url}/dump.ttl"

    def stop(self) -> None:
        if self._http is not None:
            self._http.stop()
