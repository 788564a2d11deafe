"""Minimal threaded HTTP server with path-pattern routing.

Each suite service owns one Router bound to its own listen address. Handlers
receive a Request and return a Response; JSON helpers cover the common case.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable
from urllib.parse import parse_qs, unquote, urlsplit

logger = logging.getLogger(__name__)


@dataclass
class Request:
    method: str
    path: str
    params: dict[str, str]
    query: dict[str, str]
    headers: dict[str, str]
    body: bytes

    def json(self):
        return json.loads(self.body.decode("utf-8"))

    def text(self) -> str:
        return self.body.decode("utf-8")

    def bearer_token(self) -> str | None:
        auth = self.headers.get("authorization", "")
        if auth.lower().startswith("bearer "):
            return auth[7:].strip()
        return None


@dataclass
class Response:
    status: int = 200
    body: bytes = b""
    content_type: str = "application/json"
    headers: dict[str, str] = field(default_factory=dict)

    @classmethod
    def json(cls, payload, status: int = 200) -> "Response":
        return cls(status, json.dumps(payload).encode("utf-8"), "application/json")

    @classmethod
    def text(cls, body: str, status: int = 200, content_type: str = "text/plain; charset=utf-8") -> "Response":
        return cls(status, body.encode("utf-8"), content_type)

    @classmethod
    def error(cls, status: int, code: str, message: str) -> "Response":
        return cls.json({"error": code, "message": message}, status)


Handler = Callable[[Request], Response]


class Router:
    """Maps (method, /path/{param}/...) patterns to handlers."""

    def __init__(self, name: str = "service", token: str | None = None):
        self.name = name
        self.token = token
        self._routes: list[tuple[str, re.Pattern, Handler, bool]] = []
        self.route("GET", "/health", lambda req: Response.json({"status": "ok", "service": self.name}))

    def route(self, method: str, pattern: str, handler: Handler, protected: bool = False) -> None:
        regex = re.compile(
            "^" + re.sub(r"\{([a-zA-Z]+)\}", r"(?P<\1>[^/]+)", pattern) + "$"
        )
        self._routes.append((method.upper(), regex, handler, protected))

    def dispatch(self, method: str, path: str, query: dict, headers: dict, body: bytes) -> Response:
        matched_path = False
        for m, regex, handler, protected in self._routes:
            match = regex.match(path)
            if not match:
                continue
            matched_path = True
            if m != method.upper():
                continue
            params = {k: unquote(v) for k, v in match.groupdict().items()}
            req = Request(method.upper(), path, params, query, headers, body)
            if protected and self.token is not None and req.bearer_token() != self.token:
                return Response.error(401, "Unauthorized", "missing or invalid bearer token")
            try:
                return handler(req)
            except Exception:
                logger.exception("%s: handler error on %s %s", self.name, method, path)
                return Response.error(500, "InternalError", "unexpected server error")
        if matched_path:
            if method.upper() == "HEAD":
                return self.dispatch("GET", path, query, headers, body)
            return Response.error(405, "MethodNotAllowed", f"{method} not allowed on {path}")
        return Response.error(404, "NotFound", f"no route for {path}")


class HttpService:
    """One Router bound to one listener, served by a daemon thread pool."""

    def __init__(self, router: Router, host: str = "127.0.0.1", port: int = 0):
        self.router = router
        outer = self

        class _Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet by default
                logger.debug("%s %s", outer.router.name, fmt % args)

            def _serve(self):
                parts = urlsplit(self.path)
                query = {k: v[0] for k, v in parse_qs(parts.query).items()}
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                headers = {k.lower(): v for k, v in self.headers.items()}
                resp = outer.router.dispatch(self.command, parts.path, query, headers, body)
                self.send_response(resp.status)
                self.send_header("Content-Type", resp.content_type)
                self.send_header("Content-Length", str(len(resp.body)))
                for k, v in resp.headers.items():
                    self.send_header(k, v)
                self.end_headers()
                if resp.body and self.command != "HEAD":
                    self.wfile.write(resp.body)

            do_GET = do_POST = do_PUT = do_DELETE = do_HEAD = _serve

        try:
            self.server = ThreadingHTTPServer((host, port), _Handler)
        except OSError as exc:
            raise AddressInUseError(f"cannot bind {host}:{port}: {exc}") from exc
        self.server.daemon_threads = True
        self.host = host
        self.port = self.server.server_address[1]
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def start(self) -> "HttpService":
        self._thread = threading.Thread(target=self.server.serve_forever, name=f"http-{self.router.name}", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()


class AddressInUseError(OSError):
    """Listen address already bound by another process or service."""
