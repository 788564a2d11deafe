"""Service-side pipe runtime: receive, execute, report, forward.

Submissions are acknowledged with 202 before the handler runs, so slow
handlers never block the upstream service. Unreachable successors are retried
with exponential backoff and then reported as a failed run segment.
"""

from __future__ import annotations

import logging
import threading
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable
from urllib.parse import urlparse, unquote

import requests

from ..httpkit import HttpService, Request, Response, Router
from .descriptor import (
    NotAddressedError,
    Payload,
    PipeDescriptor,
    RunStatus,
    Segment,
    forward,
    my_segment,
    parse_descriptor,
)

logger = logging.getLogger(__name__)


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


def resolve_payload_bytes(payload: Payload, timeout: float = 30.0) -> bytes:
    """Inline data, or the bytes behind a file:// or http(s):// dataRef."""
    if payload.data is not None:
        return payload.decoded()
    if payload.dataRef:
        parsed = urlparse(payload.dataRef)
        if parsed.scheme == "file":
            return Path(unquote(parsed.path)).read_bytes()
        if parsed.scheme in ("http", "https"):
            resp = requests.get(payload.dataRef, timeout=timeout)
            resp.raise_for_status()
            return resp.content
        raise ValueError(f"unsupported dataRef scheme: {payload.dataRef}")
    return b""


class StatusReporter:
    """Fire-and-forget run-status posting with local buffering."""

    def __init__(self, runlog_url: str | None, token: str | None = None):
        self.runlog_url = runlog_url
        self.token = token
        self.local: list[RunStatus] = []
        self._buffer: deque[RunStatus] = deque()
        self._lock = threading.Lock()
        self._wake = threading.Event()
        self._stop = False
        self._thread: threading.Thread | None = None
        if runlog_url:
            self._thread = threading.Thread(target=self._drain, name="status-reporter", daemon=True)
            self._thread.start()

    def report(self, status: RunStatus) -> None:
        if not status.timestamp:
            status.timestamp = utcnow_iso()
        with self._lock:
            self.local.append(status)
            if self.runlog_url:
                self._buffer.append(status)
        self._wake.set()

    def _drain(self) -> None:
        session = requests.Session()
        headers = {"Authorization": f"Bearer {self.token}"} if self.token else {}
        while not self._stop:
            self._wake.wait(timeout=0.5)
            self._wake.clear()
            while True:
                with self._lock:
                    if not self._buffer:
                        break
                    status = self._buffer[0]
                try:
                    session.post(
                        self.runlog_url + "/runs/status",
                        json=status.to_json(),
                        headers=headers,
                        timeout=10,
                    )
                except requests.RequestException:
                    # keep buffered, retry on the next wake-up
                    time.sleep(0.2)
                    break
                with self._lock:
                    self._buffer.popleft()

    def flush(self, timeout: float = 5.0) -> None:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if not self._buffer:
                    return
            self._wake.set()
            time.sleep(0.02)

    def stop(self) -> None:
        self.flush()
        self._stop = True
        self._wake.set()


@dataclass
class HandlerResult:
    """Handler outcome controlling forwarding and status reporting.

    `forward=False` means the handler did its own routing (or none);
    `report_status=False` defers the terminal status, e.g. while streaming
    many descriptor copies that share one run segment.
    """

    payload: Payload | None = None
    forward: bool = True
    report_status: bool = True
    message: str = ""


class PipeContext:
    """What a handler sees: its segment, config, payload, and an emitter."""

    def __init__(self, service: "PipeService", descriptor: PipeDescriptor, segment: Segment):
        self.service = service
        self.descriptor = descriptor
        self.segment = segment
        self.config = segment.config
        self.payload = segment.payload

    def payload_bytes(self) -> bytes:
        if self.payload is None:
            return b""
        return resolve_payload_bytes(self.payload)

    def emit(self, payload: Payload | None) -> int:
        """Forward one fresh descriptor copy carrying `payload` to successors.

        Used by streaming handlers that fan a single submission out into many
        per-record copies; the copy sent downstream marks this segment
        processed while the original stays reusable.
        """
        pristine = self.descriptor.copy()
        routed = forward(pristine, self.segment.segmentNumber, payload)
        for target, doc in routed:
            self.service.send(target, doc)
        return len(routed)


Handler = Callable[[PipeContext], "HandlerResult | Payload | None"]


class PipeService:
    """HTTP pipe endpoint wrapping one handler.

    The directory maps serviceId -> base URL and is the only routing
    knowledge a service holds; there is no central coordinator.
    """

    def __init__(
        self,
        service_id: str,
        handler: Handler,
        directory: dict[str, str] | None = None,
        runlog_url: str | None = None,
        token: str | None = None,
        workers: int = 8,
        retry_delays: tuple[float, ...] = (1.0, 2.0, 4.0),
    ):
        self.service_id = service_id
        self.handler = handler
        self.directory = directory if directory is not None else {}
        self.reporter = StatusReporter(runlog_url, token)
        self.retry_delays = retry_delays
        self.pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix=f"pipe-{service_id}")
        self.router = Router(name=service_id, token=token)
        self.router.route("POST", "/pipe", self._receive)
        self._session_local = threading.local()
        self._http: HttpService | None = None

    # -- wire ----------------------------------------------------------

    def _receive(self, req: Request) -> Response:
        try:
            descriptor = parse_descriptor(req.body, require_run_id=True)
        except ValueError as exc:
            return Response.error(400, type(exc).__name__, str(exc))
        try:
            segment = my_segment(descriptor, self.service_id)
        except NotAddressedError as exc:
            return Response.error(400, "NotAddressed", str(exc))
        self.pool.submit(self._execute, descriptor, segment)
        return Response.json(
            {"accepted": True, "runId": descriptor.runId, "segmentNumber": segment.segmentNumber},
            status=202,
        )

    def _execute(self, descriptor: PipeDescriptor, segment: Segment) -> None:
        ctx = PipeContext(self, descriptor, segment)
        try:
            outcome = self.handler(ctx)
        except Exception as exc:
            logger.warning("%s: handler failed on run %s: %s", self.service_id, descriptor.runId, exc)
            self._report(descriptor, segment.segmentNumber, "failed", str(exc))
            return
        if outcome is None or isinstance(outcome, Payload):
            outcome = HandlerResult(payload=outcome)
        if outcome.forward:
            try:
                routed = forward(descriptor, segment.segmentNumber, outcome.payload)
            except Exception as exc:
                self._report(descriptor, segment.segmentNumber, "failed", str(exc))
                return
            for target, doc in routed:
                if not self.send(target, doc):
                    self._report(
                        descriptor,
                        segment.segmentNumber,
                        "failed",
                        f"successor {target!r} unreachable",
                    )
                    return
        if outcome.report_status:
            self._report(descriptor, segment.segmentNumber, "succeeded", outcome.message)

    def _report(self, descriptor: PipeDescriptor, segment_number: int, state: str, message: str = "") -> None:
        self.reporter.report(
            RunStatus(
                runId=descriptor.runId or "",
                pipeId=descriptor.pipeId,
                segmentNumber=segment_number,
                state=state,
                message=message,
            )
        )

    def _session(self) -> requests.Session:
        session = getattr(self._session_local, "session", None)
        if session is None:
            session = requests.Session()
            self._session_local.session = session
        return session

    def send(self, target_service_id: str, descriptor: PipeDescriptor) -> bool:
        """POST a descriptor to the target service, retrying with backoff."""
        base = self.directory.get(target_service_id)
        if base is None:
            logger.warning("%s: no address for service %r", self.service_id, target_service_id)
            return False
        url = base.rstrip("/") + "/pipe"
        attempts = len(self.retry_delays) + 1
        for attempt in range(attempts):
            try:
                resp = self._session().post(url, data=descriptor.dumps().encode("utf-8"), timeout=30)
                if resp.status_code < 500:
                    return resp.status_code < 400
            except requests.RequestException:
                pass
            if attempt < len(self.retry_delays):
                time.sleep(self.retry_delays[attempt])
        return False

    # -- lifecycle -----------------------------------------------------

    def start(self, host: str = "127.0.0.1", port: int = 0) -> "PipeService":
        self._http = HttpService(self.router, host, port).start()
        return self

    @property
    def url(self) -> str:
        assert self._http is not None, "service not started"
        return self._http.url

    def stop(self) -> None:
        if self._http is not None:
            self._http.stop()
        self.pool.shutdown(wait=True)
        self.reporter.stop()
