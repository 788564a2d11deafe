"""Registry export and end-of-run synchronization."""

from __future__ import annotations

import logging
import threading
from urllib.parse import quote

import requests

from .records import IdentifierList

logger = logging.getLogger(__name__)


class RegistryError(RuntimeError):
    """Registry answered with a non-2xx status."""


class RegistryClient:
    """Thin HTTP client for the registry's write and listing surface."""

    def __init__(self, base_url: str, token: str | None = None, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._headers = {"Authorization": f"Bearer {token}"} if token else {}
        self._local = threading.local()

    def _session(self) -> requests.Session:
        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            self._local.session = session
        return session

    def put_dataset(self, catalogue_id: str, original_id: str, turtle: str) -> str:
        url = f"{self.base_url}/datasets/{quote(original_id, safe='')}?catalogue={quote(catalogue_id)}"
        try:
            resp = self._session().put(
                url,
                data=turtle.encode("utf-8"),
                headers={**self._headers, "Content-Type": "text/turtle"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise RegistryError(f"registry unreachable: {exc}") from exc
        if resp.status_code not in (200, 201):
            raise RegistryError(f"PUT dataset {original_id!r} answered {resp.status_code}: {resp.text[:200]}")
        return resp.json().get("result", "updated")

    def put_catalogue(self, catalogue_id: str, turtle: str = "") -> None:
        try:
            resp = self._session().put(
                f"{self.base_url}/catalogues/{quote(catalogue_id)}",
                data=turtle.encode("utf-8"),
                headers={**self._headers, "Content-Type": "text/turtle"},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise RegistryError(f"registry unreachable: {exc}") from exc
        if resp.status_code not in (200, 201):
            raise RegistryError(f"PUT catalogue answered {resp.status_code}")

    def list_ids(self, catalogue_id: str, page_size: int = 500) -> dict[str, str]:
        """originalId -> id for every dataset of the catalogue."""
        out: dict[str, str] = {}
        page = 0
        while True:
            url = f"{self.base_url}/catalogues/{quote(catalogue_id)}/datasets?page={page}&pageSize={page_size}"
            try:
                resp = self._session().get(url, timeout=self.timeout)
            except requests.RequestException as exc:
                raise RegistryError(f"registry unreachable: {exc}") from exc
            if resp.status_code != 200:
                raise RegistryError(f"listing answered {resp.status_code}")
            payload = resp.json()
            for row in payload["datasets"]:
                out[row["originalId"]] = row["id"]
            if (page + 1) * page_size >= payload["total"]:
                return out
            page += 1

    def delete_dataset(self, dataset_id: str) -> None:
        try:
            resp = self._session().delete(
                f"{self.base_url}/datasets/{quote(dataset_id, safe='')}",
                headers=self._headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise RegistryError(f"registry unreachable: {exc}") from exc
        if resp.status_code not in (204, 404):
            raise RegistryError(f"DELETE answered {resp.status_code}")


def finalize_sync(client: RegistryClient, id_list: IdentifierList, allow_empty: bool = False) -> dict:
    """Delete registry datasets that vanished from the source.

    A zero-id list is refused unless explicitly allowed: an empty source is
    more often an upstream fault than a genuine total wipe.
    """
    existing = client.list_ids(id_list.catalogueId)
    if not id_list.sourceIds and not allow_empty:
        logger.warning(
            "refusing empty-id sync for catalogue %s (%d datasets kept)",
            id_list.catalogueId,
            len(existing),
        )
        return {"kept": len(existing), "deleted": 0, "refusedEmptySync": True}
    keep = set(id_list.sourceIds)
    deleted = 0
    for original_id, dataset_id in sorted(existing.items()):
        if original_id not in keep:
            client.delete_dataset(dataset_id)
            deleted += 1
    return {"kept": len(existing) - deleted, "deleted": deleted, "refusedEmptySync": False}
