"""In-memory quad store with named graphs and an N-Quads write-ahead log."""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Iterable

from .serialize import format_term
from .terms import IRI, Quad, Term, Triple
from .turtle import _TurtleParser


def _format_quad(q: Quad) -> str:
    return f"{format_term(q.subject)} {format_term(q.predicate)} {format_term(q.object)} <{q.graph}> ."


def _parse_nquads_line(line: str, lineno: int) -> Quad:
    parser = _TurtleParser(line, base_iri="", line_offset=lineno, ntriples=True)
    parser.skip_ws(comments=False)
    s = parser._nt_subject()
    parser.skip_ws(comments=False)
    p = IRI(parser._scan_iriref())
    parser.skip_ws(comments=False)
    o = parser._nt_object()
    parser.skip_ws(comments=False)
    g = parser._scan_iriref()
    parser.skip_ws(comments=False)
    parser.expect(".")
    return Quad(s, p, o, g)


class QuadStore:
    """Set-semantics quad store indexed by graph, subject, and (pred, obj).

    All mutations are serialized by one lock and, when a data directory is
    configured, appended to a write-ahead log of N-Quads lines. `compact()`
    folds the log into a snapshot; `open()` replays snapshot + log.
    """

    def __init__(self, data_dir: str | Path | None = None, compact_every: int = 500_000):
        self._quads: set[Quad] = set()
        self._by_graph: dict[str, set[Quad]] = {}
        self._by_gs: dict[tuple[str, Term], set[Quad]] = {}
        self._by_gpo: dict[tuple[str, str, Term], set[Quad]] = {}
        self._lock = threading.RLock()
        self._wal = None
        self._wal_lines = 0
        self._compact_every = compact_every
        self._data_dir: Path | None = None
        if data_dir is not None:
            self._data_dir = Path(data_dir)
            self._data_dir.mkdir(parents=True, exist_ok=True)
            self._replay()
            self._wal = open(self._wal_path, "a", encoding="utf-8")

    @property
    def _wal_path(self) -> Path:
        assert self._data_dir is not None
        return self._data_dir / "wal.nq"

    @property
    def _snapshot_path(self) -> Path:
        assert self._data_dir is not None
        return self._data_dir / "snapshot.nq"

    def _replay(self) -> None:
        if self._snapshot_path.exists():
            for lineno, line in enumerate(self._snapshot_path.read_text(encoding="utf-8").splitlines(), 1):
                if line.strip():
                    self._index_add(_parse_nquads_line(line, lineno))
        if self._wal_path.exists():
            for lineno, line in enumerate(self._wal_path.read_text(encoding="utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                op, _, rest = line.partition(" ")
                if op == "A":
                    self._index_add(_parse_nquads_line(rest, lineno))
                elif op == "D":
                    self._index_remove(_parse_nquads_line(rest, lineno))
                elif op == "C":
                    self._clear_graph(rest.strip().lstrip("<").rstrip(">"))

    def _log(self, line: str) -> None:
        if self._wal is not None:
            self._wal.write(line + "\n")
            self._wal_lines += 1

    def _flush(self) -> None:
        if self._wal is not None:
            self._wal.flush()
            if self._wal_lines >= self._compact_every:
                self.compact()

    # -- index maintenance ----------------------------------------------

    def _index_add(self, q: Quad) -> bool:
        if q in self._quads:
            return False
        self._quads.add(q)
        self._by_graph.setdefault(q.graph, set()).add(q)
        self._by_gs.setdefault((q.graph, q.subject), set()).add(q)
        self._by_gpo.setdefault((q.graph, q.predicate.value, q.object), set()).add(q)
        return True

    def _index_remove(self, q: Quad) -> bool:
        if q not in self._quads:
            return False
        self._quads.discard(q)
        for index, key in (
            (self._by_graph, q.graph),
            (self._by_gs, (q.graph, q.subject)),
            (self._by_gpo, (q.graph, q.predicate.value, q.object)),
        ):
            bucket = index.get(key)
            if bucket is not None:
                bucket.discard(q)
                if not bucket:
                    del index[key]
        return True

    def _clear_graph(self, graph: str) -> int:
        quads = list(self._by_graph.get(graph, ()))
        for q in quads:
            self._index_remove(q)
        return len(quads)

    # -- public API ------------------------------------------------------

    def __len__(self) -> int:
        return len(self._quads)

    def add(self, graph: str, triple: Triple) -> bool:
        """Insert one quad; returns False if it was already present."""
        q = Quad(triple[0], triple[1], triple[2], graph)
        with self._lock:
            added = self._index_add(q)
            if added:
                self._log("A " + _format_quad(q))
                self._flush()
            return added

    def add_all(self, graph: str, triples: Iterable[Triple]) -> int:
        with self._lock:
            n = 0
            for t in triples:
                q = Quad(t[0], t[1], t[2], graph)
                if self._index_add(q):
                    self._log("A " + _format_quad(q))
                    n += 1
            self._flush()
            return n

    def remove(self, graph: str, triple: Triple) -> bool:
        q = Quad(triple[0], triple[1], triple[2], graph)
        with self._lock:
            removed = self._index_remove(q)
            if removed:
                self._log("D " + _format_quad(q))
                self._flush()
            return removed

    def delete_graph(self, graph: str) -> int:
        """Remove exactly the quads of one named graph."""
        with self._lock:
            n = self._clear_graph(graph)
            if n:
                self._log(f"C <{graph}>")
                self._flush()
            return n

    def replace_graph(self, graph: str, triples: Iterable[Triple]) -> None:
        """Atomically swap the contents of a named graph."""
        with self._lock:
            self._clear_graph(graph)
            self._log(f"C <{graph}>")
            for t in triples:
                q = Quad(t[0], t[1], t[2], graph)
                if self._index_add(q):
                    self._log("A " + _format_quad(q))
            self._flush()

    def graph(self, graph: str) -> list[Triple]:
        with self._lock:
            return [q.triple for q in self._by_graph.get(graph, ())]

    def has_graph(self, graph: str) -> bool:
        with self._lock:
            return graph in self._by_graph

    def graphs(self) -> list[str]:
        with self._lock:
            return sorted(self._by_graph)

    def match(
        self,
        graph: str | None = None,
        subject: Term | None = None,
        predicate: IRI | None = None,
        obj: Term | None = None,
    ) -> list[Quad]:
        """All quads matching the given concrete positions (None = any)."""
        with self._lock:
            if graph is not None:
                if subject is not None:
                    candidates = self._by_gs.get((graph, subject), set())
                elif predicate is not None and obj is not None:
                    candidates = self._by_gpo.get((graph, predicate.value, obj), set())
                else:
                    candidates = self._by_graph.get(graph, set())
            else:
                candidates = self._quads
            return [
                q
                for q in candidates
                if (subject is None or q.subject == subject)
                and (predicate is None or q.predicate == predicate)
                and (obj is None or q.object == obj)
            ]

    def objects(self, graph: str | None, subject: Term, predicate: IRI) -> list[Term]:
        return [q.object for q in self.match(graph, subject, predicate)]

    def subjects(self, graph: str | None, predicate: IRI, obj: Term) -> list[Term]:
        return [q.subject for q in self.match(graph, None, predicate, obj)]

    # -- persistence ------------------------------------------------------

    def compact(self) -> None:
        """Fold the WAL into a snapshot file."""
        if self._data_dir is None:
            return
        with self._lock:
            lines = sorted(_format_quad(q) for q in self._quads)
            tmp = self._snapshot_path.with_suffix(".tmp")
            tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            tmp.replace(self._snapshot_path)
            if self._wal is not None:
                self._wal.close()
            self._wal = open(self._wal_path, "w", encoding="utf-8")
            self._wal_lines = 0

    def close(self) -> None:
        with self._lock:
            if self._wal is not None:
                self.compact()
                self._wal.close()
                self._wal = None
