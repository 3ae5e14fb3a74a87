"""Bridge between the orchestrator and a mutation-based fuzzer.

The bridge never reaches into the fuzzer process: it reads the key:value
stats file to decide Init/Progress/Stall, drops harvested seeds into the
corpus directory under provenance-encoding filenames, and resolves new-find
reports back to the component that contributed the seed lineage.
"""

from __future__ import annotations

import enum
import hashlib
import logging
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from gensmith.errors import MalformedStats
from gensmith.sandbox import SeedBatch

logger = logging.getLogger(__name__)

PROVENANCE_DEPTH_CAP = 64

# Provenance classes.
INITIAL = "initial"
SYNTHESIS = "synthesis"
MUTATION = "mutation"
FUZZER = "fuzzer"
UNKNOWN = "fuzzer-origin-unknown"

DEFAULT_STATS_KEYS = {
    "edges_found": "edges_found",
    "execs_done": "execs_done",
    "last_find_unix": "last_find",
    "queue_size": "corpus_count",
}

_CORPUS_NAME_RE = re.compile(r"^(gen_([0-9a-f]{16})|init)_(\d+)_([0-9a-f]{8})\.")


class FuzzState(enum.Enum):
    INIT = "init"
    PROGRESS = "progress"
    STALL = "stall"


@dataclass(frozen=True)
class CoverageSnapshot:
    edges_found: int
    execs_done: int
    last_find_unix: float
    queue_size: int


def parse_stats(stats_text: str, key_map: dict[str, str] | None = None) -> CoverageSnapshot:
    """Extract a snapshot from a fuzzer's "key : value" stats file content.

    Unknown keys are ignored; any of the four mapped keys missing raises.
    """
    key_map = key_map or DEFAULT_STATS_KEYS
    values: dict[str, str] = {}
    for line in stats_text.splitlines():
        if ":" not in line:
            continue
        key, _, value = line.partition(":")
        values[key.strip()] = value.strip()
    fields = {}
    for field_name, stats_key in key_map.items():
        if stats_key not in values:
            raise MalformedStats(f"stats key {stats_key!r} missing")
        try:
            fields[field_name] = float(values[stats_key])
        except ValueError as exc:
            raise MalformedStats(f"stats key {stats_key!r} not numeric") from exc
    return CoverageSnapshot(
        edges_found=int(fields["edges_found"]),
        execs_done=int(fields["execs_done"]),
        last_find_unix=fields["last_find_unix"],
        queue_size=int(fields["queue_size"]),
    )


def poll_state(snapshot: CoverageSnapshot, now: float, stall_threshold_secs: float,
               first_poll: bool) -> FuzzState:
    """Pure state decision: Init on the first poll, else Stall past the threshold."""
    if stall_threshold_secs <= 0:
        raise ValueError("stall threshold must be positive")
    if first_poll:
        return FuzzState.INIT
    if (now - snapshot.last_find_unix) > stall_threshold_secs:
        return FuzzState.STALL
    return FuzzState.PROGRESS


def content_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def parse_corpus_filename(name: str) -> tuple[str, str | None]:
    """Map a corpus filename back to (provenance prefix class, generator id16).

    Returns ("gen", id16) for generator-produced seeds, ("init", None) for
    initial seeds, and ("fuzzer", None) for anything else.
    """
    match = _CORPUS_NAME_RE.match(name)
    if not match:
        return (FUZZER, None)
    if match.group(1) == "init":
        return (INITIAL, None)
    return ("gen", match.group(2))


@dataclass
class ProvenanceRecord:
    cls: str  # INITIAL | SYNTHESIS | MUTATION | FUZZER
    generator_id: str | None = None
    parent: str | None = None  # FUZZER entries: the queue entry it was mutated from

    def to_dict(self) -> dict:
        return {"cls": self.cls, "generator_id": self.generator_id, "parent": self.parent}

    @classmethod
    def from_dict(cls, raw: dict) -> "ProvenanceRecord":
        return cls(raw["cls"], raw.get("generator_id"), raw.get("parent"))


class ProvenanceIndex:
    """Total map over injected and fuzzer-created corpus entries."""

    def __init__(self):
        self.records: dict[str, ProvenanceRecord] = {}
        self.content_hashes: set[str] = set()

    def has_content(self, digest: str) -> bool:
        return digest in self.content_hashes

    def add(self, filename: str, record: ProvenanceRecord,
            digest: str | None = None) -> None:
        existing = self.records.get(filename)
        if existing is not None and existing != record:
            raise ValueError(f"corpus filename {filename!r} already mapped")
        self.records[filename] = record
        if digest:
            self.content_hashes.add(digest)

    def resolve(self, filename: str) -> tuple[str, str | None]:
        """Walk fuzzer-entry parents to a terminal class, capped in depth."""
        name = filename
        for _ in range(PROVENANCE_DEPTH_CAP):
            record = self.records.get(name)
            if record is None:
                return (UNKNOWN, None)
            if record.cls != FUZZER:
                return (record.cls, record.generator_id)
            if record.parent is None or record.parent == name:
                return (UNKNOWN, None)
            name = record.parent
        return (UNKNOWN, None)

    def to_dict(self) -> dict:
        return {
            "records": {n: r.to_dict() for n, r in sorted(self.records.items())},
            "content_hashes": sorted(self.content_hashes),
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ProvenanceIndex":
        index = cls()
        for name, rec in (raw.get("records") or {}).items():
            index.records[name] = ProvenanceRecord.from_dict(rec)
        index.content_hashes = set(raw.get("content_hashes") or [])
        return index


@dataclass(frozen=True)
class NewFind:
    """One new-coverage event: the credited entry and the entry it came from."""

    entry: str
    source: str | None


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write via temp file + rename so readers never observe a torn file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class FuzzerBridge:
    """Seed injection and new-path attribution against one corpus directory."""

    def __init__(self, corpus_dir: Path, index: ProvenanceIndex):
        self.corpus_dir = Path(corpus_dir)
        self.index = index
        self.corpus_dir.mkdir(parents=True, exist_ok=True)

    def inject(self, batch: SeedBatch) -> list[str]:
        """Write a batch into the corpus; content-identical seeds are skipped.

        Filenames encode provenance (gen_<id16>_<ord>_<hash8> / init_...), so
        a batch re-injected after a crash lands on the same names and the
        content-hash check makes the whole operation idempotent.
        """
        written = []
        cls_map = {"synthesis": SYNTHESIS, "mutation": MUTATION, "initial": INITIAL}
        cls = cls_map[batch.provenance.phase]
        for content, filename in batch.seeds:
            digest = content_hash(content)
            if self.index.has_content(digest):
                continue
            atomic_write_bytes(self.corpus_dir / filename, content)
            self.index.add(filename, ProvenanceRecord(cls, batch.provenance.generator_id),
                           digest=digest)
            written.append(filename)
        return written

    def attribute(self, report: list[NewFind],
                  on_mutation_hit: Callable[[str], None] | None = None) -> dict[str, int]:
        """Resolve each credited entry to a provenance class and count it.

        Every report item lands in exactly one class, so the counts always
        sum to len(report). Fuzzer-created entries are registered as they
        appear so later finds can resolve through them; mutation-class hits
        fire the pattern-recording callback with the generator id.
        """
        counts = {INITIAL: 0, SYNTHESIS: 0, MUTATION: 0, UNKNOWN: 0}
        for find in report:
            if find.entry not in self.index.records:
                # A fuzzer-created entry we have not seen: track its ancestry.
                self.index.add(find.entry, ProvenanceRecord(FUZZER, parent=find.source))
            start = find.entry if find.source is None else find.source
            cls, generator_id = self.index.resolve(start)
            counts[cls] += 1
            if cls == MUTATION and generator_id and on_mutation_hit is not None:
                on_mutation_hit(generator_id)
        return counts
