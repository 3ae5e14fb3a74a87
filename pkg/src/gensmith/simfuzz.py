"""A deterministic in-process stand-in for an external mutation fuzzer.

The target is modeled as a map from input bytes to a set of edge ids, each
edge gated on byte-pattern conditions. The fuzzer keeps a queue of corpus
entries, mutates them with seeded random byte flips and insertions, and
records a new queue entry whenever an input reaches uncovered edges.

State advances in atomic batches committed to disk (corpus files first, then
a single state-file rename), so a campaign killed at any point resumes to an
identical trajectory: a replayed batch re-derives its RNG from (seed, batch
index) over the same committed queue. Files matching the fuzzer's own
``fuzz_*`` naming are ignored by the import scan unless they are already in
the committed queue; they can only be uncommitted leftovers that the replay
will regenerate byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

from gensmith.bridge import NewFind, atomic_write_bytes, content_hash

logger = logging.getLogger(__name__)

FUZZ_ENTRY_PREFIX = "fuzz_"
STATS_FILENAME = "fuzzer_stats"
STATE_FILENAME = "fuzzer_state.json"


def derive_seed(seed: int, *parts: object) -> int:
    h = hashlib.blake2b(digest_size=16)
    h.update(str(seed).encode("utf-8"))
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class Condition:
    kind: str  # "contains" | "nonzero_at" | "nonzero_after"
    pattern: bytes = b""
    offset: int = 0

    def check(self, data: bytes) -> bool:
        if self.kind == "contains":
            return self.pattern in data
        if self.kind == "nonzero_at":
            return len(data) > self.offset and data[self.offset] != 0
        if self.kind == "nonzero_after":
            pos = data.find(self.pattern)
            if pos < 0:
                return False
            idx = pos + len(self.pattern) + self.offset
            return len(data) > idx and data[idx] != 0
        raise ValueError(f"unknown condition kind {self.kind!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "Condition":
        if "contains" in raw:
            return cls("contains", pattern=bytes.fromhex(raw["contains"]))
        if "nonzero_at" in raw:
            return cls("nonzero_at", offset=int(raw["nonzero_at"]))
        if "nonzero_after" in raw:
            spec = raw["nonzero_after"]
            return cls("nonzero_after", pattern=bytes.fromhex(spec["pattern"]),
                       offset=int(spec.get("offset", 0)))
        raise ValueError(f"unknown condition spec {raw!r}")


@dataclass(frozen=True)
class EdgeRule:
    edge: int
    conditions: tuple[Condition, ...]

    def fires(self, data: bytes) -> bool:
        return all(c.check(data) for c in self.conditions)

    @classmethod
    def from_dict(cls, raw: dict) -> "EdgeRule":
        return cls(int(raw["edge"]),
                   tuple(Condition.from_dict(c) for c in raw["require"]))


class EdgeMap:
    def __init__(self, rules: list[EdgeRule]):
        self.rules = list(rules)

    @classmethod
    def from_config(cls, raw_rules: list[dict]) -> "EdgeMap":
        return cls([EdgeRule.from_dict(r) for r in raw_rules])

    @property
    def total_edges(self) -> int:
        return len({r.edge for r in self.rules})

    def evaluate(self, data: bytes) -> set[int]:
        return {r.edge for r in self.rules if r.fires(data)}


class SimulatedFuzzer:
    """Batch-stepped coverage fuzzer over a shared corpus directory."""

    def __init__(self, home: Path, corpus_dir: Path, edge_map: EdgeMap,
                 rng_seed: int, batch_execs: int = 100, batch_seconds: float = 10.0,
                 max_input_bytes: int = 4096):
        self.home = Path(home)
        self.corpus_dir = Path(corpus_dir)
        self.edge_map = edge_map
        self.rng_seed = rng_seed
        self.batch_execs = batch_execs
        self.batch_seconds = batch_seconds
        self.max_input_bytes = max_input_bytes
        self.home.mkdir(parents=True, exist_ok=True)
        self.corpus_dir.mkdir(parents=True, exist_ok=True)

        # Mutable state, committed per batch.
        self.exec_count = 0
        self.sim_time = 0.0
        self.covered: set[int] = set()
        self.queue: list[str] = []
        self.last_find = 0.0
        self.batch_index = 0
        self.events: list[tuple[int, str, str]] = []  # (seq, entry, source)
        self.next_seq = 0
        self._contents: dict[str, bytes] = {}

        self._load()
        self._write_stats()

    # -- persistence ---------------------------------------------------------

    @property
    def state_path(self) -> Path:
        return self.home / STATE_FILENAME

    @property
    def stats_path(self) -> Path:
        return self.home / STATS_FILENAME

    def _load(self) -> None:
        if not self.state_path.exists():
            return
        raw = json.loads(self.state_path.read_text(encoding="utf-8"))
        self.exec_count = raw["exec_count"]
        self.sim_time = raw["sim_time"]
        self.covered = set(raw["covered"])
        self.queue = list(raw["queue"])
        self.last_find = raw["last_find"]
        self.batch_index = raw["batch_index"]
        self.events = [tuple(e) for e in raw["events"]]
        self.next_seq = raw["next_seq"]
        for name in self.queue:
            self._contents[name] = (self.corpus_dir / name).read_bytes()

    def _commit(self) -> None:
        payload = {
            "exec_count": self.exec_count,
            "sim_time": self.sim_time,
            "covered": sorted(self.covered),
            "queue": self.queue,
            "last_find": self.last_find,
            "batch_index": self.batch_index,
            "events": [list(e) for e in self.events],
            "next_seq": self.next_seq,
        }
        atomic_write_bytes(self.state_path,
                           json.dumps(payload, sort_keys=True).encode("utf-8"))
        self._write_stats()

    def _write_stats(self) -> None:
        text = (
            f"edges_found : {len(self.covered)}\n"
            f"execs_done : {self.exec_count}\n"
            f"last_find : {self.last_find}\n"
            f"corpus_count : {len(self.queue)}\n"
        )
        atomic_write_bytes(self.stats_path, text.encode("utf-8"))

    # -- fuzzing -------------------------------------------------------------

    def _record_find(self, data: bytes, entry: str, source: str, found_at: float) -> None:
        self.events.append((self.next_seq, entry, source))
        self.next_seq += 1
        self.last_find = found_at
        if entry not in self._contents:
            self._contents[entry] = data
            self.queue.append(entry)

    def _import_new_seeds(self, found_at: float) -> None:
        known = set(self.queue)
        for path in sorted(self.corpus_dir.iterdir()):
            name = path.name
            if name in known or name.startswith(".") or not path.is_file():
                continue
            if name.startswith(FUZZ_ENTRY_PREFIX):
                continue  # uncommitted leftover of our own; the batch replay recreates it
            data = path.read_bytes()
            self.exec_count += 1
            edges = self.edge_map.evaluate(data)
            new = edges - self.covered
            self.queue.append(name)
            self._contents[name] = data
            if new:
                self.covered |= new
                self.events.append((self.next_seq, name, name))
                self.next_seq += 1
                self.last_find = found_at

    def _mutate(self, data: bytes, rng: random.Random) -> bytes:
        buf = bytearray(data)
        if not buf:
            buf = bytearray(rng.randbytes(rng.randrange(1, 8)))
        if rng.random() < 0.25 and len(buf) < self.max_input_bytes:
            pos = rng.randrange(len(buf) + 1)
            buf[pos:pos] = rng.randbytes(rng.randrange(1, 5))
        else:
            for _ in range(rng.randrange(1, 5)):
                buf[rng.randrange(len(buf))] = rng.randrange(256)
        return bytes(buf[:self.max_input_bytes])

    def run_batch(self) -> None:
        """Advance one committed batch: import foreign seeds, then mutate."""
        end_time = self.sim_time + self.batch_seconds
        self._import_new_seeds(end_time)
        rng = random.Random(derive_seed(self.rng_seed, "batch", self.batch_index))
        for _ in range(self.batch_execs):
            self.exec_count += 1
            if not self.queue:
                continue
            parent = self.queue[rng.randrange(len(self.queue))]
            data = self._mutate(self._contents[parent], rng)
            new = self.edge_map.evaluate(data) - self.covered
            if new:
                self.covered |= new
                name = f"{FUZZ_ENTRY_PREFIX}{self.next_seq:06d}_{content_hash(data)[:8]}"
                atomic_write_bytes(self.corpus_dir / name, data)
                self._record_find(data, name, parent, end_time)
        self.sim_time = end_time
        self.batch_index += 1
        self._commit()

    # -- campaign-facing interface -------------------------------------------

    def stats_text(self) -> str:
        return self.stats_path.read_text(encoding="utf-8")

    def events_after(self, cursor: int) -> list[NewFind]:
        return [NewFind(entry, source) for seq, entry, source in self.events
                if seq >= cursor]

    def last_seq(self) -> int:
        return self.next_seq
