"""Checksummed atomic JSON state files.

Campaign state is one JSON document written via temp-file + rename, with an
embedded checksum over the canonical payload. A mismatch means the file was
tampered with or torn by something other than us, and loading refuses to
proceed rather than silently resetting the campaign.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from gensmith.bridge import atomic_write_bytes
from gensmith.errors import CorruptState


def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_state(path: Path, payload: dict) -> None:
    document = {"checksum": _payload_checksum(payload), "payload": payload}
    atomic_write_bytes(Path(path), json.dumps(document, sort_keys=True).encode("utf-8"))


def load_state(path: Path) -> dict | None:
    """Load a state file; None when absent, CorruptState when damaged."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
        checksum = document["checksum"]
        payload = document["payload"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorruptState(f"unreadable state file {path}: {exc}") from exc
    if _payload_checksum(payload) != checksum:
        raise CorruptState(f"checksum mismatch in {path}")
    return payload
