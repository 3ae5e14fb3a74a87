"""File-format feature extraction and storage.

The catalog holds the features known per format: the initial batch from the
format analysis prompt, plus rare features discovered once per campaign when
fuzzing first enters the loop. (format, name) pairs are unique, compared
case-insensitively with whitespace normalized.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from gensmith.errors import UnparseableReply
from gensmith.llm.gateway import Dialogue, LLMGateway
from gensmith.llm.templates import PromptLibrary

logger = logging.getLogger(__name__)

_ITEM_RE = re.compile(r"^\s*\d+[.)]\s*(.+)$")


@dataclass(frozen=True)
class Feature:
    name: str
    description: str
    format: str
    origin: str  # "initial" | "rare"

    @property
    def label(self) -> str:
        return f"{self.name}: {self.description}" if self.description else self.name


def _normalize(name: str) -> str:
    return " ".join(name.split()).lower()


def parse_numbered_features(text: str) -> list[tuple[str, str]]:
    """Parse "N. Name: description" lines; "N. Name - description" also works.

    Items without a separator get an empty description. Returns [] when no
    numbered items are present.
    """
    items = []
    for line in text.splitlines():
        match = _ITEM_RE.match(line)
        if not match:
            continue
        body = match.group(1).strip()
        if ":" in body:
            name, desc = body.split(":", 1)
        elif " - " in body:
            name, desc = body.split(" - ", 1)
        else:
            name, desc = body, ""
        name = name.strip()
        if name:
            items.append((name, desc.strip()))
    return items


class FeatureCatalog:
    """Per-format ordered feature lists; append-only during a campaign."""

    def __init__(self):
        self._by_format: dict[str, list[Feature]] = {}

    def known(self, fmt: str) -> list[Feature]:
        return list(self._by_format.get(fmt, []))

    def has(self, fmt: str, name: str) -> bool:
        key = _normalize(name)
        return any(_normalize(f.name) == key for f in self._by_format.get(fmt, []))

    def add(self, feature: Feature) -> bool:
        """Append if the (format, name) pair is new; returns True when added."""
        if self.has(feature.format, feature.name):
            return False
        self._by_format.setdefault(feature.format, []).append(feature)
        return True

    def serialize_known(self, fmt: str) -> str:
        """Stable "i. name: description" rendering in catalog order."""
        lines = [f"{i}. {f.name}: {f.description}"
                 for i, f in enumerate(self._by_format.get(fmt, []), start=1)]
        return "\n".join(lines)

    def to_dict(self) -> list[dict]:
        return [
            {"name": f.name, "description": f.description, "format": f.format, "origin": f.origin}
            for feats in self._by_format.values() for f in feats
        ]

    @classmethod
    def from_dict(cls, raw: list[dict]) -> "FeatureCatalog":
        catalog = cls()
        for item in raw or []:
            catalog.add(Feature(item["name"], item["description"], item["format"], item["origin"]))
        return catalog

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureCatalog) and self._by_format == other._by_format


def analyze_features(gateway: LLMGateway, library: PromptLibrary,
                     catalog: FeatureCatalog, fmt: str,
                     limit: int | None = None) -> list[Feature]:
    """Ask for the format's feature list and record it with origin=initial."""
    dialogue = Dialogue()
    dialogue.add_user(library.render("feature_analysis", {"format": fmt}))
    completion = gateway.complete(dialogue)
    items = parse_numbered_features(completion.text)
    if not items:
        raise UnparseableReply(f"no numbered feature lines in reply for {fmt!r}")
    if limit is not None:
        items = items[:limit]
    added = []
    for name, desc in items:
        feature = Feature(name, desc, fmt, "initial")
        if catalog.add(feature):
            added.append(feature)
    return added


def discover_rare_features(gateway: LLMGateway, library: PromptLibrary,
                           catalog: FeatureCatalog, fmt: str,
                           limit: int | None = None) -> list[Feature]:
    """Ask for features beyond the known set; record them with origin=rare.

    Names already in the catalog are dropped, so adversarial replies echoing
    the known list produce nothing. An empty reply list is a valid result.
    """
    dialogue = Dialogue()
    dialogue.add_user(library.render("rare_feature_extraction", {
        "format": fmt,
        "known_features": catalog.serialize_known(fmt),
    }))
    completion = gateway.complete(dialogue)
    items = parse_numbered_features(completion.text)
    if limit is not None:
        items = items[:limit]
    added = []
    for name, desc in items:
        feature = Feature(name, desc, fmt, "rare")
        if catalog.add(feature):
            added.append(feature)
    return added
