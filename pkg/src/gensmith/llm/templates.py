"""Prompt templates: loading, rendering, and classification.

Template bodies live in plain text files with ``{name}`` placeholders. The
shipped defaults cover the seven prompt kinds the orchestrator uses; operators
may point the config at a directory of replacement files with the same names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from gensmith.errors import MissingBinding, UnknownTemplate

TEMPLATE_IDS = (
    "feature_analysis",
    "create_generator",
    "extract_library",
    "rare_feature_extraction",
    "rare_feature_mutation",
    "havoc_mutation",
    "pattern_mutation",
)

# Pseudo-kind for the "<error> Regenerate" turns of the self-debug loop; these
# are not rendered from a template but the mock backend still keys on them.
REGENERATE = "regenerate"

_PLACEHOLDER_RE = re.compile(r"\{([a-z_][a-z0-9_]*)\}")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    body: str

    @property
    def placeholders(self) -> frozenset[str]:
        return frozenset(_PLACEHOLDER_RE.findall(self.body))

    def render(self, bindings: Mapping[str, str]) -> str:
        """Substitute every placeholder; bound values are never re-scanned."""
        def sub(match: re.Match) -> str:
            name = match.group(1)
            if name not in bindings:
                raise MissingBinding(name)
            return str(bindings[name])

        return _PLACEHOLDER_RE.sub(sub, self.body)

    def matches(self, text: str) -> bool:
        """True when ``text`` could have been rendered from this template."""
        parts = [re.escape(p) for p in _PLACEHOLDER_RE.split(self.body)[::2]]
        pattern = "(?s:.*)".join(parts)
        return re.fullmatch(f"(?s:{pattern})", text) is not None


class PromptLibrary:
    """The set of templates a campaign renders prompts from."""

    def __init__(self, templates: dict[str, PromptTemplate]):
        missing = set(TEMPLATE_IDS) - set(templates)
        if missing:
            raise UnknownTemplate(f"template files missing: {sorted(missing)}")
        self._templates = dict(templates)

    @classmethod
    def load(cls, directory: Path | str | None = None) -> "PromptLibrary":
        """Load templates from ``directory``, or the packaged defaults."""
        templates = {}
        if directory is None:
            root = resources.files("gensmith.llm") / "prompts"
            for template_id in TEMPLATE_IDS:
                body = (root / f"{template_id}.txt").read_text(encoding="utf-8")
                templates[template_id] = PromptTemplate(template_id, body)
        else:
            directory = Path(directory)
            for template_id in TEMPLATE_IDS:
                path = directory / f"{template_id}.txt"
                if not path.exists():
                    raise UnknownTemplate(f"template file not found: {path}")
                templates[template_id] = PromptTemplate(template_id, path.read_text(encoding="utf-8"))
        return cls(templates)

    def get(self, template_id: str) -> PromptTemplate:
        try:
            return self._templates[template_id]
        except KeyError:
            raise UnknownTemplate(template_id) from None

    def render(self, template_id: str, bindings: Mapping[str, str]) -> str:
        return self.get(template_id).render(bindings)

    def classify(self, text: str) -> str | None:
        """Return the template id a rendered prompt came from.

        Regeneration turns (self-debug feedback ending in "Regenerate") get the
        pseudo-kind REGENERATE. Unrecognized text returns None.
        """
        for template_id in TEMPLATE_IDS:
            if self._templates[template_id].matches(text):
                return template_id
        if text.rstrip().endswith("Regenerate"):
            return REGENERATE
        return None


def render_prompt(library: PromptLibrary, template_id: str, bindings: Mapping[str, str]) -> str:
    """Render ``template_id`` with ``bindings``; pure function of its inputs."""
    return library.render(template_id, bindings)
