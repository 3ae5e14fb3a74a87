"""Generator mutation strategies and the useful-pattern database.

Three mutators operate on existing valid generators: rare-feature directed
mutation (init phase only), havoc mutation along a feature or structure axis,
and pattern-based mutation that replays a previously successful
(original, mutated) script pair as an in-context example. Mutated scripts go
through the forge's self-debug routine before joining the database.
"""

from __future__ import annotations

import enum
import logging
import random
import re

from gensmith.errors import EmptyDatabase, LineageMismatch
from gensmith.features import Feature
from gensmith.forge import MUTATED, Generator, GeneratorDB, GeneratorForge
from gensmith.llm.gateway import Dialogue, extract_code_block

logger = logging.getLogger(__name__)

_HAVOC_MARKER_RE = re.compile(r"^(havoc|pattern):(\d+)$")


class MutatorKind(str, enum.Enum):
    RARE_FEATURE = "rare_feature"
    HAVOC_FEATURE = "havoc_feature"
    HAVOC_STRUCTURE = "havoc_structure"
    PATTERN = "pattern"


class MutationPattern:
    """An (original script, mutated script) pair that produced a useful seed."""

    def __init__(self, original_script: str, mutated_script: str, format: str,
                 hit_count: int = 1):
        if original_script == mutated_script:
            raise ValueError("a pattern must change the script")
        self.original_script = original_script
        self.mutated_script = mutated_script
        self.format = format
        self.hit_count = hit_count

    def key(self) -> tuple[str, str]:
        return (self.original_script, self.mutated_script)


class PatternDB:
    """Append-only per-format list of useful mutation patterns."""

    def __init__(self):
        self._by_format: dict[str, list[MutationPattern]] = {}

    def patterns_for(self, fmt: str) -> list[MutationPattern]:
        return list(self._by_format.get(fmt, []))

    def is_empty(self, fmt: str) -> bool:
        return not self._by_format.get(fmt)

    def size(self) -> int:
        return sum(len(v) for v in self._by_format.values())

    def record(self, original: Generator, mutated: Generator) -> None:
        """Record an attributed useful mutation, or bump its hit count.

        Attribution events for root-lineage (synthesis-phase) seeds are a
        no-op; a mutated generator whose parent is not ``original`` is a
        caller bug and raises.
        """
        if mutated.lineage.kind != MUTATED:
            return
        if mutated.lineage.parent_id != original.id:
            raise LineageMismatch(
                f"{mutated.id[:16]} descends from {mutated.lineage.parent_id!r}, "
                f"not {original.id!r}")
        for pattern in self._by_format.get(mutated.format, []):
            if pattern.key() == (original.script, mutated.script):
                pattern.hit_count += 1
                return
        self._by_format.setdefault(mutated.format, []).append(
            MutationPattern(original.script, mutated.script, mutated.format))

    def to_dict(self) -> list[dict]:
        return [{
            "original_script": p.original_script, "mutated_script": p.mutated_script,
            "format": p.format, "hit_count": p.hit_count,
        } for patterns in self._by_format.values() for p in patterns]

    @classmethod
    def from_dict(cls, raw: list[dict]) -> "PatternDB":
        db = cls()
        for item in raw or []:
            db._by_format.setdefault(item["format"], []).append(MutationPattern(
                item["original_script"], item["mutated_script"],
                item["format"], item["hit_count"],
            ))
        return db


def select_generator(db: GeneratorDB, fmt: str, rng: random.Random) -> Generator:
    """Uniform random choice over the format's valid generators."""
    candidates = db.valid_for(fmt)
    if not candidates:
        raise EmptyDatabase(f"no valid generators for format {fmt!r}")
    return candidates[rng.randrange(len(candidates))]


def choose_mutator(rng: random.Random, pattern_db: PatternDB, phase: str,
                   fmt: str) -> MutatorKind:
    """Pick the mutator for a phase.

    Init always uses rare-feature mutation. Stall picks uniformly among the
    havoc axes and pattern mutation, skipping pattern while no useful pattern
    has been recorded for the format yet.
    """
    if phase == "init":
        return MutatorKind.RARE_FEATURE
    choices = [MutatorKind.HAVOC_FEATURE, MutatorKind.HAVOC_STRUCTURE]
    if not pattern_db.is_empty(fmt):
        choices.append(MutatorKind.PATTERN)
    return choices[rng.randrange(len(choices))]


def select_pattern(pattern_db: PatternDB, fmt: str, rng: random.Random) -> MutationPattern:
    patterns = pattern_db.patterns_for(fmt)
    if not patterns:
        raise EmptyDatabase(f"no patterns recorded for format {fmt!r}")
    return patterns[rng.randrange(len(patterns))]


class MutationEngine:
    """Routes mutated scripts through self-debug and into the database."""

    def __init__(self, forge: GeneratorForge, pattern_db: PatternDB):
        self.forge = forge
        self.db = forge.db
        self.pattern_db = pattern_db

    def _run_mutation(self, gen: Generator, template_id: str, bindings: dict,
                      mutator: MutatorKind, features: frozenset[str]) -> Generator:
        dialogue = Dialogue()
        dialogue.add_user(self.forge.library.render(template_id, bindings))
        completion = self.forge.gateway.complete(dialogue)
        script = extract_code_block(completion.text)
        result = self.forge.runner(script)
        if not result.ok:
            script = self.forge.self_debug(dialogue, script, self.forge._excerpt(result))
        child = Generator.mutated(gen, script, mutator.value, features)
        return self.db.insert(child)

    def mutate_rare(self, gen: Generator, rare: Feature) -> Generator:
        """Fold one rare feature into an existing generator."""
        return self._run_mutation(
            gen, "rare_feature_mutation",
            {"format": gen.format, "script": gen.script, "feature": rare.label},
            MutatorKind.RARE_FEATURE,
            gen.features | {rare.name},
        )

    def mutate_havoc(self, gen: Generator, axis: str) -> Generator:
        """Add an arbitrary model-chosen feature or structure.

        The addition is unnamed, so the child's feature set gets a synthetic
        "havoc:<k>" marker to stay a strict superset of the parent's.
        """
        if axis not in ("feature", "structure"):
            raise ValueError(f"unknown havoc axis {axis!r}")
        kind = MutatorKind.HAVOC_FEATURE if axis == "feature" else MutatorKind.HAVOC_STRUCTURE
        return self._run_mutation(
            gen, "havoc_mutation",
            {"format": gen.format, "script": gen.script, "axis": axis},
            kind,
            gen.features | {f"havoc:{self._next_marker(gen)}"},
        )

    def mutate_pattern(self, gen: Generator, example: MutationPattern) -> Generator:
        """Apply a recorded useful mutation pattern as an in-context example."""
        if example.format != gen.format:
            raise ValueError("pattern and generator formats differ")
        return self._run_mutation(
            gen, "pattern_mutation",
            {"script": gen.script, "original_example": example.original_script,
             "mutated_example": example.mutated_script},
            MutatorKind.PATTERN,
            gen.features | {f"pattern:{self._next_marker(gen)}"},
        )

    @staticmethod
    def _next_marker(gen: Generator) -> int:
        highest = 0
        for name in gen.features:
            match = _HAVOC_MARKER_RE.match(name)
            if match:
                highest = max(highest, int(match.group(2)))
        return highest + 1

    def record_useful_mutation(self, original: Generator, mutated: Generator) -> None:
        self.pattern_db.record(original, mutated)
