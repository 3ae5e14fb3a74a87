"""Generator synthesis with bounded regenerate-and-debug.

A generator is born from a (format, feature) prompt and must execute cleanly
in the sandbox before it is recorded as valid. Failures feed back into the
dialogue ("<error> Regenerate") for up to DEBUG_MAX rounds per initial
attempt, with up to INIT_MAX fresh attempts; missing-module errors divert to
an install loop instead of a regeneration. The same self-debug routine is
reused by the mutation engine for mutated scripts.
"""

from __future__ import annotations

import hashlib
import logging
import re
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from gensmith.errors import LibraryInstallFailed, LineageMismatch, SynthesisExhausted
from gensmith.features import Feature
from gensmith.llm.gateway import Dialogue, LLMGateway, extract_code_block
from gensmith.llm.templates import PromptLibrary
from gensmith.sandbox import ExecutionResult, is_missing_module

logger = logging.getLogger(__name__)

ERROR_EXCERPT_CHARS = 2000

ROOT = "root"
MUTATED = "mutated"

_PACKAGE_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._\-]*")


@dataclass(frozen=True)
class SynthesisBudget:
    init_max: int = 2
    debug_max: int = 3
    max_install: int = 5

    def __post_init__(self):
        if min(self.init_max, self.debug_max, self.max_install) < 1:
            raise ValueError("all synthesis budgets must be >= 1")


@dataclass(frozen=True)
class Lineage:
    kind: str  # ROOT | MUTATED
    feature: str | None = None  # ROOT: the feature it was synthesized for
    parent_id: str | None = None  # MUTATED: parent generator id
    mutator: str | None = None  # MUTATED: mutator kind name

    def to_dict(self) -> dict:
        return {"kind": self.kind, "feature": self.feature,
                "parent_id": self.parent_id, "mutator": self.mutator}

    @classmethod
    def from_dict(cls, raw: dict) -> "Lineage":
        return cls(raw["kind"], raw.get("feature"), raw.get("parent_id"), raw.get("mutator"))


def script_id(script: str) -> str:
    return hashlib.sha256(script.encode("utf-8")).hexdigest()


@dataclass
class Generator:
    id: str
    format: str
    script: str
    features: frozenset[str]
    lineage: Lineage
    status: str = "valid"  # "valid" | "failed"

    @classmethod
    def root(cls, fmt: str, script: str, feature_name: str) -> "Generator":
        return cls(script_id(script), fmt, script, frozenset({feature_name}),
                   Lineage(ROOT, feature=feature_name))

    @classmethod
    def mutated(cls, parent: "Generator", script: str, mutator: str,
                features: frozenset[str]) -> "Generator":
        return cls(script_id(script), parent.format, script, features,
                   Lineage(MUTATED, parent_id=parent.id, mutator=mutator))


class GeneratorDB:
    """Content-addressed store of generators with a per-format index."""

    def __init__(self):
        self._by_id: dict[str, Generator] = {}
        self._order: list[str] = []

    def insert(self, gen: Generator) -> Generator:
        """Insert, or return the existing generator for an identical script.

        A mutated generator's parent must already be present and its parent
        chain must terminate at a root generator.
        """
        if gen.id in self._by_id:
            return self._by_id[gen.id]
        if gen.lineage.kind == MUTATED:
            self._check_chain(gen)
        self._by_id[gen.id] = gen
        self._order.append(gen.id)
        return gen

    def _check_chain(self, gen: Generator) -> None:
        seen = {gen.id}
        lineage = gen.lineage
        for _ in range(64):
            if lineage.kind == ROOT:
                return
            parent = self._by_id.get(lineage.parent_id)
            if parent is None:
                raise LineageMismatch(f"parent {lineage.parent_id!r} not in database")
            if parent.id in seen:
                raise LineageMismatch("lineage cycle detected")
            seen.add(parent.id)
            lineage = parent.lineage
        raise LineageMismatch("lineage chain too deep")

    def get(self, generator_id: str) -> Generator | None:
        return self._by_id.get(generator_id)

    def valid_for(self, fmt: str) -> list[Generator]:
        """Valid generators of a format, in insertion order."""
        return [self._by_id[i] for i in self._order
                if self._by_id[i].format == fmt and self._by_id[i].status == "valid"]

    def all(self) -> list[Generator]:
        return [self._by_id[i] for i in self._order]

    def __len__(self) -> int:
        return len(self._order)

    def to_dict(self) -> list[dict]:
        return [{
            "id": g.id, "format": g.format, "features": sorted(g.features),
            "lineage": g.lineage.to_dict(), "status": g.status,
        } for g in self.all()]

    @classmethod
    def from_dict(cls, raw: list[dict], scripts: dict[str, str]) -> "GeneratorDB":
        db = cls()
        for item in raw or []:
            db.insert(Generator(
                item["id"], item["format"], scripts[item["id"]],
                frozenset(item["features"]), Lineage.from_dict(item["lineage"]),
                item["status"],
            ))
        return db


class ModuleInstaller:
    """Installs LLM-named packages through a configurable command template.

    Installs are a supply-chain decision, so they are disabled unless the
    config turns them on; an optional allowlist gates which package names may
    reach the installer command at all.
    """

    def __init__(self, command: list[str] | None = None,
                 allowlist: list[str] | None = None,
                 packages_dir: Path | None = None,
                 enabled: bool = False,
                 timeout: float = 300.0):
        self.command = command
        self.allowlist = set(allowlist) if allowlist is not None else None
        self.packages_dir = Path(packages_dir) if packages_dir else None
        self.enabled = enabled
        self.timeout = timeout

    def install(self, package: str) -> tuple[bool, str]:
        if not self.enabled:
            return False, "installs are disabled by configuration"
        if self.allowlist is not None and package not in self.allowlist:
            return False, f"package {package!r} is not on the allowlist"
        if not self.command:
            return False, "no installer command configured"
        cmd = [part.replace("{package}", package)
                   .replace("{target}", str(self.packages_dir or ""))
               for part in self.command]
        try:
            proc = subprocess.run(cmd, capture_output=True, timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            return False, str(exc)
        if proc.returncode != 0:
            return False, proc.stderr.decode("utf-8", errors="replace")[-500:]
        return True, ""


def parse_package_name(reply: str) -> str:
    """Pull a plausible package name out of a library-extraction reply.

    The prompt asks for the bare pip name, but replies sometimes wrap it in
    prose, backticks, or a "pip install" line; prefer those markers over the
    first word of a sentence.
    """
    fallback = ""
    for line in reply.splitlines():
        line = line.strip()
        if not line:
            continue
        quoted = re.search(r"`([^`]+)`", line)
        if quoted:
            line = quoted.group(1).strip()
        if line.lower().startswith("pip install"):
            line = line[len("pip install"):].strip()
        match = _PACKAGE_NAME_RE.fullmatch(line.strip("'\"."))
        if match:
            return match.group(0)
        if not fallback:
            first = _PACKAGE_NAME_RE.search(line)
            if first:
                fallback = first.group(0)
    return fallback


class GeneratorForge:
    """Synthesizes and repairs generator scripts against the sandbox."""

    def __init__(self, gateway: LLMGateway, library: PromptLibrary,
                 runner: Callable[[str], ExecutionResult],
                 installer: ModuleInstaller,
                 db: GeneratorDB,
                 budget: SynthesisBudget | None = None):
        self.gateway = gateway
        self.library = library
        self.runner = runner
        self.installer = installer
        self.db = db
        self.budget = budget or SynthesisBudget()

    @staticmethod
    def _excerpt(result: ExecutionResult) -> str:
        return result.error_excerpt[-ERROR_EXCERPT_CHARS:]

    def synthesize(self, fmt: str, feature: Feature) -> Generator:
        """Produce a valid generator for (format, feature), or raise.

        Raises SynthesisExhausted when every initial attempt and its debug
        rounds fail, LibraryInstallFailed when a required install cannot be
        performed (which aborts the whole synthesis, not just the round).
        """
        last_error = ""
        for _ in range(self.budget.init_max):
            dialogue = Dialogue()
            dialogue.add_user(self.library.render("create_generator", {
                "format": fmt, "feature": feature.label,
            }))
            completion = self.gateway.complete(dialogue)
            script = extract_code_block(completion.text)
            result = self.runner(script)
            if result.ok:
                return self.db.insert(Generator.root(fmt, script, feature.name))
            try:
                script = self.self_debug(dialogue, script, self._excerpt(result))
                return self.db.insert(Generator.root(fmt, script, feature.name))
            except SynthesisExhausted as exc:
                last_error = exc.error_info
                continue
        raise SynthesisExhausted(
            f"no working generator for {fmt!r} feature {feature.name!r}", last_error)

    def self_debug(self, dialogue: Dialogue, script: str, error_info: str) -> str:
        """Repair a failing script; returns the first script that executes.

        Runs up to debug_max rounds of: clear missing-module errors through
        the install loop, then feed the script and error back for a
        regeneration. The dialogue grows by an (assistant script, user
        error+"Regenerate") pair per round.
        """
        for _ in range(self.budget.debug_max):
            if is_missing_module(error_info):
                result = self.resolve_missing_modules(script, error_info)
                if result.ok:
                    return script
                error_info = self._excerpt(result)
            dialogue.add_assistant(script)
            dialogue.add_user(error_info + "\nRegenerate")
            completion = self.gateway.complete(dialogue)
            script = extract_code_block(completion.text)
            result = self.runner(script)
            if result.ok:
                return script
            error_info = self._excerpt(result)
        raise SynthesisExhausted("debug budget exhausted", error_info)

    def resolve_missing_modules(self, script: str, error_info: str) -> ExecutionResult:
        """Install whatever the script is missing and rerun it.

        Loops while the rerun still reports a missing module, up to
        max_install times per call; each round asks the LLM which package the
        error refers to. Returns the last rerun's result (success, or a
        different failure for the caller's debug loop to handle).
        """
        for _ in range(self.budget.max_install):
            lib_dialogue = Dialogue()
            lib_dialogue.add_user(self.library.render("extract_library", {
                "error_info": error_info,
            }))
            completion = self.gateway.complete(lib_dialogue)
            package = parse_package_name(completion.text)
            if not package:
                raise LibraryInstallFailed("no package name in reply", error_info)
            ok, detail = self.installer.install(package)
            if not ok:
                raise LibraryInstallFailed(
                    f"failed to install {package!r}: {detail}", error_info)
            logger.info("installed %s", package)
            result = self.runner(script)
            if result.ok:
                return result
            error_info = self._excerpt(result)
            if not is_missing_module(error_info):
                return result
        raise LibraryInstallFailed("install budget exhausted", error_info)
