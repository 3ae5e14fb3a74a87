"""Sandboxed execution of generator scripts and seed harvesting.

Each run gets a fresh working directory; the script interpreter is spawned as
a subprocess under a wall-clock timeout with a minimal environment. Produced
files are enumerated relative to the workdir, and ``harvest`` collects the
ones whose suffix matches the campaign's target format.

This is resource limiting plus directory isolation, not an OS security
sandbox; running untrusted generators under additional confinement is an
operator responsibility.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
import shutil
import subprocess
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from gensmith.errors import InterpreterMissing

logger = logging.getLogger(__name__)

MISSING_MODULE_MARKER = "ModuleNotFoundError"
_MODULE_NAME_RE = re.compile(r"No module named '([^']+)'")

SCRIPT_FILENAME = "generator_script.py"


@dataclass(frozen=True)
class SandboxLimits:
    timeout_secs: float = 30.0
    max_file_bytes: int = 16 * 1024 * 1024
    max_files: int = 64

    def __post_init__(self):
        if self.timeout_secs <= 0 or self.max_file_bytes <= 0 or self.max_files <= 0:
            raise ValueError("sandbox limits must be positive")


@dataclass
class ExecutionResult:
    status: str  # "success" | "failure" | "timeout"
    error_excerpt: str
    produced_files: list[tuple[str, int]]  # (relative path, byte size)
    duration: float
    workdir: Path | None = None

    @property
    def ok(self) -> bool:
        return self.status == "success"


@dataclass(frozen=True)
class SeedProvenance:
    generator_id: str | None  # None for initial seeds
    phase: str  # "synthesis" | "mutation" | "initial"


@dataclass
class SeedBatch:
    seeds: list[tuple[bytes, str]] = field(default_factory=list)  # (content, filename)
    provenance: SeedProvenance = SeedProvenance(None, "initial")

    def __len__(self) -> int:
        return len(self.seeds)


@dataclass(frozen=True)
class ErrorKind:
    kind: str  # "missing_module" | "other"
    detail: str  # module name, or the excerpt


def classify_error(error_excerpt: str) -> ErrorKind:
    """Total classification of a failure excerpt; never raises."""
    if MISSING_MODULE_MARKER in error_excerpt:
        names = _MODULE_NAME_RE.findall(error_excerpt)
        if names:
            return ErrorKind("missing_module", names[-1])
    return ErrorKind("other", error_excerpt)


def is_missing_module(error_excerpt: str) -> bool:
    return classify_error(error_excerpt).kind == "missing_module"


class Sandbox:
    """Runs scripts in throwaway workdirs under a scratch root."""

    def __init__(self, scratch_root: Path, limits: SandboxLimits | None = None,
                 interpreter: list[str] | None = None,
                 packages_dir: Path | None = None,
                 keep_artifacts: bool = False):
        self.scratch_root = Path(scratch_root)
        self.limits = limits or SandboxLimits()
        self.interpreter = list(interpreter) if interpreter else [sys.executable]
        self.packages_dir = Path(packages_dir) if packages_dir else None
        self.keep_artifacts = keep_artifacts
        self._run_counter = 0

    def new_workdir(self, tag: str = "run") -> Path:
        self._run_counter += 1
        workdir = self.scratch_root / f"{tag}_{os.getpid()}_{self._run_counter:06d}"
        workdir.mkdir(parents=True, exist_ok=False)
        return workdir

    def execute(self, script: str, workdir: Path, limits: SandboxLimits | None = None) -> ExecutionResult:
        limits = limits or self.limits
        workdir = Path(workdir)
        script_path = workdir / SCRIPT_FILENAME
        script_path.write_text(script, encoding="utf-8")

        env = {
            "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
            "HOME": str(workdir),
            "PYTHONDONTWRITEBYTECODE": "1",
            "PYTHONIOENCODING": "utf-8",
        }
        if self.packages_dir is not None:
            env["PYTHONPATH"] = str(self.packages_dir)

        start = time.monotonic()
        try:
            proc = subprocess.run(
                self.interpreter + [str(script_path)],
                cwd=workdir, env=env,
                capture_output=True, timeout=limits.timeout_secs,
            )
            status = "success" if proc.returncode == 0 else "failure"
            stderr = proc.stderr.decode("utf-8", errors="replace")
        except subprocess.TimeoutExpired as exc:
            status = "timeout"
            stderr = (exc.stderr or b"").decode("utf-8", errors="replace")
            stderr += f"\n[killed after {limits.timeout_secs}s wall-clock limit]"
        except FileNotFoundError as exc:
            raise InterpreterMissing(f"interpreter not found: {self.interpreter[0]}") from exc
        duration = time.monotonic() - start

        produced = []
        for path in sorted(workdir.rglob("*")):
            if not path.is_file() or path == script_path:
                continue
            rel = path.relative_to(workdir).as_posix()
            produced.append((rel, path.stat().st_size))
        return ExecutionResult(status, stderr[-8192:], produced, duration, workdir=workdir)

    def run(self, script: str, tag: str = "run") -> ExecutionResult:
        """Execute in a fresh workdir; the caller harvests before cleanup."""
        return self.execute(script, self.new_workdir(tag))

    def cleanup(self, workdir: Path) -> None:
        if not self.keep_artifacts:
            shutil.rmtree(workdir, ignore_errors=True)


def seed_filename(generator_id: str | None, ordinal: int, content: bytes, suffix: str) -> str:
    digest = hashlib.sha256(content).hexdigest()[:8]
    prefix = f"gen_{generator_id[:16]}" if generator_id else "init"
    return f"{prefix}_{ordinal:04d}_{digest}.{suffix}"


def harvest(workdir: Path, format_suffixes: set[str],
            provenance: SeedProvenance,
            limits: SandboxLimits | None = None) -> SeedBatch:
    """Collect suffix-matching, non-empty files produced under ``workdir``.

    Filenames are deterministic: generator id, ordinal within the batch, and
    a content-hash fragment, so re-harvesting an identical run yields an
    identical batch. Oversized files and files beyond the per-run cap are
    dropped.
    """
    limits = limits or SandboxLimits()
    suffixes = {s.lower().lstrip(".") for s in format_suffixes}
    batch = SeedBatch(provenance=provenance)
    for path in sorted(Path(workdir).rglob("*")):
        if len(batch.seeds) >= limits.max_files:
            break
        if not path.is_file() or path.name == SCRIPT_FILENAME:
            continue
        suffix = path.suffix.lower().lstrip(".")
        if suffix not in suffixes:
            continue
        size = path.stat().st_size
        if size == 0 or size > limits.max_file_bytes:
            continue
        content = path.read_bytes()
        name = seed_filename(provenance.generator_id, len(batch.seeds), content, suffix)
        batch.seeds.append((content, name))
    return batch
