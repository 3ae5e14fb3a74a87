"""Top-level campaign orchestration.

The campaign wires the gateway, catalog, forge, sandbox, mutation engine, and
fuzzer bridge into one loop: an init phase (feature analysis, per-feature
synthesis, then one round of rare-feature directed mutation), followed by
monitoring that fires havoc/pattern mutation whenever the fuzzer stalls.

Every unit of work (one generator synthesized, one mutation, one fuzzer batch
attributed) ends with an atomic commit of the whole campaign state, and every
unit is a deterministic function of the committed state: RNG decisions are
derived from (campaign seed, purpose, ordinal), scripts and seeds are
content-addressed, and injection deduplicates by content hash. Killing the
orchestrator at any instant and restarting from the state directory therefore
replays at most one unit and converges to the same trajectory.
"""

from __future__ import annotations

import logging
import random
import re
import subprocess
import time
from pathlib import Path

from gensmith import bridge as bridge_mod
from gensmith.bridge import (
    DEFAULT_STATS_KEYS,
    FuzzerBridge,
    FuzzState,
    MUTATION,
    NewFind,
    ProvenanceIndex,
    SYNTHESIS,
    atomic_write_bytes,
    parse_stats,
    poll_state,
)
from gensmith.config import CampaignConfig
from gensmith.errors import (
    BudgetExceeded,
    CorruptState,
    EmptyDatabase,
    EmptyReply,
    EmptyScript,
    GensmithError,
    MalformedStats,
    SynthesisFailure,
    TransportError,
    UnparseableReply,
    ZeroValidGenerators,
)
from gensmith.features import Feature, FeatureCatalog, analyze_features, discover_rare_features
from gensmith.forge import (
    Generator,
    GeneratorDB,
    GeneratorForge,
    ModuleInstaller,
    MUTATED,
    SynthesisBudget,
    script_id,
)
from gensmith.llm.gateway import LLMGateway, MockBackend, HttpBackend
from gensmith.llm.templates import PromptLibrary
from gensmith.llm.usage import UsageLedger, price_table_from_config
from gensmith.mutation import (
    MutationEngine,
    MutatorKind,
    PatternDB,
    choose_mutator,
    select_generator,
    select_pattern,
)
from gensmith.report import CampaignReport, build_report
from gensmith.sandbox import (
    Sandbox,
    SandboxLimits,
    SeedBatch,
    SeedProvenance,
    harvest,
    seed_filename,
)
from gensmith.simfuzz import EdgeMap, SimulatedFuzzer, derive_seed
from gensmith.statefile import load_state, save_state

import yaml

logger = logging.getLogger(__name__)

STATE_FILENAME = "state.json"

# Errors that fail one unit of LLM work without ending the campaign.
_UNIT_ERRORS = (SynthesisFailure, EmptyScript, EmptyReply, TransportError,
                UnparseableReply, EmptyDatabase)


def _fresh_counters(formats: list[str]) -> dict:
    per_format = {}
    for fmt in formats:
        per_format[fmt] = {
            "features_initial": 0,
            "features_rare": 0,
            "generators_valid": 0,
            "generators_failed": 0,
            "mutations": {kind.value: {"attempted": 0, "succeeded": 0}
                          for kind in MutatorKind},
            "seeds_harvested": 0,
            "seeds_injected": 0,
        }
    return {
        "per_format": per_format,
        "attribution": {bridge_mod.INITIAL: 0, SYNTHESIS: 0, MUTATION: 0,
                        bridge_mod.UNKNOWN: 0},
        "attribution_per_format": {fmt: {SYNTHESIS: 0, MUTATION: 0} for fmt in formats},
        "find_events": 0,
        "stall_events": 0,
    }


def _fresh_progress(formats: list[str]) -> dict:
    return {fmt: {
        "analyzed": False,
        "synth_done": [],
        "synth_failed": [],
        "rare_done": False,
        "rare_attempted": [],
    } for fmt in formats}


class Campaign:
    """One fuzzing campaign bound to a state directory."""

    def __init__(self, config: CampaignConfig):
        config.validate()
        self.config = config
        self.state_dir = Path(config.state_dir)
        self.state_dir.mkdir(parents=True, exist_ok=True)
        self.scripts_dir = self.state_dir / "scripts"
        self.seeds_dir = self.state_dir / "seeds"
        self.scratch_dir = self.state_dir / "scratch"
        self.packages_dir = self.state_dir / "packages"
        for d in (self.scripts_dir, self.seeds_dir, self.scratch_dir, self.packages_dir):
            d.mkdir(exist_ok=True)

        payload = load_state(self.state_dir / STATE_FILENAME)
        self.state = payload if payload is not None else self._fresh_state()

        self.library = PromptLibrary.load(config.llm.template_dir)
        self.catalog = FeatureCatalog.from_dict(self.state["features"])
        scripts = self._load_scripts()
        self.db = GeneratorDB.from_dict(self.state["generators"], scripts)
        self.pattern_db = PatternDB.from_dict(self.state["patterns"])
        self.index = ProvenanceIndex.from_dict(self.state["provenance"])
        self.ledger = UsageLedger.from_dict(self.state["ledger"])

        self.backend = self._build_backend()
        price_table = price_table_from_config(config.llm.price_table)
        self.gateway = LLMGateway(
            self.backend, ledger=self.ledger, price_table=price_table,
            token_budget=config.llm.token_budget, cost_budget=config.llm.cost_budget,
            temperature=config.llm.temperature, max_tokens=config.llm.max_tokens,
            retries=config.llm.retries,
        )
        self.gateway.transcript = self.state["transcript"]

        limits = SandboxLimits(config.sandbox.timeout_secs,
                               config.sandbox.max_file_bytes,
                               config.sandbox.max_files)
        self.sandbox = Sandbox(self.scratch_dir, limits,
                               interpreter=config.sandbox.interpreter or None,
                               packages_dir=self.packages_dir,
                               keep_artifacts=config.sandbox.keep_artifacts)
        self.installer = ModuleInstaller(
            command=config.installer.command, allowlist=config.installer.allowlist,
            packages_dir=self.packages_dir, enabled=config.installer.enabled)
        budget = SynthesisBudget(config.synthesis.init_max,
                                 config.synthesis.debug_max,
                                 config.synthesis.max_install)
        self.forge = GeneratorForge(self.gateway, self.library, self._debug_run,
                                    self.installer, self.db, budget)
        self.engine = MutationEngine(self.forge, self.pattern_db)

        self.simulated: SimulatedFuzzer | None = None
        if config.mode == "simulate":
            corpus = Path(config.fuzzer.corpus_dir or self.state_dir / "corpus")
            self.simulated = SimulatedFuzzer(
                self.state_dir / "fuzzer", corpus,
                EdgeMap.from_config(config.simulated.edge_rules),
                rng_seed=config.simulated.rng_seed,
                batch_execs=config.simulated.batch_execs,
                batch_seconds=config.simulated.batch_seconds,
            )
            self.corpus_dir = corpus
            self.stats_path = self.simulated.stats_path
        else:
            self.corpus_dir = Path(config.fuzzer.corpus_dir or self.state_dir / "corpus")
            self.stats_path = Path(config.fuzzer.stats_file) if config.fuzzer.stats_file else None
        self.bridge = None
        if config.mode != "offline_pregenerate":
            self.bridge = FuzzerBridge(self.corpus_dir, self.index)
        self.stats_keys = dict(DEFAULT_STATS_KEYS)
        self.stats_keys.update(config.fuzzer.stats_keys or {})
        self._fuzzer_proc: subprocess.Popen | None = None

    # -- state plumbing -------------------------------------------------------

    def _fresh_state(self) -> dict:
        return {
            "version": 1,
            "mode": self.config.mode,
            "seed": self.config.seed,
            "formats": list(self.config.formats),
            "features": [],
            "generators": [],
            "patterns": [],
            "provenance": {},
            "ledger": {},
            "transcript": [],
            "mock_cursor": 0,
            "store": [],
            "progress": _fresh_progress(self.config.formats),
            "init_consumed": False,
            "initial_injected": False,
            "degraded": False,
            "stall_ordinal": 0,
            "last_stall_fire": None,
            "attr_cursor": 0,
            "stall_rr": 0,
            "counters": _fresh_counters(self.config.formats),
            "phase_seconds": {"init": 0.0, "monitor": 0.0},
            "price_table": dict(self.config.llm.price_table),
            "final": {"edges_found": 0, "execs_done": 0},
            "notes": [],
        }

    def _load_scripts(self) -> dict[str, str]:
        scripts = {}
        for item in self.state["generators"]:
            path = self.scripts_dir / f"{item['id']}.py"
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise CorruptState(f"missing generator script {path}") from exc
            if script_id(text) != item["id"]:
                raise CorruptState(f"generator script {path} does not match its id")
            scripts[item["id"]] = text
        return scripts

    def _build_backend(self):
        llm = self.config.llm
        if llm.backend == "mock":
            if not llm.mock_script:
                raise GensmithError("mock backend requires llm.mock_script")
            raw = yaml.safe_load(Path(llm.mock_script).read_text(encoding="utf-8"))
            backend = MockBackend.from_config(raw or [], self.library, model_id=llm.model_id)
            backend.cursor = self.state["mock_cursor"]
            return backend
        return HttpBackend(llm.base_url, llm.model_id, api_key=llm.api_key())

    def _commit(self) -> None:
        self.state["features"] = self.catalog.to_dict()
        self.state["generators"] = self.db.to_dict()
        self.state["patterns"] = self.pattern_db.to_dict()
        self.state["provenance"] = self.index.to_dict()
        self.state["ledger"] = self.ledger.to_dict()
        if isinstance(self.backend, MockBackend):
            self.state["mock_cursor"] = self.backend.cursor
        save_state(self.state_dir / STATE_FILENAME, self.state)

    def _note(self, text: str) -> None:
        logger.info("%s", text)
        self.state["notes"].append(text)

    def _save_script(self, gen: Generator) -> None:
        atomic_write_bytes(self.scripts_dir / f"{gen.id}.py",
                           gen.script.encode("utf-8"))

    # -- sandbox plumbing ------------------------------------------------------

    def _debug_run(self, script: str):
        """Runner for synthesis/debug executions; workdirs are throwaway."""
        result = self.sandbox.run(script, tag="debug")
        self.sandbox.cleanup(result.workdir)
        return result

    def _harvest_generator(self, gen: Generator, fmt: str, phase: str) -> SeedBatch:
        """Run a valid generator once and collect its format-matching output."""
        result = self.sandbox.run(gen.script, tag="seed")
        batch = harvest(result.workdir, self.config.suffixes_for(fmt),
                        SeedProvenance(gen.id, phase), self.sandbox.limits)
        self.sandbox.cleanup(result.workdir)
        return batch

    def _store_and_inject(self, batch: SeedBatch, fmt: str) -> None:
        counters = self.state["counters"]["per_format"][fmt]
        counters["seeds_harvested"] += len(batch)
        store = self.state["store"]
        stored_names = {entry["filename"] for entry in store}
        for content, filename in batch.seeds:
            if filename not in stored_names:
                atomic_write_bytes(self.seeds_dir / filename, content)
                store.append({"filename": filename,
                              "generator_id": batch.provenance.generator_id,
                              "phase": batch.provenance.phase,
                              "format": fmt})
        if self.bridge is not None:
            written = self.bridge.inject(batch)
            counters["seeds_injected"] += len(written)

    def _reconcile_store(self) -> None:
        """Inject stored seeds missing from the corpus (archive replay and
        crash gaps); content dedup makes this a no-op otherwise."""
        if self.bridge is None:
            return
        injected = 0
        for entry in self.state["store"]:
            path = self.seeds_dir / entry["filename"]
            if not path.exists():
                continue
            content = path.read_bytes()
            if self.index.has_content(bridge_mod.content_hash(content)):
                continue
            batch = SeedBatch(
                seeds=[(content, entry["filename"])],
                provenance=SeedProvenance(entry["generator_id"], entry["phase"]))
            written = self.bridge.inject(batch)
            fmt = entry["format"]
            if fmt in self.state["counters"]["per_format"]:
                self.state["counters"]["per_format"][fmt]["seeds_injected"] += len(written)
            injected += len(written)
        if injected:
            self._note(f"reconciled {injected} stored seeds into the corpus")
            self._commit()

    # -- phases ----------------------------------------------------------------

    def _degrade(self, reason: str) -> None:
        if not self.state["degraded"]:
            self.state["degraded"] = True
            self._note(f"degraded to monitor-only mode: {reason}")

    def init_phase(self, fmt: str) -> None:
        """Feature analysis, per-feature synthesis, then rare-feature mutation.

        Individual failures are logged and skipped; raises ZeroValidGenerators
        only when the format ends the phase with no valid generator at all.
        Completed steps are committed and skipped on re-entry.
        """
        progress = self.state["progress"][fmt]
        counters = self.state["counters"]["per_format"][fmt]

        if not progress["analyzed"] and not self.state["degraded"]:
            try:
                feats = analyze_features(self.gateway, self.library, self.catalog, fmt,
                                         limit=self.config.synthesis.feature_limit)
                counters["features_initial"] += len(feats)
            except BudgetExceeded as exc:
                self._degrade(str(exc))
            except _UNIT_ERRORS as exc:
                self._note(f"{fmt}: feature analysis failed: {exc}")
            progress["analyzed"] = True
            self._commit()

        for feature in self.catalog.known(fmt):
            if feature.origin != "initial":
                continue
            if feature.name in progress["synth_done"] or feature.name in progress["synth_failed"]:
                continue
            if self.state["degraded"]:
                break
            try:
                gen = self.forge.synthesize(fmt, feature)
                self._save_script(gen)
                counters["generators_valid"] += 1
                progress["synth_done"].append(feature.name)
                self._store_and_inject(self._harvest_generator(gen, fmt, "synthesis"), fmt)
            except BudgetExceeded as exc:
                self._degrade(str(exc))
            except _UNIT_ERRORS as exc:
                counters["generators_failed"] += 1
                progress["synth_failed"].append(feature.name)
                self._note(f"{fmt}: synthesis failed for {feature.name!r}: {exc}")
            self._commit()

        if not progress["rare_done"] and not self.state["degraded"]:
            try:
                rares = discover_rare_features(self.gateway, self.library, self.catalog, fmt,
                                               limit=self.config.synthesis.feature_limit)
                counters["features_rare"] += len(rares)
            except BudgetExceeded as exc:
                self._degrade(str(exc))
            except _UNIT_ERRORS as exc:
                self._note(f"{fmt}: rare-feature discovery failed: {exc}")
            progress["rare_done"] = True
            self._commit()

        for rare in self.catalog.known(fmt):
            if rare.origin != "rare" or rare.name in progress["rare_attempted"]:
                continue
            if self.state["degraded"]:
                break
            mutations = counters["mutations"][MutatorKind.RARE_FEATURE.value]
            rng = random.Random(derive_seed(self.state["seed"], "rare", fmt, rare.name))
            try:
                parent = select_generator(self.db, fmt, rng)
                mutations["attempted"] += 1
                child = self.engine.mutate_rare(parent, rare)
                self._save_script(child)
                mutations["succeeded"] += 1
                self._store_and_inject(self._harvest_generator(child, fmt, "mutation"), fmt)
            except BudgetExceeded as exc:
                self._degrade(str(exc))
            except EmptyDatabase:
                self._note(f"{fmt}: no valid generator to mutate for rare features")
                progress["rare_attempted"].append(rare.name)
                self._commit()
                break
            except _UNIT_ERRORS as exc:
                self._note(f"{fmt}: rare mutation failed for {rare.name!r}: {exc}")
            progress["rare_attempted"].append(rare.name)
            self._commit()

        if not self.db.valid_for(fmt):
            raise ZeroValidGenerators(fmt)

    def stall_phase(self, fmt: str) -> None:
        """One stall event: select a generator, mutate it, inject the output.

        Never aborts the campaign; with no valid generators it warns and
        returns. The RNG for each event is derived from the committed stall
        ordinal, so an interrupted event replays identically.
        """
        if self.state["degraded"]:
            return
        counters = self.state["counters"]["per_format"][fmt]
        for _ in range(self.config.mutations_per_stall):
            ordinal = self.state["stall_ordinal"]
            rng = random.Random(derive_seed(self.state["seed"], "stall", ordinal))
            self.state["stall_ordinal"] = ordinal + 1
            try:
                parent = select_generator(self.db, fmt, rng)
            except EmptyDatabase:
                self._note(f"{fmt}: stall ignored, no valid generators")
                return
            kind = choose_mutator(rng, self.pattern_db, "stall", fmt)
            mutations = counters["mutations"][kind.value]
            mutations["attempted"] += 1
            try:
                if kind is MutatorKind.PATTERN:
                    example = select_pattern(self.pattern_db, fmt, rng)
                    child = self.engine.mutate_pattern(parent, example)
                else:
                    axis = "feature" if kind is MutatorKind.HAVOC_FEATURE else "structure"
                    child = self.engine.mutate_havoc(parent, axis)
                self._save_script(child)
                mutations["succeeded"] += 1
                self._store_and_inject(self._harvest_generator(child, fmt, "mutation"), fmt)
            except BudgetExceeded as exc:
                self._degrade(str(exc))
                return
            except _UNIT_ERRORS as exc:
                self._note(f"{fmt}: stall mutation {kind.value} failed: {exc}")

    # -- monitoring loop ---------------------------------------------------------

    def _now(self) -> float:
        if self.simulated is not None:
            return self.simulated.sim_time
        return time.time()

    def _read_snapshot(self):
        if self.stats_path is None or not self.stats_path.exists():
            return None
        return parse_stats(self.stats_path.read_text(encoding="utf-8"), self.stats_keys)

    def _inject_initial_seeds(self) -> None:
        if self.state["initial_injected"] or self.bridge is None:
            return
        seeds = []
        for i, spec in enumerate(self.config.simulated.initial_seeds):
            content = bytes.fromhex(spec["hex"])
            suffix = spec.get("suffix", "bin")
            seeds.append((content, seed_filename(None, i, content, suffix)))
        if seeds:
            batch = SeedBatch(seeds=seeds, provenance=SeedProvenance(None, "initial"))
            self.bridge.inject(batch)
        self.state["initial_injected"] = True
        self._commit()

    def _on_mutation_hit(self, generator_id: str) -> None:
        child = self.db.get(generator_id)
        if child is None or child.lineage.kind != MUTATED:
            return
        parent = self.db.get(child.lineage.parent_id)
        if parent is not None:
            self.engine.record_useful_mutation(parent, child)

    def _process_events(self) -> bool:
        """Attribute new-find events the simulated fuzzer committed."""
        if self.simulated is None or self.bridge is None:
            return False
        events = self.simulated.events_after(self.state["attr_cursor"])
        if not events:
            return False
        counts = self.bridge.attribute(events, on_mutation_hit=self._on_mutation_hit)
        attribution = self.state["counters"]["attribution"]
        for cls, count in counts.items():
            attribution[cls] += count
        self.state["counters"]["find_events"] += len(events)
        per_format = self.state["counters"]["attribution_per_format"]
        for find in events:
            start = find.entry if find.source is None else find.source
            cls, generator_id = self.index.resolve(start)
            if generator_id and cls in (SYNTHESIS, MUTATION):
                gen = self.db.get(generator_id)
                if gen is not None and gen.format in per_format:
                    per_format[gen.format][cls] += 1
        self.state["attr_cursor"] = self.simulated.last_seq()
        return True

    def _scan_live_corpus(self) -> None:
        """Best-effort attribution for an external fuzzer's queue.

        New queue entries are matched by the common "id:NNNNNN,...src:NNNNNN"
        naming so each find can be credited to the seed it was mutated from;
        entries without a parseable source resolve to fuzzer-origin-unknown.
        """
        if self.bridge is None:
            return
        id_re = re.compile(r"id[:_](\d+)")
        src_re = re.compile(r"src[:_](\d+)")
        known = self.index.records
        by_id = {}
        names = sorted(p.name for p in self.corpus_dir.iterdir() if p.is_file())
        for name in names:
            match = id_re.search(name)
            if match:
                by_id[match.group(1)] = name
        events = []
        for name in names:
            if name in known:
                continue
            src = src_re.search(name)
            source = by_id.get(src.group(1)) if src else None
            events.append(NewFind(name, source))
        if events:
            counts = self.bridge.attribute(events, on_mutation_hit=self._on_mutation_hit)
            attribution = self.state["counters"]["attribution"]
            for cls, count in counts.items():
                attribution[cls] += count
            self.state["counters"]["find_events"] += len(events)

    def _next_stall_format(self) -> str:
        formats = self.config.formats
        fmt = formats[self.state["stall_rr"] % len(formats)]
        self.state["stall_rr"] += 1
        return fmt

    def _should_fire_stall(self, now: float) -> bool:
        last_fire = self.state["last_stall_fire"]
        threshold = self.config.fuzzer.stall_threshold_secs
        return last_fire is None or (now - last_fire) > threshold

    def run(self) -> CampaignReport:
        """Execute the campaign to completion and return its report."""
        mode = self.config.mode
        if mode == "offline_pregenerate":
            return self.pregenerate()
        wall_start = time.time()
        if mode == "live" and self.config.fuzzer.command:
            self._fuzzer_proc = subprocess.Popen(self.config.fuzzer.command)
        try:
            self._inject_initial_seeds()
            self._reconcile_store()
            while True:
                # Attribute committed fuzzer events before polling, so a poll
                # after a crash sees the same pattern database the
                # uninterrupted run saw at this point.
                if self._process_events():
                    self._commit()
                snapshot = self._read_snapshot()
                if snapshot is None:
                    if not self.state["init_consumed"]:
                        snapshot = parse_stats(
                            "edges_found : 0\nexecs_done : 0\nlast_find : 0\ncorpus_count : 0\n")
                    else:
                        time.sleep(self.config.fuzzer.poll_interval_secs)
                        continue
                now = self._now()
                fstate = poll_state(snapshot, now, self.config.fuzzer.stall_threshold_secs,
                                    first_poll=not self.state["init_consumed"])
                if fstate is FuzzState.INIT:
                    init_start = time.time()
                    for fmt in self.config.formats:
                        try:
                            self.init_phase(fmt)
                        except ZeroValidGenerators:
                            self._note(f"{fmt}: init phase ended with zero valid generators")
                    self.state["init_consumed"] = True
                    if self.simulated is None:
                        self.state["phase_seconds"]["init"] += time.time() - init_start
                    self._commit()
                elif fstate is FuzzState.STALL and self._should_fire_stall(now):
                    self.stall_phase(self._next_stall_format())
                    self.state["last_stall_fire"] = now
                    self.state["counters"]["stall_events"] += 1
                    self._commit()

                if self.simulated is not None:
                    sim = self.config.simulated
                    if (sim.stop_on_full_coverage
                            and snapshot.edges_found >= self.simulated.edge_map.total_edges):
                        break
                    if snapshot.execs_done >= sim.max_execs:
                        break
                    self.simulated.run_batch()
                else:
                    if (self.config.duration_secs is not None
                            and time.time() - wall_start > self.config.duration_secs):
                        break
                    time.sleep(self.config.fuzzer.poll_interval_secs)
                    self._scan_live_corpus()
                    self._commit()
        finally:
            if self._fuzzer_proc is not None:
                self._fuzzer_proc.terminate()
                try:
                    self._fuzzer_proc.wait(timeout=10)
                except subprocess.TimeoutExpired:
                    self._fuzzer_proc.kill()
        return self._finalize(wall_start)

    def pregenerate(self) -> CampaignReport:
        """Offline mode: run every format's init phase with no fuzzer attached.

        The state directory doubles as a portable seed archive: generator
        scripts, harvested seeds, and the three databases all live in it, and
        a later campaign pointed at (a copy of) it skips the init LLM calls.
        """
        for fmt in self.config.formats:
            try:
                self.init_phase(fmt)
            except ZeroValidGenerators:
                self._note(f"{fmt}: init phase ended with zero valid generators")
        self.state["init_consumed"] = True
        self._commit()
        return self._finalize(time.time())

    def _finalize(self, wall_start: float) -> CampaignReport:
        snapshot = self._read_snapshot()
        if snapshot is not None:
            self.state["final"] = {"edges_found": snapshot.edges_found,
                                   "execs_done": snapshot.execs_done}
        if self.simulated is not None:
            self.state["phase_seconds"]["monitor"] = self.simulated.sim_time
        elif self.config.mode == "live":
            self.state["phase_seconds"]["monitor"] = time.time() - wall_start
        self._commit()
        report = build_report(self.state)
        (self.state_dir / "report.txt").write_text(report.render_text(), encoding="utf-8")
        (self.state_dir / "summary.json").write_text(report.to_json(), encoding="utf-8")
        return report


def run_campaign(config: CampaignConfig) -> CampaignReport:
    return Campaign(config).run()


def load_report(state_dir: Path | str) -> CampaignReport:
    payload = load_state(Path(state_dir) / STATE_FILENAME)
    if payload is None:
        raise CorruptState(f"no campaign state in {state_dir}")
    return build_report(payload)
