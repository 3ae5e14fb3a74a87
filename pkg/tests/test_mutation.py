import random
from collections import Counter

import pytest

from gensmith.errors import EmptyDatabase, LineageMismatch
from gensmith.features import Feature
from gensmith.forge import Generator, GeneratorDB, GeneratorForge, SynthesisBudget
from gensmith.llm import LLMGateway, MockBackend, ScriptRecord
from gensmith.mutation import (
    MutationEngine,
    MutationPattern,
    MutatorKind,
    PatternDB,
    choose_mutator,
    select_generator,
    select_pattern,
)
from gensmith.sandbox import ExecutionResult


def seeded_db(*scripts):
    db = GeneratorDB()
    gens = [db.insert(Generator.root("TIFF", s, f"F{i}")) for i, s in enumerate(scripts)]
    return db, gens


def ok_runner(script):
    return ExecutionResult("success", "", [("a.tiff", 1)], 0.0)


def make_engine(library, records, runner=ok_runner, db=None):
    gateway = LLMGateway(MockBackend(records, library))
    forge = GeneratorForge(gateway, library, runner, installer=None,
                           db=db or GeneratorDB(), budget=SynthesisBudget())
    return MutationEngine(forge, PatternDB())


def test_single_generator_always_selected():
    db, (gen,) = seeded_db("s0")
    for seed in range(5):
        assert select_generator(db, "TIFF", random.Random(seed)) is gen


def test_selection_is_seeded_deterministic():
    db, _ = seeded_db("s0", "s1")
    picks_a = [select_generator(db, "TIFF", random.Random(3)).id for _ in range(5)]
    picks_b = [select_generator(db, "TIFF", random.Random(3)).id for _ in range(5)]
    assert picks_a == picks_b


def test_selection_uniformity_chi_square_bound():
    db, gens = seeded_db("s0", "s1", "s2")
    rng = random.Random(1234)
    counts = Counter(select_generator(db, "TIFF", rng).id for _ in range(10_000))
    for gen in gens:
        assert 3300 - 200 <= counts[gen.id] <= 3300 + 200


def test_empty_database():
    with pytest.raises(EmptyDatabase):
        select_generator(GeneratorDB(), "TIFF", random.Random(0))


def test_choose_mutator_init_is_rare():
    assert choose_mutator(random.Random(0), PatternDB(), "init", "TIFF") \
        is MutatorKind.RARE_FEATURE


def test_choose_mutator_excludes_pattern_when_db_empty():
    rng = random.Random(5)
    kinds = {choose_mutator(rng, PatternDB(), "stall", "TIFF") for _ in range(1000)}
    assert kinds == {MutatorKind.HAVOC_FEATURE, MutatorKind.HAVOC_STRUCTURE}


def test_choose_mutator_includes_pattern_when_available():
    patterns = PatternDB()
    db, gens = seeded_db("orig", "other")
    child = Generator.mutated(gens[0], "mut", "havoc_feature", gens[0].features)
    db.insert(child)
    patterns.record(gens[0], child)
    rng = random.Random(5)
    kinds = {choose_mutator(rng, patterns, "stall", "TIFF") for _ in range(1000)}
    assert kinds == {MutatorKind.HAVOC_FEATURE, MutatorKind.HAVOC_STRUCTURE,
                     MutatorKind.PATTERN}


def test_mutate_rare_unions_features(library):
    db, (gen,) = seeded_db("parent script")
    engine = make_engine(library, [ScriptRecord.of("rare_feature_mutation",
                                                   "```\nchild script\n```")], db=db)
    rare = Feature("Tiled storage", "tiles", "TIFF", "rare")
    child = engine.mutate_rare(gen, rare)
    assert child.features == gen.features | {"Tiled storage"}
    assert child.lineage.parent_id == gen.id
    assert child.lineage.mutator == "rare_feature"


def test_mutate_rare_failure_leaves_db_unchanged(library):
    from gensmith.errors import SynthesisExhausted
    from gensmith.llm.templates import REGENERATE

    db, (gen,) = seeded_db("parent script")
    records = [ScriptRecord.of("rare_feature_mutation", "```\nbad\n```")]
    records.extend(ScriptRecord.of(REGENERATE, "```\nbad\n```") for _ in range(3))

    def failing_runner(script):
        return ExecutionResult("failure", "RuntimeError: nope", [], 0.0)

    engine = make_engine(library, records, runner=failing_runner, db=db)
    with pytest.raises(SynthesisExhausted):
        engine.mutate_rare(gen, Feature("X", "d", "TIFF", "rare"))
    assert len(db) == 1  # only the parent


def test_havoc_chain_lineage(library):
    db, (root,) = seeded_db("root script")
    records = [ScriptRecord.of("havoc_mutation", f"```\nchild {i}\n```") for i in range(3)]
    engine = make_engine(library, records, db=db)
    current = root
    for _ in range(3):
        current = engine.mutate_havoc(current, "feature")
    depth = 0
    node = current
    while node.lineage.kind == "mutated":
        node = db.get(node.lineage.parent_id)
        depth += 1
    assert depth == 3
    assert node is root
    assert "havoc:3" in current.features


def test_havoc_debugs_broken_script(library):
    from gensmith.llm.templates import REGENERATE

    db, (gen,) = seeded_db("parent")
    calls = {"n": 0}

    def flaky_runner(script):
        calls["n"] += 1
        if script == "bad":
            return ExecutionResult("failure", "SyntaxError: x", [], 0.0)
        return ExecutionResult("success", "", [], 0.0)

    records = [ScriptRecord.of("havoc_mutation", "```\nbad\n```"),
               ScriptRecord.of(REGENERATE, "```\ngood\n```")]
    engine = make_engine(library, records, runner=flaky_runner, db=db)
    child = engine.mutate_havoc(gen, "structure")
    assert child.script == "good"
    assert child.lineage.mutator == "havoc_structure"


def test_mutate_pattern_uses_example(library):
    db, (gen,) = seeded_db("target script")
    engine = make_engine(library, [ScriptRecord.of("pattern_mutation",
                                                   "```\npatched\n```")], db=db)
    example = MutationPattern("orig", "mut", "TIFF")
    child = engine.mutate_pattern(gen, example)
    assert child.lineage.mutator == "pattern"
    prompt = engine.forge.gateway.transcript[0]["prompt"]
    assert "orig" in prompt and "mut" in prompt and "target script" in prompt


def test_select_pattern_single_and_seeded():
    patterns = PatternDB()
    db, gens = seeded_db("o1", "o2")
    child1 = db.insert(Generator.mutated(gens[0], "m1", "havoc_feature", gens[0].features))
    child2 = db.insert(Generator.mutated(gens[1], "m2", "havoc_feature", gens[1].features))
    patterns.record(gens[0], child1)
    assert select_pattern(patterns, "TIFF", random.Random(0)).key() == ("o1", "m1")
    patterns.record(gens[1], child2)
    picks = [select_pattern(patterns, "TIFF", random.Random(9)).key() for _ in range(4)]
    assert picks == [select_pattern(patterns, "TIFF", random.Random(9)).key()
                     for _ in range(4)]


def test_record_dedups_and_counts_hits():
    patterns = PatternDB()
    db, gens = seeded_db("orig")
    child = db.insert(Generator.mutated(gens[0], "mut", "havoc_feature",
                                        gens[0].features))
    patterns.record(gens[0], child)
    assert patterns.size() == 1
    patterns.record(gens[0], child)
    assert patterns.size() == 1
    assert patterns.patterns_for("TIFF")[0].hit_count == 2


def test_record_root_lineage_is_noop():
    patterns = PatternDB()
    db, gens = seeded_db("orig", "other-root")
    patterns.record(gens[0], gens[1])
    assert patterns.size() == 0


def test_record_lineage_mismatch():
    patterns = PatternDB()
    db, gens = seeded_db("orig", "other")
    child = db.insert(Generator.mutated(gens[1], "mut", "havoc_feature",
                                        gens[1].features))
    with pytest.raises(LineageMismatch):
        patterns.record(gens[0], child)


def test_pattern_round_trip():
    patterns = PatternDB()
    db, gens = seeded_db("o")
    child = db.insert(Generator.mutated(gens[0], "m", "pattern", gens[0].features))
    patterns.record(gens[0], child)
    patterns.record(gens[0], child)
    restored = PatternDB.from_dict(patterns.to_dict())
    assert restored.to_dict() == patterns.to_dict()
