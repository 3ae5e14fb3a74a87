import pytest

from gensmith.bridge import (
    FuzzerBridge,
    FuzzState,
    INITIAL,
    MUTATION,
    NewFind,
    ProvenanceIndex,
    ProvenanceRecord,
    SYNTHESIS,
    UNKNOWN,
    parse_corpus_filename,
    parse_stats,
    poll_state,
)
from gensmith.errors import MalformedStats
from gensmith.sandbox import SeedBatch, SeedProvenance

GID = "ab" * 32
STATS = "edges_found : 120\nlast_find : 1714000000\nexecs_done : 5000\ncorpus_count : 10"


def test_parse_stats_example():
    snap = parse_stats(STATS)
    assert (snap.edges_found, snap.execs_done, snap.last_find_unix, snap.queue_size) \
        == (120, 5000, 1714000000, 10)


def test_parse_stats_empty_and_missing_key():
    with pytest.raises(MalformedStats):
        parse_stats("")
    with pytest.raises(MalformedStats):
        parse_stats("edges_found : 1\nexecs_done : 2\ncorpus_count : 3")


def test_parse_stats_ignores_unknown_keys():
    snap = parse_stats(STATS + "\nbanner : afl++\ncycles_done : 9")
    assert snap.edges_found == 120


def test_poll_state_cases():
    snap = parse_stats(STATS)
    assert poll_state(snap, now=0, stall_threshold_secs=600, first_poll=True) \
        is FuzzState.INIT
    stalled = poll_state(snap, now=snap.last_find_unix + 1200,
                         stall_threshold_secs=600, first_poll=False)
    assert stalled is FuzzState.STALL
    progress = poll_state(snap, now=snap.last_find_unix,
                          stall_threshold_secs=600, first_poll=False)
    assert progress is FuzzState.PROGRESS


def batch(*seeds, phase="synthesis", generator_id=GID):
    return SeedBatch(seeds=list(seeds),
                     provenance=SeedProvenance(generator_id, phase))


def test_inject_writes_and_indexes(tmp_path):
    bridge = FuzzerBridge(tmp_path / "corpus", ProvenanceIndex())
    written = bridge.inject(batch((b"a", "gen_x_0000_aa.tiff"),
                                  (b"b", "gen_x_0001_bb.tiff"),
                                  (b"c", "gen_x_0002_cc.tiff")))
    assert len(written) == 3
    assert len(bridge.index.records) == 3
    assert sorted(p.name for p in (tmp_path / "corpus").iterdir()) == sorted(written)


def test_inject_is_idempotent(tmp_path):
    bridge = FuzzerBridge(tmp_path / "corpus", ProvenanceIndex())
    first = bridge.inject(batch((b"a", "gen_x_0000_aa.tiff")))
    again = bridge.inject(batch((b"a", "gen_x_0000_aa.tiff")))
    assert len(first) == 1 and again == []
    assert len(list((tmp_path / "corpus").iterdir())) == 1


def test_inject_dedups_within_batch(tmp_path):
    bridge = FuzzerBridge(tmp_path / "corpus", ProvenanceIndex())
    written = bridge.inject(batch((b"same", "gen_x_0000_aa.tiff"),
                                  (b"same", "gen_x_0001_aa.tiff")))
    assert len(written) == 1


def test_parse_corpus_filename():
    assert parse_corpus_filename(f"gen_{GID[:16]}_0001_12345678.tiff") == ("gen", GID[:16])
    assert parse_corpus_filename("init_0000_deadbeef.tiff") == (INITIAL, None)
    assert parse_corpus_filename("id:000001,src:000000") == ("fuzzer", None)


def test_attribute_single_hop_synthesis(tmp_path):
    bridge = FuzzerBridge(tmp_path / "c", ProvenanceIndex())
    bridge.inject(batch((b"a", "gen_x_0000_aa.tiff")))
    counts = bridge.attribute([NewFind("fuzz_000001_zz", "gen_x_0000_aa.tiff")])
    assert counts[SYNTHESIS] == 1 and sum(counts.values()) == 1


def test_attribute_transitive_chain(tmp_path):
    bridge = FuzzerBridge(tmp_path / "c", ProvenanceIndex())
    bridge.inject(batch((b"a", "init_0000_aa.tiff"), phase="initial",
                        generator_id=None))
    bridge.attribute([NewFind("fuzz_1", "init_0000_aa.tiff")])
    counts = bridge.attribute([NewFind("fuzz_2", "fuzz_1")])
    assert counts[INITIAL] == 1


def test_attribute_mutation_fires_callback(tmp_path):
    bridge = FuzzerBridge(tmp_path / "c", ProvenanceIndex())
    bridge.inject(batch((b"a", "gen_y_0000_aa.tiff"), phase="mutation"))
    hits = []
    counts = bridge.attribute([NewFind("fuzz_1", "gen_y_0000_aa.tiff")],
                              on_mutation_hit=hits.append)
    assert counts[MUTATION] == 1
    assert hits == [GID]


def test_attribute_unknown_ancestry(tmp_path):
    bridge = FuzzerBridge(tmp_path / "c", ProvenanceIndex())
    counts = bridge.attribute([NewFind("mystery_entry", "untracked_parent")])
    assert counts[UNKNOWN] == 1


def test_attribute_depth_cap(tmp_path):
    index = ProvenanceIndex()
    bridge = FuzzerBridge(tmp_path / "c", index)
    index.add("n0", ProvenanceRecord("initial"))
    for i in range(1, 80):
        index.add(f"n{i}", ProvenanceRecord("fuzzer", parent=f"n{i-1}"))
    deep = bridge.attribute([NewFind("later", "n79")])
    assert deep[UNKNOWN] == 1
    shallow = bridge.attribute([NewFind("later2", "n5")])
    assert shallow[INITIAL] == 1


def test_attribution_conservation(tmp_path):
    bridge = FuzzerBridge(tmp_path / "c", ProvenanceIndex())
    bridge.inject(batch((b"a", "gen_x_0000_aa.tiff")))
    report = [NewFind("f1", "gen_x_0000_aa.tiff"), NewFind("f2", "f1"),
              NewFind("f3", None), NewFind("f4", "nowhere")]
    counts = bridge.attribute(report)
    assert sum(counts.values()) == len(report)
