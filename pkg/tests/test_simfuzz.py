from pathlib import Path

from conftest import toy_edge_rules
from gensmith.bridge import atomic_write_bytes, parse_stats
from gensmith.simfuzz import Condition, EdgeMap, EdgeRule, SimulatedFuzzer


def blank_corpus(root: Path) -> Path:
    corpus = root / "corpus"
    atomic_write_bytes(corpus / "seed.tiff", b"\x00" * 64)
    return corpus


def make_fuzzer(root: Path, seed=1, **kw) -> SimulatedFuzzer:
    return SimulatedFuzzer(root / "home", blank_corpus(root),
                           EdgeMap.from_config(toy_edge_rules()), rng_seed=seed, **kw)


def test_conditions():
    assert Condition.from_dict({"contains": b"FTA:".hex()}).check(b"xxFTA:yy")
    assert not Condition.from_dict({"contains": b"FTA:".hex()}).check(b"nope")
    assert Condition.from_dict({"nonzero_at": 2}).check(b"\x00\x00\x07")
    assert not Condition.from_dict({"nonzero_at": 2}).check(b"\x00\x00")
    cond = Condition.from_dict({"nonzero_after": {"pattern": b"M:".hex(), "offset": 1}})
    assert cond.check(b"M:\x00\x05")
    assert not cond.check(b"M:\x05")


def test_edge_map_total():
    edge_map = EdgeMap.from_config(toy_edge_rules())
    assert edge_map.total_edges == 30


def test_blank_seed_reaches_only_easy_edges(tmp_path):
    fuzzer = make_fuzzer(tmp_path)
    while fuzzer.exec_count < 5000:
        fuzzer.run_batch()
    assert fuzzer.covered <= set(range(10))
    assert len(fuzzer.covered) == 10  # flips find every easy edge


def test_snapshot_sequence_is_reproducible(tmp_path):
    def trajectory(base: Path):
        fuzzer = make_fuzzer(base, seed=42)
        snaps = []
        for _ in range(12):
            fuzzer.run_batch()
            snaps.append(parse_stats(fuzzer.stats_text()))
        return snaps, sorted(fuzzer.covered), fuzzer.events

    one = trajectory(tmp_path / "a")
    two = trajectory(tmp_path / "b")
    assert one == two


def test_marker_edges_unreachable_without_generator(tmp_path):
    fuzzer = make_fuzzer(tmp_path, seed=7)
    while fuzzer.exec_count < 5000:
        fuzzer.run_batch()
    assert not (fuzzer.covered & set(range(10, 30)))


def test_import_triggers_find_event(tmp_path):
    fuzzer = make_fuzzer(tmp_path)
    fuzzer.run_batch()
    seen = len(fuzzer.events)
    marker_seed = b"FTA:" + bytes(range(1, 11))
    atomic_write_bytes(fuzzer.corpus_dir / "gen_x_0000_aa.tiff", marker_seed)
    fuzzer.run_batch()
    imported = [e for e in fuzzer.events[seen:] if e[1] == "gen_x_0000_aa.tiff"]
    assert imported and imported[0][2] == "gen_x_0000_aa.tiff"
    assert set(range(10, 20)) <= fuzzer.covered


def test_resume_from_committed_state_is_identical(tmp_path):
    import shutil

    straight = make_fuzzer(tmp_path / "one", seed=5)
    for _ in range(10):
        straight.run_batch()

    resumed_root = tmp_path / "two"
    resumed = make_fuzzer(resumed_root, seed=5)
    for _ in range(4):
        resumed.run_batch()
    # Simulate a process death: rebuild from the committed directory state.
    reborn = SimulatedFuzzer(resumed_root / "home", resumed_root / "corpus",
                             EdgeMap.from_config(toy_edge_rules()), rng_seed=5)
    for _ in range(6):
        reborn.run_batch()
    assert reborn.covered == straight.covered
    assert reborn.events == straight.events
    assert reborn.exec_count == straight.exec_count


def test_stats_file_parses(tmp_path):
    fuzzer = make_fuzzer(tmp_path)
    fuzzer.run_batch()
    snap = parse_stats(fuzzer.stats_text())
    assert snap.execs_done == fuzzer.exec_count
    assert snap.queue_size == len(fuzzer.queue)
