"""Shared fixtures: the canned simulated-campaign scenario.

The toy target exposes 30 edges: 10 reachable by random byte flips on a blank
seed, 10 gated on a marker block only emitted by the canned generator script,
and 10 gated on a second marker only emitted by the canned havoc mutation of
that generator. A scripted mock LLM drives the campaign through feature
analysis, synthesis, an (empty) rare-feature round, and the stall-phase havoc
mutation that unlocks the last third of the map.
"""

from __future__ import annotations

import textwrap
from pathlib import Path

import pytest
import yaml

from gensmith.config import CampaignConfig

MARKER_A = b"FTA:"
MARKER_B = b"FTB:"

SCRIPT_A = textwrap.dedent("""\
    data = b"FTA:" + bytes(range(1, 11)) + b"\\x00" * 6
    with open("feature_a.tiff", "wb") as f:
        f.write(data)
    """)

SCRIPT_AB = textwrap.dedent("""\
    data = b"FTA:" + bytes(range(1, 11)) + b"FTB:" + bytes(range(1, 11))
    with open("feature_ab.tiff", "wb") as f:
        f.write(data)
    """)

SCRIPT_AB2 = textwrap.dedent("""\
    data = b"FTA:" + bytes(range(1, 11)) + b"FTB:" + bytes([9] * 10) + b"\\x01"
    with open("feature_ab2.tiff", "wb") as f:
        f.write(data)
    """)


def fenced(script: str) -> str:
    return f"Here is the script:\n```python\n{script}```\n"


def toy_edge_rules() -> list[dict]:
    # The easy edges sit past the canned generators' output length so only
    # byte flips on the (longer) blank initial seed can reach them.
    rules = []
    for i in range(10):
        rules.append({"edge": i, "require": [{"nonzero_at": 40 + i}]})
    for j in range(10):
        rules.append({"edge": 10 + j, "require": [
            {"nonzero_after": {"pattern": MARKER_A.hex(), "offset": j}},
        ]})
    for j in range(10):
        rules.append({"edge": 20 + j, "require": [
            {"contains": MARKER_A.hex()},
            {"nonzero_after": {"pattern": MARKER_B.hex(), "offset": j}},
        ]})
    return rules


def toy_mock_records() -> list[dict]:
    return [
        {"kind": "feature_analysis",
         "reply": "1. Marker block: the format's primary marker block"},
        {"kind": "create_generator", "reply": fenced(SCRIPT_A)},
        {"kind": "rare_feature_extraction",
         "reply": "No unexplored features remain."},
        {"kind": "havoc_mutation", "reply": fenced(SCRIPT_AB)},
        # Spares for campaigns that stall again before terminating.
        {"kind": "havoc_mutation|pattern_mutation", "reply": fenced(SCRIPT_AB2)},
        {"kind": "havoc_mutation|pattern_mutation", "reply": fenced(SCRIPT_AB)},
    ]


def toy_config(root: Path, seed: int = 1, records: list[dict] | None = None,
               **overrides) -> CampaignConfig:
    """A ready-to-run simulate-mode config rooted at ``root``."""
    root.mkdir(parents=True, exist_ok=True)
    mock_path = root / "mock_script.yaml"
    mock_path.write_text(yaml.safe_dump(records or toy_mock_records()),
                         encoding="utf-8")
    raw = {
        "formats": ["TIFF"],
        "mode": "simulate",
        "state_dir": str(root / "state"),
        "seed": seed,
        "llm": {
            "backend": "mock",
            "mock_script": str(mock_path),
            "model_id": "mock",
        },
        "fuzzer": {
            "stall_threshold_secs": 35.0,
        },
        "sandbox": {"timeout_secs": 20.0},
        "simulated": {
            "rng_seed": seed,
            "batch_execs": 100,
            "batch_seconds": 10.0,
            "max_execs": 5000,
            "stop_on_full_coverage": True,
            "edge_rules": toy_edge_rules(),
            "initial_seeds": [{"hex": "00" * 64, "suffix": "tiff"}],
        },
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(raw.get(key), dict):
            raw[key].update(value)
        else:
            raw[key] = value
    config = CampaignConfig.from_dict(raw)
    config.validate()
    return config


def write_config_file(config: CampaignConfig, path: Path) -> Path:
    config.dump(path)
    return path


@pytest.fixture
def library():
    from gensmith.llm import PromptLibrary
    return PromptLibrary.load()
