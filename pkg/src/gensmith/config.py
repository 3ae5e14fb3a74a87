"""Campaign configuration: defaults, YAML loading, and validation.

The only mandatory user input is the list of target format names; everything
else has workable defaults. The shipped suffix map covers the common binary
formats the default prompts were written for and can be extended per config.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from gensmith.errors import ConfigError

# Target format name -> accepted filename suffixes (lowercase, no dot).
DEFAULT_SUFFIX_MAP: dict[str, list[str]] = {
    "jpg": ["jpg", "jpeg"], "gif": ["gif"], "bmp": ["bmp"],
    "png": ["png"], "ico": ["ico"], "xmp": ["xmp"], "tga": ["tga"],
    "tiff": ["tiff", "tif"], "ani": ["ani"], "ras": ["ras"], "pgx": ["pgx"],
    "pnm": ["pnm", "pbm", "pgm", "ppm"], "raw": ["raw"],
    "ogg": ["ogg"], "mp3": ["mp3"], "wav": ["wav"],
    "aiff": ["aiff", "aif"], "aifc": ["aifc"], "au": ["au"], "caf": ["caf"],
    "flv": ["flv"], "mp4": ["mp4"], "pdf": ["pdf"],
    "ttf": ["ttf"], "otf": ["otf"], "woff": ["woff"], "ttc": ["ttc"],
    "zlib": ["zlib", "zz"], "pcap": ["pcap"], "der": ["der", "crt"],
    "elf": ["elf"], "mach_o": ["macho"], "wasm": ["wasm"], "icc": ["icc", "icm"],
}

MODES = ("live", "simulate", "offline_pregenerate")


@dataclass
class LLMConfig:
    backend: str = "http"  # "http" | "mock"
    base_url: str = "https://api.openai.com/v1"
    model_id: str = "gpt-3.5-turbo"
    api_key_env: str = "GENSMITH_API_KEY"
    mock_script: str | None = None  # path to a YAML list of scripted replies
    temperature: float = 0.7
    max_tokens: int = 4096
    retries: int = 2
    token_budget: int | None = None
    cost_budget: float | None = None
    price_table: dict = field(default_factory=dict)  # model -> {input, output}
    template_dir: str | None = None

    def api_key(self) -> str:
        return os.environ.get(self.api_key_env, "")


@dataclass
class SynthesisConfig:
    init_max: int = 2
    debug_max: int = 3
    max_install: int = 5
    feature_limit: int | None = None  # optional cap on analyzed features, for cost control


@dataclass
class SandboxConfig:
    interpreter: list[str] = field(default_factory=list)  # [] -> current Python
    timeout_secs: float = 30.0
    max_file_bytes: int = 16 * 1024 * 1024
    max_files: int = 64
    keep_artifacts: bool = False


@dataclass
class InstallerConfig:
    enabled: bool = False
    command: list[str] = field(default_factory=lambda: [
        "python3", "-m", "pip", "install", "--quiet", "--target", "{target}", "{package}",
    ])
    allowlist: list[str] | None = None


@dataclass
class FuzzerConfig:
    command: list[str] = field(default_factory=list)  # external fuzzer launch, optional
    corpus_dir: str = ""
    stats_file: str = ""
    stats_keys: dict = field(default_factory=dict)  # overrides for stat key names
    poll_interval_secs: float = 10.0
    stall_threshold_secs: float = 600.0


@dataclass
class SimulatedFuzzerConfig:
    rng_seed: int = 1
    batch_execs: int = 100
    batch_seconds: float = 10.0
    max_execs: int = 5000
    stop_on_full_coverage: bool = True
    edge_rules: list = field(default_factory=list)
    initial_seeds: list = field(default_factory=list)  # [{"name":..., "hex":...}]


@dataclass
class CampaignConfig:
    formats: list[str] = field(default_factory=list)
    mode: str = "simulate"
    state_dir: str = ""
    seed: int = 1
    duration_secs: float | None = None  # live-mode wall clock budget
    mutations_per_stall: int = 1
    suffix_map: dict = field(default_factory=dict)  # extends the shipped defaults
    llm: LLMConfig = field(default_factory=LLMConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    sandbox: SandboxConfig = field(default_factory=SandboxConfig)
    installer: InstallerConfig = field(default_factory=InstallerConfig)
    fuzzer: FuzzerConfig = field(default_factory=FuzzerConfig)
    simulated: SimulatedFuzzerConfig = field(default_factory=SimulatedFuzzerConfig)

    def suffixes_for(self, fmt: str) -> set[str]:
        merged = dict(DEFAULT_SUFFIX_MAP)
        merged.update({k.lower(): list(v) for k, v in self.suffix_map.items()})
        try:
            return set(merged[fmt.lower()])
        except KeyError:
            raise ConfigError(
                f"no suffixes known for format {fmt!r}; add it to suffix_map") from None

    def validate(self) -> None:
        if not self.formats:
            raise ConfigError("at least one target format is required")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if not self.state_dir:
            raise ConfigError("state_dir is required")
        if self.mutations_per_stall < 1:
            raise ConfigError("mutations_per_stall must be >= 1")
        for name in ("init_max", "debug_max", "max_install"):
            if getattr(self.synthesis, name) < 1:
                raise ConfigError(f"synthesis.{name} must be >= 1")
        if self.sandbox.timeout_secs <= 0:
            raise ConfigError("sandbox.timeout_secs must be positive")
        if self.llm.token_budget is not None and self.llm.token_budget < 0:
            raise ConfigError("llm.token_budget must be >= 0")
        if self.mode == "live" and not self.fuzzer.corpus_dir:
            raise ConfigError("live mode requires fuzzer.corpus_dir")
        if self.mode == "live" and not self.fuzzer.stats_file:
            raise ConfigError("live mode requires fuzzer.stats_file")
        paths = [str(Path(self.state_dir).resolve())]
        if self.fuzzer.corpus_dir:
            paths.append(str(Path(self.fuzzer.corpus_dir).resolve()))
        if len(set(paths)) != len(paths):
            raise ConfigError("state_dir and corpus_dir must be distinct")
        for fmt in self.formats:
            self.suffixes_for(fmt)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "CampaignConfig":
        raw = dict(raw or {})
        nested = {
            "llm": LLMConfig, "synthesis": SynthesisConfig, "sandbox": SandboxConfig,
            "installer": InstallerConfig, "fuzzer": FuzzerConfig,
            "simulated": SimulatedFuzzerConfig,
        }
        kwargs = {}
        for key, value in raw.items():
            if key in nested:
                section = nested[key]
                known = section.__dataclass_fields__
                unknown = set(value or {}) - set(known)
                if unknown:
                    raise ConfigError(f"unknown keys in {key!r}: {sorted(unknown)}")
                kwargs[key] = section(**(value or {}))
            elif key in cls.__dataclass_fields__:
                kwargs[key] = value
            else:
                raise ConfigError(f"unknown config key {key!r}")
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: Path | str) -> "CampaignConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        config = cls.from_dict(raw or {})
        config.validate()
        return config

    def dump(self, path: Path | str) -> None:
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=True),
                              encoding="utf-8")
