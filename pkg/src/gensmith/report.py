"""Campaign report assembly and rendering.

Reports are derived entirely from the persisted state payload so the same
numbers can be regenerated post hoc with ``gensmith report --state <dir>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from gensmith.bridge import INITIAL, MUTATION, SYNTHESIS, UNKNOWN
from gensmith.llm.usage import UsageLedger, price_table_from_config


@dataclass
class CampaignReport:
    mode: str
    formats: dict[str, dict]
    attribution: dict[str, int]
    attribution_per_format: dict[str, dict]
    find_events: int
    stall_events: int
    ledger_totals: dict
    total_tokens: int
    cost: float | None
    edges_found: int
    execs_done: int
    degraded: bool
    phase_seconds: dict
    notes: list[str] = field(default_factory=list)

    def validate(self) -> None:
        """Internal consistency: conservation of seeds and attribution."""
        for fmt, section in self.formats.items():
            if section["seeds_injected"] > section["seeds_harvested"]:
                raise ValueError(f"{fmt}: injected exceeds harvested")
        if sum(self.attribution.values()) != self.find_events:
            raise ValueError("attribution counts do not sum to find events")

    def to_summary(self) -> dict:
        return {
            "mode": self.mode,
            "formats": self.formats,
            "attribution": self.attribution,
            "attribution_per_format": self.attribution_per_format,
            "find_events": self.find_events,
            "stall_events": self.stall_events,
            "ledger_totals": self.ledger_totals,
            "total_tokens": self.total_tokens,
            "cost": self.cost,
            "edges_found": self.edges_found,
            "execs_done": self.execs_done,
            "degraded": self.degraded,
            "phase_seconds": self.phase_seconds,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_summary(), sort_keys=True, indent=2) + "\n"

    def render_text(self) -> str:
        lines = [
            "campaign report",
            "===============",
            f"mode: {self.mode}" + ("  [degraded: LLM budget exhausted]" if self.degraded else ""),
            f"edges found: {self.edges_found}   execs: {self.execs_done}   "
            f"new-find events: {self.find_events}   stall events: {self.stall_events}",
            "",
        ]
        for fmt in sorted(self.formats):
            s = self.formats[fmt]
            lines.append(f"[{fmt}]")
            lines.append(f"  features: {s['features_initial']} initial, {s['features_rare']} rare")
            lines.append(f"  generators: {s['generators_valid']} valid, {s['generators_failed']} failed")
            for kind in sorted(s["mutations"]):
                m = s["mutations"][kind]
                lines.append(f"  mutation {kind}: {m['succeeded']}/{m['attempted']} succeeded")
            lines.append(f"  seeds: {s['seeds_harvested']} harvested, {s['seeds_injected']} injected")
            pf = self.attribution_per_format.get(fmt, {})
            lines.append(f"  new paths from synthesis seeds: {pf.get(SYNTHESIS, 0)}, "
                         f"from mutation seeds: {pf.get(MUTATION, 0)}")
            lines.append("")
        lines.append("attribution by provenance class:")
        for cls in (INITIAL, SYNTHESIS, MUTATION, UNKNOWN):
            lines.append(f"  {cls}: {self.attribution.get(cls, 0)}")
        lines.append("")
        lines.append("LLM usage:")
        for model, (prompt, completion) in sorted(self.ledger_totals.items()):
            lines.append(f"  {model}: {prompt} prompt + {completion} completion tokens")
        lines.append(f"  total tokens: {self.total_tokens}")
        if self.cost is not None:
            lines.append(f"  cost: {self.cost:.6f}")
        lines.append("")
        lines.append("phase time (seconds):")
        for phase in sorted(self.phase_seconds):
            lines.append(f"  {phase}: {self.phase_seconds[phase]:.1f}")
        if self.notes:
            lines.append("")
            lines.append("notes:")
            lines.extend(f"  - {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def build_report(payload: dict) -> CampaignReport:
    counters = payload.get("counters") or {}
    ledger = UsageLedger.from_dict(payload.get("ledger") or {})
    price_table = price_table_from_config(payload.get("price_table") or {})
    cost = None
    if price_table:
        cost = ledger.cost(price_table, strict=False)
    final = payload.get("final") or {}
    report = CampaignReport(
        mode=payload.get("mode", "?"),
        formats=counters.get("per_format") or {},
        attribution=counters.get("attribution") or
            {INITIAL: 0, SYNTHESIS: 0, MUTATION: 0, UNKNOWN: 0},
        attribution_per_format=counters.get("attribution_per_format") or {},
        find_events=counters.get("find_events", 0),
        stall_events=counters.get("stall_events", 0),
        ledger_totals=ledger.to_dict(),
        total_tokens=ledger.total_tokens(),
        cost=cost,
        edges_found=final.get("edges_found", 0),
        execs_done=final.get("execs_done", 0),
        degraded=payload.get("degraded", False),
        phase_seconds=payload.get("phase_seconds") or {},
        notes=list(payload.get("notes") or []),
    )
    report.validate()
    return report
