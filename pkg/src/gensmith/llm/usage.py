"""Token accounting and cost derivation for LLM usage."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict

from gensmith.errors import UnknownModel

if TYPE_CHECKING:
    from gensmith.llm.gateway import Completion


@dataclass(frozen=True)
class ModelPrice:
    """Currency per token, split by direction."""

    input: float
    output: float


PriceTable = Dict[str, ModelPrice]


def price_table_from_config(raw: dict) -> PriceTable:
    return {model: ModelPrice(float(p["input"]), float(p["output"]))
            for model, p in (raw or {}).items()}


class UsageLedger:
    """Cumulative per-model token totals; monotonically non-decreasing."""

    def __init__(self, totals: dict[str, list[int]] | None = None):
        # model_id -> [prompt_tokens, completion_tokens]
        self.totals: dict[str, list[int]] = {
            m: [int(p), int(c)] for m, (p, c) in (totals or {}).items()
        }

    def record(self, completion: "Completion") -> None:
        entry = self.totals.setdefault(completion.model_id, [0, 0])
        entry[0] += completion.prompt_tokens
        entry[1] += completion.completion_tokens

    def total_tokens(self) -> int:
        return sum(p + c for p, c in self.totals.values())

    def prompt_tokens(self, model_id: str) -> int:
        return self.totals.get(model_id, [0, 0])[0]

    def completion_tokens(self, model_id: str) -> int:
        return self.totals.get(model_id, [0, 0])[1]

    def cost(self, price_table: PriceTable, strict: bool = True) -> float:
        """Σ direction-tokens × direction-price over all models in the ledger.

        With strict=True an unpriced model raises UnknownModel; otherwise its
        tokens contribute nothing (used for best-effort budget estimates).
        """
        total = 0.0
        for model_id, (prompt, completion) in self.totals.items():
            price = price_table.get(model_id)
            if price is None:
                if strict:
                    raise UnknownModel(model_id)
                continue
            total += prompt * price.input + completion * price.output
        return total

    def to_dict(self) -> dict:
        return {m: list(v) for m, v in sorted(self.totals.items())}

    @classmethod
    def from_dict(cls, raw: dict) -> "UsageLedger":
        return cls({m: (v[0], v[1]) for m, v in (raw or {}).items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, UsageLedger) and self.totals == other.totals


def record_usage(ledger: UsageLedger, completion: "Completion",
                 price_table: PriceTable) -> UsageLedger:
    """Record a completion, requiring its model to be priced."""
    if completion.model_id not in price_table:
        raise UnknownModel(completion.model_id)
    ledger.record(completion)
    return ledger
