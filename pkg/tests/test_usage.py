import pytest

from gensmith.errors import UnknownModel
from gensmith.llm import Completion, ModelPrice, UsageLedger, record_usage


PRICES = {"m": ModelPrice(input=1e-6, output=2e-6)}


def test_totals_accumulate():
    ledger = UsageLedger()
    for _ in range(3):
        record_usage(ledger, Completion("x", 1000, 500, "m"), PRICES)
    assert ledger.prompt_tokens("m") == 3000
    assert ledger.completion_tokens("m") == 1500


def test_cost_recomputation():
    ledger = UsageLedger()
    for _ in range(3):
        record_usage(ledger, Completion("x", 1000, 500, "m"), PRICES)
    # 3000 * 1e-6 + 1500 * 2e-6 = 0.006
    assert ledger.cost(PRICES) == pytest.approx(0.006, rel=1e-12)


def test_unknown_model_rejected():
    ledger = UsageLedger()
    with pytest.raises(UnknownModel):
        record_usage(ledger, Completion("x", 1, 1, "unpriced"), PRICES)
    assert ledger.total_tokens() == 0


def test_cost_strict_vs_lenient():
    ledger = UsageLedger()
    ledger.record(Completion("x", 10, 10, "unpriced"))
    with pytest.raises(UnknownModel):
        ledger.cost(PRICES)
    assert ledger.cost(PRICES, strict=False) == 0.0


def test_round_trip():
    ledger = UsageLedger()
    ledger.record(Completion("x", 12, 34, "a"))
    ledger.record(Completion("x", 5, 6, "b"))
    assert UsageLedger.from_dict(ledger.to_dict()) == ledger
