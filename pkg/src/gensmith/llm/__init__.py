from gensmith.llm.gateway import (
    Completion,
    Dialogue,
    HttpBackend,
    LLMGateway,
    MockBackend,
    ScriptRecord,
    Turn,
    estimate_tokens,
    extract_code_block,
)
from gensmith.llm.templates import REGENERATE, PromptLibrary, PromptTemplate, render_prompt
from gensmith.llm.usage import ModelPrice, PriceTable, UsageLedger, price_table_from_config, record_usage

__all__ = [
    "Completion", "Dialogue", "HttpBackend", "LLMGateway", "MockBackend",
    "ScriptRecord", "Turn", "estimate_tokens", "extract_code_block",
    "REGENERATE", "PromptLibrary", "PromptTemplate", "render_prompt",
    "ModelPrice", "PriceTable", "UsageLedger", "price_table_from_config", "record_usage",
]
