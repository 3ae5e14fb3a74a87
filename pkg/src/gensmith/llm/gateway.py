"""Chat-completion gateway with a real HTTP backend and a scripted mock.

All LLM traffic flows through ``LLMGateway.complete``, which validates the
dialogue, enforces the campaign token/cost budget before dispatch, retries
transport failures a fixed number of times, and records usage in the ledger.
"""

from __future__ import annotations

import logging
import math
import re
import threading
from dataclasses import dataclass, field

import requests

from gensmith.errors import (
    BudgetExceeded,
    EmptyReply,
    EmptyScript,
    InvalidDialogue,
    MockScriptMismatch,
    TransportError,
)
from gensmith.llm.templates import PromptLibrary
from gensmith.llm.usage import PriceTable, UsageLedger

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.7
DEFAULT_MAX_TOKENS = 4096

_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def estimate_tokens(text: str) -> int:
    """Deterministic token estimate (roughly four characters per token)."""
    return max(1, math.ceil(len(text) / 4))


@dataclass(frozen=True)
class Turn:
    role: str  # "user" | "assistant"
    text: str


class Dialogue:
    """An alternating user/assistant conversation, starting with a user turn."""

    def __init__(self, turns: list[Turn] | None = None):
        self.turns: list[Turn] = list(turns or [])

    def add_user(self, text: str) -> None:
        self.turns.append(Turn("user", text))

    def add_assistant(self, text: str) -> None:
        self.turns.append(Turn("assistant", text))

    def last_user_text(self) -> str:
        return self.turns[-1].text

    def validate(self) -> None:
        if not self.turns:
            raise InvalidDialogue("dialogue is empty")
        if self.turns[0].role != "user":
            raise InvalidDialogue("first turn must have role 'user'")
        for prev, cur in zip(self.turns, self.turns[1:]):
            if prev.role == cur.role:
                raise InvalidDialogue("roles must strictly alternate")
        if self.turns[-1].role != "user":
            raise InvalidDialogue("a submitted dialogue must end with a user turn")

    def __len__(self) -> int:
        return len(self.turns)


@dataclass(frozen=True)
class Completion:
    text: str
    prompt_tokens: int
    completion_tokens: int
    model_id: str


def extract_code_block(text: str) -> str:
    """Return the first fenced code block, or the whole reply trimmed.

    Blocks beyond the first are ignored; a blank result raises EmptyScript.
    """
    match = _FENCE_RE.search(text)
    script = match.group(1) if match else text
    script = script.strip()
    if not script:
        raise EmptyScript("reply contained no script")
    return script


@dataclass
class ScriptRecord:
    """One expected call in a mock session.

    ``kinds`` lists the acceptable template kinds for this call; most records
    name exactly one kind, but branch points whose kind depends on the seeded
    RNG (havoc vs. pattern in the stall phase) may accept alternatives.
    """

    kinds: tuple[str, ...]
    reply: str
    prompt_tokens: int | None = None
    completion_tokens: int | None = None

    @classmethod
    def of(cls, kind: str, reply: str, **kw) -> "ScriptRecord":
        return cls(tuple(kind.split("|")), reply, **kw)


class MockBackend:
    """Deterministic scripted backend.

    Replies are consumed in order; each call is checked against the expected
    template kind of its last user turn, so a campaign that renders prompts
    out of order fails loudly instead of silently desynchronizing.
    """

    def __init__(self, records: list[ScriptRecord], library: PromptLibrary,
                 model_id: str = "mock"):
        self.records = list(records)
        self.library = library
        self.model_id = model_id
        self.cursor = 0
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, raw_records: list[dict], library: PromptLibrary,
                    model_id: str = "mock") -> "MockBackend":
        records = [
            ScriptRecord.of(
                r["kind"], r["reply"],
                prompt_tokens=r.get("prompt_tokens"),
                completion_tokens=r.get("completion_tokens"),
            )
            for r in raw_records
        ]
        return cls(records, library, model_id=model_id)

    def complete(self, dialogue: Dialogue, temperature: float, max_tokens: int) -> Completion:
        with self._lock:
            if self.cursor >= len(self.records):
                raise TransportError(f"mock script exhausted after {self.cursor} calls")
            record = self.records[self.cursor]
            kind = self.library.classify(dialogue.last_user_text())
            if kind not in record.kinds:
                raise MockScriptMismatch(
                    f"call {self.cursor}: expected {record.kinds}, got {kind!r}"
                )
            self.cursor += 1
        prompt_tokens = record.prompt_tokens
        if prompt_tokens is None:
            prompt_tokens = sum(estimate_tokens(t.text) for t in dialogue.turns)
        completion_tokens = record.completion_tokens
        if completion_tokens is None:
            completion_tokens = estimate_tokens(record.reply)
        return Completion(record.reply, prompt_tokens, completion_tokens, self.model_id)


class HttpBackend:
    """OpenAI-style ``/chat/completions`` backend."""

    def __init__(self, base_url: str, model_id: str, api_key: str = "",
                 timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.model_id = model_id
        self.api_key = api_key
        self.timeout = timeout

    def complete(self, dialogue: Dialogue, temperature: float, max_tokens: int) -> Completion:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": self.model_id,
            "messages": [{"role": t.role, "content": t.text} for t in dialogue.turns],
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        try:
            resp = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload, headers=headers, timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code >= 500:
            raise TransportError(f"server error {resp.status_code}")
        if resp.status_code != 200:
            raise TransportError(f"request failed: {resp.status_code} {resp.text[:200]}")
        body = resp.json()
        text = body["choices"][0]["message"]["content"] or ""
        usage = body.get("usage", {})
        return Completion(
            text,
            int(usage.get("prompt_tokens", estimate_tokens(str(payload["messages"])))),
            int(usage.get("completion_tokens", estimate_tokens(text))),
            self.model_id,
        )


class LLMGateway:
    """Budget-aware front door to a chat-completion backend.

    Safe for concurrent use: the ledger and transcript are updated under a
    lock, and the scripted mock serializes its own cursor.
    """

    def __init__(self, backend, ledger: UsageLedger | None = None,
                 price_table: PriceTable | None = None,
                 token_budget: int | None = None,
                 cost_budget: float | None = None,
                 temperature: float = DEFAULT_TEMPERATURE,
                 max_tokens: int = DEFAULT_MAX_TOKENS,
                 retries: int = 2,
                 record_transcript: bool = True):
        self.backend = backend
        self.ledger = ledger if ledger is not None else UsageLedger()
        self.price_table = price_table or {}
        self.token_budget = token_budget
        self.cost_budget = cost_budget
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.retries = retries
        self.record_transcript = record_transcript
        self.transcript: list[dict] = []
        self._lock = threading.Lock()

    def _check_budget(self, dialogue: Dialogue) -> None:
        est_prompt = sum(estimate_tokens(t.text) for t in dialogue.turns)
        if self.token_budget is not None:
            if self.ledger.total_tokens() + est_prompt > self.token_budget:
                raise BudgetExceeded(
                    f"token budget {self.token_budget} would be exceeded "
                    f"(used {self.ledger.total_tokens()}, request ≈{est_prompt})"
                )
        if self.cost_budget is not None and self.price_table:
            model = getattr(self.backend, "model_id", "")
            price = self.price_table.get(model)
            est_cost = self.ledger.cost(self.price_table, strict=False)
            if price is not None:
                est_cost += est_prompt * price.input
            if est_cost > self.cost_budget:
                raise BudgetExceeded(
                    f"cost budget {self.cost_budget} would be exceeded (≈{est_cost:.6f})"
                )

    def complete(self, dialogue: Dialogue, temperature: float | None = None,
                 max_tokens: int | None = None) -> Completion:
        dialogue.validate()
        temperature = self.temperature if temperature is None else temperature
        max_tokens = self.max_tokens if max_tokens is None else max_tokens
        with self._lock:
            self._check_budget(dialogue)
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            try:
                completion = self.backend.complete(dialogue, temperature, max_tokens)
                break
            except TransportError as exc:
                last_exc = exc
                # The mock's exhaustion is a hard failure, not a flaky link.
                if isinstance(self.backend, MockBackend):
                    raise
                logger.warning("transport error (attempt %d): %s", attempt + 1, exc)
        else:
            raise TransportError(f"gave up after {self.retries + 1} attempts: {last_exc}")
        if not completion.text.strip():
            raise EmptyReply("model returned an empty reply")
        with self._lock:
            self.ledger.record(completion)
            if self.record_transcript:
                self.transcript.append({
                    "prompt": dialogue.last_user_text(),
                    "reply": completion.text,
                    "prompt_tokens": completion.prompt_tokens,
                    "completion_tokens": completion.completion_tokens,
                    "model_id": completion.model_id,
                })
        return completion

    def call_count(self) -> int:
        return len(self.transcript)
