"""Summarization backends behind one ``summarize(task, cfg)`` entry point.

``ExtractiveSummarizer`` is a deterministic lead baseline that keeps the
output within a fixed fraction of the transcript length. ``RemoteSummarizer``
calls a chat-completion style HTTP endpoint with a few-shot prompt.
Both follow the scikit-learn estimator protocol so they can be cloned,
grid-searched, and dropped into pipelines over lists of transcripts.
"""

from __future__ import annotations

import logging
import math
import os
import re
import threading
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import httpx
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_choice, check_positive, check_probability, check_text_list
from .exceptions import BackendUnavailable, EmptyResponse, EmptyTranscript, InvalidExample
from .rouge import tokenize
from .transcript import Scope

logger = logging.getLogger(__name__)

API_KEY_ENV = "RTSUMM_API_KEY"

DEFAULT_INSTRUCTION = (
    "Summarize the medical conversation transcript that follows. "
    "Use at most one fifth as many words as the transcript, unless the transcript is very short. "
    "Keep medical named entities such as symptoms, diseases, drugs and tests whenever they fit. "
    "Preserve what the speaker is doing: a question stays a question, advice stays advice. "
    "Write fluent, natural sentences in the language of the transcript."
)

_SENTENCE_END = re.compile(r"(?<=[.?!…])\s+")


@dataclass(frozen=True)
class SummarizeTask:
    transcript: str
    scope: Scope = Scope.LOCAL
    language: str = "vi"

    def __post_init__(self):
        object.__setattr__(self, "scope", Scope(self.scope))
        if not self.transcript or not self.transcript.strip():
            raise EmptyTranscript("summarize task needs a non-empty transcript")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "extractive"
    endpoint: Optional[str] = None
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.7
    top_p: float = 0.9
    timeout: float = 30.0
    max_retries: int = 2
    backoff: float = 0.5
    max_in_flight: int = 4
    example_pairs: tuple[tuple[str, str], ...] = ()
    n_examples: int = 2
    instruction: str = DEFAULT_INSTRUCTION
    ratio: float = 0.2

    def __post_init__(self):
        check_choice(self.kind, "kind", {"extractive", "remote"})
        check_positive(self.temperature, "temperature", strict=False)
        check_probability(self.top_p, "top_p")
        if self.top_p == 0:
            raise ValueError("top_p must be in (0, 1]")
        check_positive(self.max_retries, "max_retries", integer=True, strict=False)
        check_positive(self.timeout, "timeout")
        check_positive(self.backoff, "backoff", strict=False)
        check_positive(self.max_in_flight, "max_in_flight", integer=True)
        object.__setattr__(self, "example_pairs", tuple(tuple(p) for p in self.example_pairs))
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote backend needs an endpoint")


# -- extractive baseline ---------------------------------------------------


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_END.split(text.strip()) if s]


def _take_tokens(text: str, budget: int) -> str:
    """Leading raw words of *text* holding at most *budget* tokens."""
    out, used = [], 0
    for word in text.split():
        n = len(tokenize(word))
        if used + n > budget:
            break
        out.append(word)
        used += n
        if used == budget:
            break
    if not out:
        # first word alone carries more than budget tokens (e.g. "a,b,c")
        return " ".join(tokenize(text)[:budget])
    return " ".join(out)


def extractive_summarize(transcript: str, ratio: float = 0.2) -> str:
    """Lead baseline: whole leading sentences within ``floor(ratio * tokens)``.

    Falls back to the first ``budget`` tokens when even the first sentence
    is too long, which is the common case for unpunctuated ASR output.
    """
    n_tokens = len(tokenize(transcript))
    if n_tokens == 0:
        raise EmptyTranscript("transcript has no tokens")
    budget = max(1, math.floor(ratio * n_tokens))

    chosen, used = [], 0
    for sentence in split_sentences(transcript):
        n = len(tokenize(sentence))
        if used + n > budget:
            break
        chosen.append(sentence)
        used += n
    if used == 0:
        return _take_tokens(transcript, budget)
    return " ".join(chosen)


class ExtractiveSummarizer(BaseEstimator, TransformerMixin):
    """Deterministic lead summarizer.

    Parameters
    ----------
    ratio : float, default=0.2
        Fraction of transcript tokens the summary may use (at least one token).
    """

    def __init__(self, ratio=0.2):
        self.ratio = ratio

    def fit(self, X=None, y=None):
        check_probability(self.ratio, "ratio")
        if X is not None:
            check_text_list(X)
        self.is_fitted_ = True
        return self

    def transform(self, X):
        check_probability(self.ratio, "ratio")
        return [extractive_summarize(doc, self.ratio) for doc in check_text_list(X)]

    def summarize(self, task: SummarizeTask) -> str:
        return extractive_summarize(task.transcript, self.ratio)

    def __sklearn_is_fitted__(self):
        return True


# -- prompting and the remote client ----------------------------------------


def _format_example(i: int, transcript: str, summary: str) -> str:
    return f"Example {i}:\nTranscript: {transcript.strip()}\nSummary: {summary.strip()}"


def build_prompt_body(task: SummarizeTask, example_pairs: Sequence[tuple[str, str]], n_examples: int = 2) -> str:
    if len(example_pairs) != n_examples:
        raise InvalidExample(f"expected {n_examples} example pairs, got {len(example_pairs)}")
    blocks = []
    for i, pair in enumerate(example_pairs, 1):
        if len(pair) != 2:
            raise InvalidExample(f"example {i} must be a (transcript, summary) pair")
        transcript, summary = pair
        if not transcript or not transcript.strip():
            raise InvalidExample(f"example {i} has an empty transcript")
        if not summary or not summary.strip():
            raise InvalidExample(f"example {i} has an empty summary")
        blocks.append(_format_example(i, transcript, summary))
    blocks.append(f"Transcript: {task.transcript.strip()}\nSummary:")
    return "\n\n".join(blocks)


def build_prompt(
    task: SummarizeTask,
    example_pairs: Sequence[tuple[str, str]],
    instruction: str = DEFAULT_INSTRUCTION,
    n_examples: int = 2,
) -> str:
    """Instruction block, then the worked examples in order, then the task."""
    return instruction.strip() + "\n\n" + build_prompt_body(task, example_pairs, n_examples)


def build_request(task: SummarizeTask, cfg: BackendConfig) -> dict:
    """JSON body of a vendor-neutral chat-completion request."""
    return {
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": cfg.instruction.strip()},
            {"role": "user", "content": build_prompt_body(task, cfg.example_pairs, cfg.n_examples)},
        ],
        "temperature": cfg.temperature,
        "top_p": cfg.top_p,
    }


def parse_reply(body) -> str:
    """Pull the summary text out of a chat-completion response body."""
    try:
        text = body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        text = body.get("text") if isinstance(body, dict) else None
    if not isinstance(text, str) or not text.strip():
        raise EmptyResponse("backend reply carried no summary text")
    return text.strip()


def backoff_delays(max_retries: int, base: float) -> list[float]:
    """Sleep before each retry: base, 2*base, 4*base, ..."""
    return [base * 2**i for i in range(max_retries)]


class RemoteSummarizer(BaseEstimator, TransformerMixin):
    """Client for a chat-completion endpoint using a few-shot prompt.

    Sampling defaults are temperature 0.7 and top_p 0.9. Retries use
    exponential backoff; at most ``max_retries + 1`` requests are sent per
    summary and at most ``max_in_flight`` run at once per instance.
    """

    def __init__(
        self,
        endpoint=None,
        model="gpt-3.5-turbo",
        temperature=0.7,
        top_p=0.9,
        timeout=30.0,
        max_retries=2,
        backoff=0.5,
        max_in_flight=4,
        example_pairs=(),
        n_examples=2,
        instruction=DEFAULT_INSTRUCTION,
        api_key=None,
        transport=None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.top_p = top_p
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.max_in_flight = max_in_flight
        self.example_pairs = example_pairs
        self.n_examples = n_examples
        self.instruction = instruction
        self.api_key = api_key
        self.transport = transport

    @classmethod
    def from_config(cls, cfg: BackendConfig, **kwargs) -> "RemoteSummarizer":
        return cls(
            endpoint=cfg.endpoint,
            model=cfg.model,
            temperature=cfg.temperature,
            top_p=cfg.top_p,
            timeout=cfg.timeout,
            max_retries=cfg.max_retries,
            backoff=cfg.backoff,
            max_in_flight=cfg.max_in_flight,
            example_pairs=cfg.example_pairs,
            n_examples=cfg.n_examples,
            instruction=cfg.instruction,
            **kwargs,
        )

    @property
    def config(self) -> BackendConfig:
        return BackendConfig(
            kind="remote",
            endpoint=self.endpoint,
            model=self.model,
            temperature=self.temperature,
            top_p=self.top_p,
            timeout=self.timeout,
            max_retries=self.max_retries,
            backoff=self.backoff,
            max_in_flight=self.max_in_flight,
            example_pairs=tuple(self.example_pairs),
            n_examples=self.n_examples,
            instruction=self.instruction,
        )

    def fit(self, X=None, y=None):
        self.config_ = self.config
        self._semaphore = threading.BoundedSemaphore(self.config_.max_in_flight)
        self.attempts_ = 0
        return self

    def __sklearn_is_fitted__(self):
        return hasattr(self, "config_")

    def _headers(self):
        key = self.api_key or os.environ.get(API_KEY_ENV)
        return {"Authorization": f"Bearer {key}"} if key else {}

    def summarize(self, task: SummarizeTask) -> str:
        if not hasattr(self, "config_"):
            self.fit()
        cfg = self.config_
        payload = build_request(task, cfg)
        delays = backoff_delays(cfg.max_retries, cfg.backoff)
        last_error = None
        with self._semaphore, httpx.Client(timeout=cfg.timeout, transport=self.transport) as client:
            for attempt in range(cfg.max_retries + 1):
                if attempt:
                    time.sleep(delays[attempt - 1])
                self.attempts_ += 1
                try:
                    resp = client.post(cfg.endpoint, json=payload, headers=self._headers())
                except httpx.HTTPError as exc:
                    last_error = exc
                    logger.warning("attempt %d to %s failed: %s", attempt + 1, cfg.endpoint, exc)
                    continue
                if resp.status_code >= 500 or resp.status_code == 429:
                    last_error = f"HTTP {resp.status_code}"
                    logger.warning("attempt %d to %s got %s", attempt + 1, cfg.endpoint, last_error)
                    continue
                if resp.status_code >= 400:
                    raise BackendUnavailable(f"{cfg.endpoint} rejected the request: HTTP {resp.status_code}")
                try:
                    body = resp.json()
                except ValueError:
                    raise EmptyResponse("backend reply was not JSON") from None
                return parse_reply(body)
        raise BackendUnavailable(
            f"{cfg.endpoint} unreachable after {cfg.max_retries + 1} attempts: {last_error}"
        )

    def transform(self, X):
        return [self.summarize(SummarizeTask(doc)) for doc in check_text_list(X)]


def make_backend(cfg: BackendConfig):
    if cfg.kind == "extractive":
        return ExtractiveSummarizer(ratio=cfg.ratio)
    return RemoteSummarizer.from_config(cfg).fit()


def summarize(task: SummarizeTask, cfg: BackendConfig = BackendConfig()) -> str:
    """Summarize one task with the backend described by *cfg*."""
    text = make_backend(cfg).summarize(task)
    if not text:
        raise EmptyResponse("backend produced an empty summary")
    return text
