"""Core value types: utterances, conversations, window policies, summaries."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from ._validation import check_positive
from .exceptions import EmptyConversation
from .rouge import tokenize

DEFAULT_N_MAX = 4
DEFAULT_T_MAX = 30.0


class Scope(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Utterance:
    """One timestamped transcript fragment.

    Times are seconds relative to the start of the conversation. Construction
    does not enforce invariants so that malformed input can be reported by
    :func:`validate_conversation` instead of failing early.
    """

    id: str
    text: str
    t_start: float
    t_end: float
    speaker: Optional[str] = None

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass(frozen=True)
class Conversation:
    id: str
    utterances: tuple[Utterance, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))

    def __len__(self):
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    @property
    def text(self) -> str:
        return " ".join(u.text for u in self.utterances)


@dataclass(frozen=True)
class WindowPolicy:
    """Flush rule: close a window at ``n_max`` utterances or ``t_max`` seconds."""

    n_max: int = DEFAULT_N_MAX
    t_max: float = DEFAULT_T_MAX

    def __post_init__(self):
        check_positive(self.n_max, "n_max", integer=True)
        check_positive(self.t_max, "t_max")


@dataclass(frozen=True)
class SummaryUnit:
    scope: Scope
    utterance_ids: tuple[str, ...]
    text: str
    window_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "scope", Scope(self.scope))
        object.__setattr__(self, "utterance_ids", tuple(self.utterance_ids))


def span(utterances: Sequence[Utterance]) -> float:
    """Seconds from the first start to the latest end.

    The latest end rather than the last utterance's end is used, since
    overlapping turns can finish before an earlier one does.
    """
    if not utterances:
        return 0.0
    return max(u.t_end for u in utterances) - utterances[0].t_start


def conversation_span(c: Conversation) -> float:
    if not c.utterances:
        raise EmptyConversation(f"conversation {c.id!r} has no utterances")
    return span(c.utterances)


@dataclass(frozen=True)
class Finding:
    kind: str
    utterance_id: Optional[str]
    index: int
    message: str


# finding kinds
DUPLICATE_ID = "DuplicateId"
NON_MONOTONIC_TIME = "NonMonotonicTime"
EMPTY_TEXT = "EmptyText"
BAD_TIMES = "InvalidTimes"


def validate_utterance(u: Utterance, index: int = 0) -> list[Finding]:
    findings = []
    if not isinstance(u.text, str) or not tokenize(u.text):
        findings.append(Finding(EMPTY_TEXT, u.id, index, "text has no tokens"))
    if not (0 <= u.t_start <= u.t_end):
        findings.append(
            Finding(BAD_TIMES, u.id, index, f"need 0 <= t_start <= t_end, got [{u.t_start}, {u.t_end}]")
        )
    return findings


def validate_conversation(c: Conversation) -> list[Finding]:
    """Return every invariant violation found in *c*; an empty list means valid."""
    findings = []
    seen = set()
    prev_start = None
    for i, u in enumerate(c.utterances):
        if u.id in seen:
            findings.append(Finding(DUPLICATE_ID, u.id, i, f"utterance id {u.id!r} repeated"))
        seen.add(u.id)
        findings.extend(validate_utterance(u, i))
        if prev_start is not None and u.t_start < prev_start:
            findings.append(
                Finding(NON_MONOTONIC_TIME, u.id, i, f"t_start {u.t_start} < previous {prev_start}")
            )
        prev_start = u.t_start
    return findings
