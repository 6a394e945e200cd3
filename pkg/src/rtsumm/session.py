"""Streaming windowing state machine.

A :class:`Session` buffers utterances and closes a local window when it holds
``n_max`` utterances, or before an arrival that would stretch the window past
``t_max`` seconds. Ending a session flushes any residual window and then
requests exactly one global summary over the full history.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .exceptions import (
    DuplicateUtterance,
    OutOfOrder,
    SessionEnded,
    SessionExists,
    UnknownSession,
)
from .transcript import Scope, Utterance, WindowPolicy, span, validate_utterance


class FlushDecision(str, Enum):
    NO = "no"
    FLUSH_BEFORE_ADD = "flush_before_add"
    FLUSH_AFTER_ADD = "flush_after_add"


class SessionState(str, Enum):
    OPEN = "open"
    ENDED = "ended"


@dataclass(frozen=True)
class SummaryRequest:
    session_id: str
    scope: Scope
    utterances: tuple[Utterance, ...]
    window_index: Optional[int] = None

    @property
    def utterance_ids(self) -> tuple[str, ...]:
        return tuple(u.id for u in self.utterances)

    @property
    def transcript(self) -> str:
        return " ".join(u.text for u in self.utterances)


def should_flush(buffer: Sequence[Utterance], incoming: Utterance, policy: WindowPolicy) -> FlushDecision:
    """Decide how *incoming* interacts with the open window.

    A lone utterance longer than ``t_max`` cannot be split, so on an empty
    buffer it is flushed straight after being added.
    """
    if buffer and span([*buffer, incoming]) > policy.t_max:
        return FlushDecision.FLUSH_BEFORE_ADD
    if len(buffer) + 1 >= policy.n_max:
        return FlushDecision.FLUSH_AFTER_ADD
    if not buffer and incoming.duration > policy.t_max:
        return FlushDecision.FLUSH_AFTER_ADD
    return FlushDecision.NO


class Session:
    """Windowing state for one conversation.

    Not thread-safe on its own; :class:`SessionEngine` serializes access.
    """

    def __init__(self, id: str, policy: WindowPolicy = WindowPolicy()):
        self.id = id
        self.policy = policy
        self.buffer: list[Utterance] = []
        self.history: list[Utterance] = []
        self.emitted = 0
        self.state = SessionState.OPEN
        self._ids: set[str] = set()

    def __repr__(self):
        return (
            f"Session(id={self.id!r}, state={self.state.value}, buffered={len(self.buffer)}, "
            f"seen={len(self.history)}, emitted={self.emitted})"
        )

    @property
    def is_open(self) -> bool:
        return self.state is SessionState.OPEN

    def _check_open(self):
        if not self.is_open:
            raise SessionEnded(f"session {self.id!r} has ended")

    def _flush(self) -> SummaryRequest:
        req = SummaryRequest(self.id, Scope.LOCAL, tuple(self.buffer), self.emitted)
        self.emitted += 1
        self.buffer = []
        return req

    def ingest(self, u: Utterance) -> list[SummaryRequest]:
        self._check_open()
        problems = validate_utterance(u)
        if problems:
            raise ValueError(f"invalid utterance {u.id!r}: {problems[0].message}")
        if u.id in self._ids:
            raise DuplicateUtterance(f"utterance id {u.id!r} already seen in session {self.id!r}")
        if self.history and u.t_start < self.history[-1].t_start:
            raise OutOfOrder(
                f"utterance {u.id!r} starts at {u.t_start}, before previous start {self.history[-1].t_start}"
            )

        requests = []
        decision = should_flush(self.buffer, u, self.policy)
        if decision is FlushDecision.FLUSH_BEFORE_ADD:
            requests.append(self._flush())
            decision = should_flush(self.buffer, u, self.policy)
        self.buffer.append(u)
        self.history.append(u)
        self._ids.add(u.id)
        if decision is FlushDecision.FLUSH_AFTER_ADD:
            requests.append(self._flush())
        return requests

    def end(self) -> list[SummaryRequest]:
        self._check_open()
        self.state = SessionState.ENDED
        if not self.history:
            return []
        requests = []
        if self.buffer:
            requests.append(self._flush())
        requests.append(SummaryRequest(self.id, Scope.GLOBAL, tuple(self.history)))
        return requests


class SessionEngine:
    """Registry of sessions keyed by id.

    Each session has its own lock, so operations on one session run in call
    order while distinct sessions never contend.
    """

    def __init__(self, policy: WindowPolicy = WindowPolicy()):
        self.policy = policy
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def __contains__(self, session_id):
        return session_id in self._sessions

    def __len__(self):
        return len(self._sessions)

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def active_ids(self) -> list[str]:
        return [sid for sid, s in self._sessions.items() if s.is_open]

    def new_session(self, session_id: str, policy: Optional[WindowPolicy] = None) -> Session:
        with self._registry_lock:
            existing = self._sessions.get(session_id)
            if existing is not None and existing.is_open:
                raise SessionExists(f"session {session_id!r} is already active")
            session = Session(session_id, policy or self.policy)
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
            return session

    def ingest(self, session_id: str, u: Utterance) -> list[SummaryRequest]:
        session = self.get(session_id)
        with self._locks[session_id]:
            return session.ingest(u)

    def end_session(self, session_id: str) -> list[SummaryRequest]:
        session = self.get(session_id)
        with self._locks[session_id]:
            return session.end()

    def discard(self, session_id: str) -> None:
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._locks.pop(session_id, None)


def new_session(id: str, policy: WindowPolicy = WindowPolicy()) -> Session:
    return Session(id, policy)


def ingest(session: Session, u: Utterance) -> list[SummaryRequest]:
    return session.ingest(u)


def end_session(session: Session) -> list[SummaryRequest]:
    return session.end()
