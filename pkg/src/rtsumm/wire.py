"""Newline-delimited JSON events exchanged with streaming clients.

Inbound: ``utterance``, ``end_of_conversation``.
Outbound: ``local_summary``, ``global_summary``, ``error``.

Every line is one JSON object with a ``type`` and a ``session`` key; the
remaining keys depend on the type. Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

from .exceptions import ContractViolation, ParseError
from .session import SummaryRequest
from .transcript import Scope, Utterance

INBOUND = frozenset({"utterance", "end_of_conversation"})
OUTBOUND = frozenset({"local_summary", "global_summary", "error"})

# type -> (required fields, optional fields), excluding "type" and "session"
_SCHEMA = {
    "utterance": ({"id", "text", "t_start", "t_end"}, {"speaker"}),
    "end_of_conversation": (set(), set()),
    "local_summary": ({"window_index", "utterance_ids", "text"}, set()),
    "global_summary": ({"utterance_ids", "text"}, set()),
    "error": ({"message"}, {"window_index", "code"}),
}


@dataclass(frozen=True)
class WireEvent:
    type: str
    session: Optional[str]
    payload: dict = field(default_factory=dict)

    @property
    def inbound(self) -> bool:
        return self.type in INBOUND

    def utterance(self) -> Utterance:
        p = self.payload
        return Utterance(id=p["id"], text=p["text"], t_start=p["t_start"], t_end=p["t_end"], speaker=p.get("speaker"))

    @classmethod
    def from_utterance(cls, session: str, u: Utterance) -> "WireEvent":
        payload = {"id": u.id, "text": u.text, "t_start": u.t_start, "t_end": u.t_end}
        if u.speaker is not None:
            payload["speaker"] = u.speaker
        return cls("utterance", session, payload)

    @classmethod
    def summary(cls, request: SummaryRequest, text: str) -> "WireEvent":
        payload = {"utterance_ids": list(request.utterance_ids), "text": text}
        if request.scope is Scope.LOCAL:
            payload["window_index"] = request.window_index
            return cls("local_summary", request.session_id, payload)
        return cls("global_summary", request.session_id, payload)

    @classmethod
    def error(cls, session: Optional[str], message: str, window_index: Optional[int] = None, code: Optional[str] = None):
        payload: dict[str, Any] = {"message": message}
        if window_index is not None:
            payload["window_index"] = window_index
        if code is not None:
            payload["code"] = code
        return cls("error", session, payload)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_field(name: str, value) -> None:
    ok = {
        "id": lambda v: isinstance(v, str) and v != "",
        "text": lambda v: isinstance(v, str),
        "speaker": lambda v: v is None or isinstance(v, str),
        "t_start": _is_number,
        "t_end": _is_number,
        "window_index": lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0,
        "utterance_ids": lambda v: isinstance(v, list) and all(isinstance(x, str) for x in v),
        "message": lambda v: isinstance(v, str),
        "code": lambda v: isinstance(v, str),
    }[name]
    if not ok(value):
        raise ParseError(f"bad value for {name}: {value!r}", field=name)


def parse_event(line: str) -> WireEvent:
    """Strictly parse one line into a :class:`WireEvent`."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("event must be a JSON object")
    if "type" not in obj:
        raise ParseError("missing field type", field="type")
    etype = obj.pop("type")
    if etype not in _SCHEMA:
        raise ParseError(f"unknown type {etype!r}", field="type")
    if "session" not in obj:
        raise ParseError("missing field session", field="session")
    session = obj.pop("session")
    if etype == "error":
        if session is not None and not isinstance(session, str):
            raise ParseError("session must be a string or null", field="session")
    elif not isinstance(session, str) or not session:
        raise ParseError("session must be a non-empty string", field="session")

    required, optional = _SCHEMA[etype]
    for name in sorted(required):
        if name not in obj:
            raise ParseError(f"{etype} missing field {name}", field=name)
    unknown = sorted(set(obj) - required - optional)
    if unknown:
        raise ParseError(f"unknown field {unknown[0]} for {etype}", field=unknown[0])
    for name, value in obj.items():
        _check_field(name, value)
    return WireEvent(etype, session, obj)


def emit_event(e: WireEvent) -> str:
    """Serialize an outbound event to a single line (no trailing newline)."""
    if e.type not in OUTBOUND:
        raise ContractViolation(f"{e.type!r} is not an outbound event type")
    return json.dumps({"type": e.type, "session": e.session, **e.payload}, ensure_ascii=False)


def dump_inbound(e: WireEvent) -> str:
    """Serialize an inbound event, for clients and transcript replay files."""
    if e.type not in INBOUND:
        raise ContractViolation(f"{e.type!r} is not an inbound event type")
    return json.dumps({"type": e.type, "session": e.session, **e.payload}, ensure_ascii=False)
