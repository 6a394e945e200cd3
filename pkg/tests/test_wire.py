import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtsumm.exceptions import ContractViolation, ParseError
from rtsumm.session import SummaryRequest
from rtsumm.transcript import Scope, Utterance
from rtsumm.wire import WireEvent, dump_inbound, emit_event, parse_event


def test_parse_utterance():
    e = parse_event('{"type":"utterance","session":"s1","id":"u1","text":"xin chào","t_start":0,"t_end":1.5,"speaker":"bs"}')
    assert e.type == "utterance" and e.session == "s1" and e.inbound
    assert e.utterance() == Utterance("u1", "xin chào", 0, 1.5, "bs")


def test_parse_unknown_type():
    with pytest.raises(ParseError) as err:
        parse_event('{"type":"dance"}')
    assert err.value.field == "type"


def test_parse_missing_t_start():
    with pytest.raises(ParseError) as err:
        parse_event('{"type":"utterance","session":"s","id":"u","text":"a","t_end":1}')
    assert err.value.field == "t_start"


@pytest.mark.parametrize(
    "line, field",
    [
        ('{"type":"utterance","session":"s","id":"u","text":"a","t_start":"0","t_end":1}', "t_start"),
        ('{"type":"utterance","session":"s","id":"u","text":"a","t_start":0,"t_end":1,"mood":"x"}', "mood"),
        ('{"type":"end_of_conversation"}', "session"),
        ('{"type":"end_of_conversation","session":""}', "session"),
        ('{"type":"local_summary","session":"s","utterance_ids":["a"],"text":"x","window_index":-1}', "window_index"),
        ('{"type":"utterance","session":"s","id":"u","text":"a","t_start":true,"t_end":1}', "t_start"),
    ],
)
def test_parse_strictness(line, field):
    with pytest.raises(ParseError) as err:
        parse_event(line)
    assert err.value.field == field


@pytest.mark.parametrize("line", ["not json", "[1,2]", '{"type":"utterance","session":"s","id":"u","text":"a","t_start":NaN,"t_end":1}'])
def test_parse_garbage(line):
    with pytest.raises(ParseError):
        parse_event(line)


def test_emit_local_summary_round_trip():
    req = SummaryRequest("s", Scope.LOCAL, (Utterance("u1", "a", 0, 1), Utterance("u2", "b", 1, 2)), 3)
    e = WireEvent.summary(req, "tóm tắt")
    line = emit_event(e)
    assert "\n" not in line
    assert parse_event(line) == e
    assert json.loads(line)["window_index"] == 3


def test_emit_global_summary_has_all_ids():
    utts = tuple(Utterance(f"u{i}", "a", i, i + 1) for i in range(6))
    line = emit_event(WireEvent.summary(SummaryRequest("s", Scope.GLOBAL, utts), "x"))
    obj = json.loads(line)
    assert obj["type"] == "global_summary" and obj["utterance_ids"] == [f"u{i}" for i in range(6)]


def test_emit_rejects_inbound():
    with pytest.raises(ContractViolation):
        emit_event(WireEvent.from_utterance("s", Utterance("u", "a", 0, 1)))
    with pytest.raises(ContractViolation):
        dump_inbound(WireEvent.error("s", "x"))


def test_inbound_dump_parses_back():
    e = WireEvent.from_utterance("s", Utterance("u", "a\nb", 0, 1))
    assert parse_event(dump_inbound(e)) == e


ids = st.text(min_size=1, max_size=8)
outbound = st.one_of(
    st.builds(
        lambda s, w, u, t: WireEvent("local_summary", s, {"window_index": w, "utterance_ids": u, "text": t}),
        ids, st.integers(0, 10**6), st.lists(ids, max_size=6), st.text(),
    ),
    st.builds(lambda s, u, t: WireEvent("global_summary", s, {"utterance_ids": u, "text": t}), ids, st.lists(ids, max_size=6), st.text()),
    st.builds(
        lambda s, m, w: WireEvent.error(s, m, w),
        st.one_of(st.none(), ids), st.text(), st.one_of(st.none(), st.integers(0, 100)),
    ),
)


@given(outbound)
def test_emit_parse_identity(e):
    line = emit_event(e)
    assert "\n" not in line
    assert parse_event(line) == e
