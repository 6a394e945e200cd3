import asyncio
import io
import json
import random
import threading
import time

import pytest

from rtsumm.backends import ExtractiveSummarizer
from rtsumm.service import Connection, ServeConfig, SummaryService, run_serve
from rtsumm.session import Session
from rtsumm.transcript import Utterance, WindowPolicy
from rtsumm.wire import WireEvent, dump_inbound, emit_event


def utterance_line(session, i, t0=None, dur=2.0, text=None):
    t0 = 2.0 * i if t0 is None else t0
    u = Utterance(f"u{i}", text or f"câu số {i} của bệnh nhân", t0, t0 + dur)
    return dump_inbound(WireEvent.from_utterance(session, u))


def end_line(session):
    return dump_inbound(WireEvent("end_of_conversation", session))


class Collector(Connection):
    def __init__(self):
        self.lines = []
        super().__init__(self.lines.append, name="test")

    @property
    def events(self):
        return [json.loads(line) for line in self.lines]


def run(service, lines):
    async def main():
        conn = Collector()
        try:
            await service.serve_lines(lines, conn, end_on_eof=False)
        finally:
            await service.close()
        return conn.events

    return asyncio.run(main())


def test_nine_utterances_three_locals_one_global():
    lines = [utterance_line("s", i) for i in range(9)] + [end_line("s")]
    events = run(SummaryService(ExtractiveSummarizer(), WindowPolicy(4, 30)), lines)
    assert [e["type"] for e in events] == ["local_summary"] * 3 + ["global_summary"]
    assert [e["window_index"] for e in events[:3]] == [0, 1, 2]
    assert [e["utterance_ids"] for e in events[:3]] == [["u0", "u1", "u2", "u3"], ["u4", "u5", "u6", "u7"], ["u8"]]
    assert events[-1]["utterance_ids"] == [f"u{i}" for i in range(9)]


def test_end_for_unknown_session_is_an_error():
    events = run(SummaryService(ExtractiveSummarizer()), [end_line("ghost")])
    assert events == [{"type": "error", "session": "ghost", "message": "unknown session 'ghost'", "code": "UnknownSession"}]


def test_bad_lines_produce_errors_and_do_not_stop_the_stream():
    lines = [
        "garbage",
        '{"type":"dance","session":"s"}',
        emit_event(WireEvent.error("s", "x")),
        utterance_line("s", 0, t0=10.0),
        utterance_line("s", 1, t0=5.0),  # out of order
        end_line("s"),
        utterance_line("s", 2, t0=100.0),  # after end
    ]
    events = run(SummaryService(ExtractiveSummarizer()), lines)
    types = [e["type"] for e in events]
    assert types[:3] == ["error"] * 3
    assert events[3]["code"] == "OutOfOrder"
    assert types[4:] == ["local_summary", "global_summary", "error"]
    assert events[-1]["code"] == "SessionEnded"


class JitterBackend:
    """Extractive output after a random delay, so completions arrive out of order."""

    def __init__(self, seed=0):
        self.rng = random.Random(seed)
        self.lock = threading.Lock()
        self.inner = ExtractiveSummarizer()

    def summarize(self, task):
        with self.lock:
            delay = self.rng.uniform(0, 0.02)
        time.sleep(delay)
        return self.inner.summarize(task)


def expected_for(session_id, utterances, policy):
    s = Session(session_id, policy)
    reqs = [r for u in utterances for r in s.ingest(u)] + s.end()
    return [(r.window_index, list(r.utterance_ids)) for r in reqs]


@pytest.mark.parametrize("seed", range(3))
def test_interleaved_sessions_keep_their_own_order(seed):
    rng = random.Random(seed)
    policy = WindowPolicy(3, 30)
    streams = {sid: [Utterance(f"u{i}", f"lời {sid} {i}", 3.0 * i, 3.0 * i + 2) for i in range(rng.randint(5, 14))] for sid in "abc"}
    cursors = {sid: 0 for sid in streams}
    lines = []
    while cursors:
        sid = rng.choice(sorted(cursors))
        i = cursors[sid]
        if i < len(streams[sid]):
            lines.append(dump_inbound(WireEvent.from_utterance(sid, streams[sid][i])))
            cursors[sid] += 1
        else:
            lines.append(end_line(sid))
            del cursors[sid]
    events = run(SummaryService(JitterBackend(seed), policy, max_in_flight=4), lines)
    for sid, utts in streams.items():
        got = [(e.get("window_index"), e["utterance_ids"]) for e in events if e["session"] == sid]
        assert got == expected_for(sid, utts, policy)


class FlakyBackend:
    def __init__(self, fail_on):
        self.fail_on = fail_on
        self.inner = ExtractiveSummarizer()

    def summarize(self, task):
        if any(word in task.transcript for word in self.fail_on):
            raise RuntimeError("model crashed")
        return self.inner.summarize(task)


def test_backend_failure_becomes_error_event_and_session_continues():
    lines = [utterance_line("s", i, text=("boom" if i == 5 else f"lời {i}")) for i in range(9)] + [end_line("s")]
    events = run(SummaryService(FlakyBackend({"boom"}), WindowPolicy(4, 30)), lines)
    assert [e["type"] for e in events] == ["local_summary", "error", "local_summary", "error"]
    assert events[1]["window_index"] == 1 and events[1]["code"] == "backend"
    # the global covers the failing text too, so it errors as well; every window is accounted for
    covered = {i for e in events if e["type"] == "local_summary" for i in e["utterance_ids"]}
    assert covered == {"u0", "u1", "u2", "u3", "u8"}


class HangingBackend:
    def __init__(self):
        self.release = threading.Event()
        self.inner = ExtractiveSummarizer()

    def summarize(self, task):
        if "hang" in task.transcript:
            self.release.wait(10)
        return self.inner.summarize(task)


def test_hanging_backend_does_not_block_other_sessions():
    backend = HangingBackend()
    lines = [utterance_line("slow", 0, text="hang now"), end_line("slow")]
    lines += [utterance_line("fast", i) for i in range(4)] + [end_line("fast")]
    service = SummaryService(backend, WindowPolicy(4, 30), backend_timeout=0.3, max_in_flight=2)
    try:
        start = time.monotonic()
        events = run(service, lines)
        elapsed = time.monotonic() - start
    finally:
        backend.release.set()
    fast = [e["type"] for e in events if e["session"] == "fast"]
    slow = [(e["type"], e.get("code")) for e in events if e["session"] == "slow"]
    assert fast == ["local_summary", "global_summary"]
    assert slow == [("error", "timeout"), ("error", "timeout")]
    assert elapsed < 3


def test_idle_sessions_are_ended_with_a_global_summary():
    async def main():
        service = SummaryService(ExtractiveSummarizer(), WindowPolicy(4, 30), idle_timeout=60)
        conn = Collector()
        for i in range(2):
            await service.handle_line(utterance_line("s", i), conn)
        now = asyncio.get_running_loop().time()
        assert service.end_idle(now + 30) == []
        assert service.end_idle(now + 61) == ["s"]
        await service.drain()
        await service.close()
        return conn.events

    events = asyncio.run(main())
    assert [e["type"] for e in events] == ["local_summary", "global_summary"]


def test_reaper_task_ends_idle_sessions():
    async def main():
        service = SummaryService(ExtractiveSummarizer(), idle_timeout=0.1)
        service.start_reaper(0.02)
        conn = Collector()
        await service.handle_line(utterance_line("s", 0), conn)
        await asyncio.sleep(0.4)
        await service.close()
        return conn.events

    assert [e["type"] for e in asyncio.run(main())] == ["local_summary", "global_summary"]


def test_run_serve_over_text_streams():
    lines = [utterance_line("s", i) for i in range(5)]  # no explicit end: EOF ends the session
    out = io.StringIO()
    run_serve(ServeConfig(policy=WindowPolicy(4, 30)), io.StringIO("\n".join(lines) + "\n"), out)
    events = [json.loads(line) for line in out.getvalue().splitlines()]
    assert [e["type"] for e in events] == ["local_summary", "local_summary", "global_summary"]


def test_tcp_transport():
    async def main():
        service = SummaryService(ExtractiveSummarizer(), WindowPolicy(2, 30))
        server = await service.start_server("127.0.0.1", 0)
        port = server.sockets[0].getsockname()[1]
        reader, writer = await asyncio.open_connection("127.0.0.1", port)
        payload = [utterance_line("t", i) for i in range(3)] + [end_line("t")]
        writer.write(("\n".join(payload) + "\n").encode())
        await writer.drain()
        got = []
        while len(got) < 3:
            line = await asyncio.wait_for(reader.readline(), 5)
            got.append(json.loads(line))
        writer.close()
        server.close()
        await server.wait_closed()
        await service.close()
        return got

    events = asyncio.run(main())
    assert [e["type"] for e in events] == ["local_summary", "local_summary", "global_summary"]


def test_dropped_client_keeps_session_for_reconnect():
    async def main():
        service = SummaryService(ExtractiveSummarizer(), WindowPolicy(4, 30))
        first, second = Collector(), Collector()
        await service.handle_line(utterance_line("s", 0), first)
        first.closed = True
        await service.handle_line(utterance_line("s", 1), second)
        await service.handle_line(end_line("s"), second)
        await service.drain()
        await service.close()
        return second.events

    assert [e["type"] for e in asyncio.run(main())] == ["local_summary", "global_summary"]
