"""Streaming summarization service.

Reads inbound wire events, drives the :class:`SessionEngine`, resolves each
summary request on a backend, and writes outbound events. Backend calls for
different windows run concurrently (bounded by ``max_in_flight``), but each
session's results are delivered strictly in window order with the global
summary last. A failed or timed-out backend call becomes an ``error`` event
for that window; the session carries on.
"""

from __future__ import annotations

import asyncio
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import AsyncIterator, Callable, Iterable, Optional, TextIO, Union

from .backends import BackendConfig, SummarizeTask, make_backend
from .exceptions import ParseError, RtsummError
from .session import SessionEngine, SummaryRequest
from .transcript import WindowPolicy
from .wire import WireEvent, emit_event, parse_event

logger = logging.getLogger(__name__)

DEFAULT_IDLE_TIMEOUT = 600.0


@dataclass
class ServeConfig:
    policy: WindowPolicy = field(default_factory=WindowPolicy)
    backend: BackendConfig = field(default_factory=BackendConfig)
    max_in_flight: int = 8
    backend_timeout: float = 60.0
    idle_timeout: float = DEFAULT_IDLE_TIMEOUT
    host: Optional[str] = None
    port: Optional[int] = None
    language: str = "vi"


class Connection:
    """Outbound side of one client; writes are serialized."""

    def __init__(self, write: Callable[[str], object], drain=None, name="conn"):
        self._write = write
        self._drain = drain
        self._lock = asyncio.Lock()
        self.name = name
        self.closed = False

    @classmethod
    def for_text(cls, fh: TextIO, name="stdout") -> "Connection":
        def write(line):
            fh.write(line)
            fh.flush()

        return cls(write, name=name)

    @classmethod
    def for_stream(cls, writer: asyncio.StreamWriter, name="tcp") -> "Connection":
        return cls(lambda line: writer.write(line.encode("utf-8")), writer.drain, name=name)

    async def send(self, event: WireEvent) -> None:
        if self.closed:
            logger.warning("%s closed; dropping %s for session %s", self.name, event.type, event.session)
            return
        line = emit_event(event) + "\n"
        async with self._lock:
            try:
                self._write(line)
                if self._drain is not None:
                    await self._drain()
            except (ConnectionError, OSError, ValueError) as exc:
                self.closed = True
                logger.warning("write to %s failed: %s", self.name, exc)


class _Outbox:
    """Ordered delivery of one session's outbound events.

    Items are ``(awaitable, connection)``; a ``None`` connection means the
    session's current owner.
    """

    def __init__(self, owner: Callable[[], Optional[Connection]]):
        self.queue: asyncio.Queue = asyncio.Queue()
        self.task = asyncio.create_task(self._run(owner))

    async def _run(self, owner):
        while True:
            pending, conn = await self.queue.get()
            try:
                event = await pending
                conn = conn or owner()
                if conn is not None:
                    await conn.send(event)
            finally:
                self.queue.task_done()

    def put(self, pending, conn: Optional[Connection] = None) -> None:
        self.queue.put_nowait((pending, conn))


class SummaryService:
    """Session-keyed streaming front end for a summarization backend.

    *summarizer* is anything with ``summarize(SummarizeTask) -> str`` or a
    plain callable taking a :class:`SummarizeTask`. It is called from worker
    threads.
    """

    def __init__(
        self,
        summarizer,
        policy: WindowPolicy = WindowPolicy(),
        *,
        max_in_flight: int = 8,
        backend_timeout: float = 60.0,
        idle_timeout: float = DEFAULT_IDLE_TIMEOUT,
        language: str = "vi",
    ):
        self.summarize = getattr(summarizer, "summarize", summarizer)
        self.engine = SessionEngine(policy)
        self.backend_timeout = backend_timeout
        self.idle_timeout = idle_timeout
        self.language = language
        self.max_in_flight = max_in_flight
        # hung backend threads outlive their timeout; leave room for them
        self._executor = ThreadPoolExecutor(max_workers=4 * max_in_flight + 4, thread_name_prefix="summarize")
        self._semaphore: Optional[asyncio.Semaphore] = None
        self._owners: dict[str, Connection] = {}
        self._outboxes: dict[str, _Outbox] = {}
        self._last_seen: dict[str, float] = {}
        self._reaper: Optional[asyncio.Task] = None

    # -- request resolution ------------------------------------------------

    async def _resolve(self, request: SummaryRequest) -> WireEvent:
        if self._semaphore is None:
            self._semaphore = asyncio.Semaphore(self.max_in_flight)
        task = SummarizeTask(request.transcript, request.scope, self.language)
        loop = asyncio.get_running_loop()
        try:
            async with self._semaphore:
                text = await asyncio.wait_for(
                    loop.run_in_executor(self._executor, self.summarize, task), self.backend_timeout
                )
            if not isinstance(text, str) or not text.strip():
                raise RtsummError("backend returned an empty summary")
        except asyncio.TimeoutError:
            logger.warning("backend timed out on %s window %s", request.session_id, request.window_index)
            return WireEvent.error(request.session_id, "backend timed out", request.window_index, "timeout")
        except Exception as exc:
            logger.warning("backend failed on %s window %s: %s", request.session_id, request.window_index, exc)
            return WireEvent.error(request.session_id, f"backend failed: {exc}", request.window_index, "backend")
        return WireEvent.summary(request, text.strip())

    def _outbox(self, session_id: str) -> _Outbox:
        outbox = self._outboxes.get(session_id)
        if outbox is None:
            outbox = self._outboxes[session_id] = _Outbox(lambda: self._owners.get(session_id))
        return outbox

    def _submit(self, requests: Iterable[SummaryRequest]) -> None:
        for request in requests:
            self._outbox(request.session_id).put(asyncio.ensure_future(self._resolve(request)))

    async def _reject(self, sid: Optional[str], conn: Connection, message: str, code: str) -> None:
        """Report a per-event error without overtaking the session's summaries."""
        event = WireEvent.error(sid, message, code=code)
        if sid in self._outboxes:
            done = asyncio.get_running_loop().create_future()
            done.set_result(event)
            self._outbox(sid).put(done, conn)
        else:
            await conn.send(event)

    # -- event handling ----------------------------------------------------

    async def handle_line(self, line: str, conn: Connection) -> None:
        if not line.strip():
            return
        try:
            event = parse_event(line)
        except ParseError as exc:
            await conn.send(WireEvent.error(None, str(exc), code="parse"))
            return
        await self.handle_event(event, conn)

    async def handle_event(self, event: WireEvent, conn: Connection) -> None:
        sid = event.session
        if not event.inbound:
            await self._reject(sid, conn, f"{event.type} is not accepted inbound", "contract")
            return
        loop = asyncio.get_running_loop()
        if event.type == "utterance":
            if sid not in self.engine:
                self.engine.new_session(sid)
            self._owners[sid] = conn
            try:
                requests = self.engine.ingest(sid, event.utterance())
            except (RtsummError, ValueError) as exc:
                await self._reject(sid, conn, str(exc), type(exc).__name__)
                return
            self._last_seen[sid] = loop.time()
            self._submit(requests)
        else:
            if sid not in self.engine:
                await self._reject(sid, conn, f"unknown session {sid!r}", "UnknownSession")
                return
            self._owners[sid] = conn
            try:
                requests = self.engine.end_session(sid)
            except RtsummError as exc:
                await self._reject(sid, conn, str(exc), type(exc).__name__)
                return
            self._last_seen.pop(sid, None)
            self._submit(requests)

    def end_idle(self, now: Optional[float] = None) -> list[str]:
        """End every open session idle for longer than ``idle_timeout``."""
        now = asyncio.get_running_loop().time() if now is None else now
        ended = []
        for sid, seen in list(self._last_seen.items()):
            if now - seen > self.idle_timeout and self.engine.get(sid).is_open:
                logger.info("session %s idle for %.0fs; ending", sid, now - seen)
                self._submit(self.engine.end_session(sid))
                self._last_seen.pop(sid, None)
                ended.append(sid)
        return ended

    def end_all(self, conn: Optional[Connection] = None) -> list[str]:
        """End open sessions (only those owned by *conn*, if given)."""
        ended = []
        for sid in self.engine.active_ids():
            if conn is None or self._owners.get(sid) is conn:
                self._submit(self.engine.end_session(sid))
                self._last_seen.pop(sid, None)
                ended.append(sid)
        return ended

    async def drain(self) -> None:
        """Wait until every submitted request has been delivered."""
        for outbox in list(self._outboxes.values()):
            await outbox.queue.join()

    async def _reap_forever(self, interval: float):
        while True:
            await asyncio.sleep(interval)
            self.end_idle()

    def start_reaper(self, interval: Optional[float] = None) -> None:
        if self._reaper is None:
            interval = interval or min(max(self.idle_timeout / 4, 0.05), 30.0)
            self._reaper = asyncio.create_task(self._reap_forever(interval))

    async def close(self) -> None:
        if self._reaper is not None:
            self._reaper.cancel()
            self._reaper = None
        await self.drain()
        for outbox in self._outboxes.values():
            outbox.task.cancel()
        self._executor.shutdown(wait=False, cancel_futures=True)

    # -- transports --------------------------------------------------------

    async def serve_lines(self, lines: Union[AsyncIterator[str], Iterable[str]], conn: Connection, *, end_on_eof: bool = True):
        """Consume *lines* until exhausted, then (optionally) end open sessions and drain."""
        if hasattr(lines, "__aiter__"):
            async for line in lines:
                await self.handle_line(line, conn)
        else:
            for line in lines:
                await self.handle_line(line, conn)
        if end_on_eof:
            self.end_all(conn)
        await self.drain()

    async def _handle_client(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info("peername")
        conn = Connection.for_stream(writer, name=f"tcp:{peer}")
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                await self.handle_line(raw.decode("utf-8", errors="replace"), conn)
        except (ConnectionError, asyncio.IncompleteReadError) as exc:
            logger.warning("connection %s failed: %s", peer, exc)
        # sessions survive a dropped client until their idle timeout
        await self.drain()
        conn.closed = True
        writer.close()

    async def start_server(self, host: str, port: int) -> asyncio.AbstractServer:
        self.start_reaper()
        return await asyncio.start_server(self._handle_client, host, port)


def build_service(config: ServeConfig, summarizer=None) -> SummaryService:
    return SummaryService(
        summarizer or make_backend(config.backend),
        config.policy,
        max_in_flight=config.max_in_flight,
        backend_timeout=config.backend_timeout,
        idle_timeout=config.idle_timeout,
        language=config.language,
    )


async def _stdin_lines(fh: TextIO):
    while True:
        line = await asyncio.to_thread(fh.readline)
        if not line:
            return
        yield line


async def serve_async(config: ServeConfig, input: Optional[TextIO] = None, output: Optional[TextIO] = None, summarizer=None):
    service = build_service(config, summarizer)
    try:
        if config.port is not None:
            server = await service.start_server(config.host or "127.0.0.1", config.port)
            addrs = ", ".join(str(s.getsockname()) for s in server.sockets)
            logger.info("listening on %s", addrs)
            async with server:
                await server.serve_forever()
        else:
            service.start_reaper()
            conn = Connection.for_text(output or sys.stdout)
            fh = input or sys.stdin
            # in-memory inputs never block; skip the reader thread
            lines = fh if _is_memory(fh) else _stdin_lines(fh)
            await service.serve_lines(lines, conn)
    finally:
        await service.close()


def _is_memory(fh) -> bool:
    try:
        fh.fileno()
    except (OSError, ValueError, AttributeError):
        return True
    return False


def run_serve(config: ServeConfig = ServeConfig(), input: Optional[TextIO] = None, output: Optional[TextIO] = None, summarizer=None):
    """Run the service until the input stream ends (stdio) or forever (TCP)."""
    asyncio.run(serve_async(config, input, output, summarizer))
