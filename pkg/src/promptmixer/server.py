"""HTTP + WebSocket service around one console engine.

Protocol (normative field names in docs/protocol.md):

* ``GET /state``        full state document
* ``GET /config``       surface and preset definitions
* ``GET /session/log``  the append-only session log, one JSON record per line
* ``WS  /ws``           client sends Command records, server broadcasts
                        Event records, both with a ``kind`` discriminator

Commands funnel through one lock (single writer).  Completions run in a
worker thread and re-enter through the same lock.  Each subscriber gets a
bounded queue: slow consumers are disconnected rather than allowed to
back-pressure the applier.  ``fader_moved`` ticks are paced out at the
recall tick interval so clients can animate motorized travel, and ticks
for a fader the human has since grabbed are dropped (human wins over motor).
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, PlainTextResponse

from .console import Engine
from .errors import GatewayError

log = logging.getLogger(__name__)

QUEUE_LIMIT = 256


@dataclass(eq=False)  # identity semantics: subscribers live in a set
class _Subscriber:
    socket: WebSocket
    queue: asyncio.Queue = field(
        default_factory=lambda: asyncio.Queue(maxsize=QUEUE_LIMIT))
    task: asyncio.Task | None = None


class Hub:
    """Fan-out of engine events to websocket subscribers."""

    def __init__(self, engine: Engine, realtime: bool):
        self.engine = engine
        self.realtime = realtime
        self.subscribers: set[_Subscriber] = set()
        self.cmd_seq = 0
        self._fader_override: dict[str, int] = {}
        self._personality_ids = set(engine.config.personality_fader_ids())

    def note_command(self, command: dict) -> int:
        self.cmd_seq += 1
        if (command.get("kind") == "set_control"
                and command.get("id") in self._personality_ids):
            self._fader_override[command["id"]] = self.cmd_seq
        return self.cmd_seq

    def publish(self, seq: int, events: list[dict]) -> None:
        for sub in list(self.subscribers):
            for event in events:
                try:
                    sub.queue.put_nowait((seq, event))
                except asyncio.QueueFull:
                    log.warning("dropping slow subscriber")
                    self.detach(sub)
                    break

    def attach(self, socket: WebSocket) -> _Subscriber:
        sub = _Subscriber(socket=socket)
        self.subscribers.add(sub)
        return sub

    def detach(self, sub: _Subscriber) -> None:
        self.subscribers.discard(sub)
        if sub.task is not None:
            sub.task.cancel()

    def filter_fader_event(self, seq: int, event: dict) -> dict | None:
        """Drop tick values for faders manually moved after this tick."""
        values = {
            fid: v for fid, v in event["values"].items()
            if self._fader_override.get(fid, 0) <= seq
        }
        if not values:
            return None
        return {**event, "values": values}

    async def sender(self, sub: _Subscriber) -> None:
        tick_s = self.engine.config.recall_tick_ms / 1000
        try:
            while True:
                seq, event = await sub.queue.get()
                if event["kind"] == "fader_moved":
                    filtered = self.filter_fader_event(seq, event)
                    if filtered is None:
                        continue
                    if self.realtime:
                        await asyncio.sleep(tick_s)
                    event = filtered
                await sub.socket.send_text(
                    json.dumps(event, separators=(",", ":")))
        except (WebSocketDisconnect, RuntimeError, asyncio.CancelledError):
            self.detach(sub)


def create_app(engine: Engine, realtime: bool = True) -> FastAPI:
    """Build the service around an engine created with inline_completion=False."""
    app = FastAPI(title="promptmixer console")
    hub = Hub(engine, realtime=realtime)
    lock = asyncio.Lock()
    app.state.engine = engine
    app.state.hub = hub
    app.state.apply_command = None  # assigned below; used by the MIDI pump

    async def apply_command(command: dict) -> list[dict]:
        async with lock:
            seq = hub.note_command(command)
            before = engine.pending_chain
            events = engine.apply(command)
            chain = engine.pending_chain
            hub.publish(seq, events)
        if (chain is not None and chain is not before
                and not engine.inline_completion):
            asyncio.get_running_loop().create_task(run_completion(chain))
        return events

    app.state.apply_command = apply_command

    async def run_completion(chain) -> None:
        try:
            result = await asyncio.to_thread(engine._run_completion, chain)
        except GatewayError as exc:
            async with lock:
                hub.publish(hub.cmd_seq, engine.deliver_failure(exc))
        else:
            async with lock:
                hub.publish(hub.cmd_seq, engine.deliver_result(result))

    @app.get("/state")
    async def get_state() -> dict:
        async with lock:
            return engine.state_doc()

    @app.get("/config")
    async def get_config() -> dict:
        return engine.config.to_doc()

    @app.get("/session/log")
    async def get_log() -> PlainTextResponse:
        async with lock:
            lines = [json.dumps(r, separators=(",", ":"), sort_keys=True)
                     for r in engine.log.records]
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""))

    @app.get("/")
    async def index() -> HTMLResponse:
        return HTMLResponse(
            "<html><body><h1>promptmixer console</h1>"
            "<p>Service endpoints: GET /state, GET /config, GET /session/log, "
            "WS /ws. The browser console lives in the frontend package.</p>"
            "</body></html>"
        )

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket) -> None:
        await socket.accept()
        sub = hub.attach(socket)
        sub.task = asyncio.get_running_loop().create_task(hub.sender(sub))
        async with lock:
            initial = {"kind": "state_changed", "state": engine.state_doc()}
        await sub.queue.put((hub.cmd_seq, initial))
        try:
            while True:
                raw = await socket.receive_text()
                try:
                    command = json.loads(raw)
                    if not isinstance(command, dict):
                        raise ValueError("command must be an object")
                except ValueError as exc:
                    await sub.queue.put((hub.cmd_seq, {
                        "kind": "error", "error": "bad_message",
                        "message": str(exc), "command": None,
                    }))
                    continue
                await apply_command(command)
        except WebSocketDisconnect:
            pass
        finally:
            hub.detach(sub)

    return app


def attach_midi_port(app: FastAPI, engine: Engine, adapter,
                     port_name: str) -> None:
    """Pump a platform MIDI input port into the command applier.

    Needs the ``[midi]`` extra (mido + a port backend); raw message bytes go
    through the same decoder/mapping as capture files.
    """
    try:
        import mido
    except ImportError as exc:  # pragma: no cover - hardware-only path
        raise SystemExit(
            "MIDI port support needs the [midi] extra: "
            "pip install 'promptmixer[midi]'"
        ) from exc

    @app.on_event("startup")
    async def start_midi() -> None:  # pragma: no cover - hardware-only path
        loop = asyncio.get_running_loop()
        queue: asyncio.Queue = asyncio.Queue()

        def reader() -> None:
            with mido.open_input(port_name) as port:
                for message in port:
                    loop.call_soon_threadsafe(queue.put_nowait,
                                              bytes(message.bytes()))

        async def drain() -> None:
            while True:
                data = await queue.get()
                for control_id, value in adapter.feed(data):
                    await app.state.apply_command(
                        {"kind": "set_control", "id": control_id,
                         "raw": value})

        import threading

        threading.Thread(target=reader, daemon=True,
                         name="midi-reader").start()
        loop.create_task(drain())


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8321,
          realtime: bool = True) -> None:
    import uvicorn

    uvicorn.run(create_app(engine, realtime=realtime),
                host=host, port=port, log_level="info")
