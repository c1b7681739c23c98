"""Console service: owns the surface, slate, presets, gateway and session log.

All mutation funnels through ``Engine.apply``: one single-writer entry that
validates a command, mutates the owning modules, appends session records and
returns the broadcast events.  The session log is append-only, one JSON
record per line, and is sufficient to rebuild the session: ``replay`` runs
the logged commands against a fresh engine and verifies every compiled
chain byte-for-byte.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .compiler import PromptChain, compile_chain
from .config import AppConfig
from .errors import (
    BusyError,
    CorruptLogError,
    GatewayError,
    MixerError,
    WrongKindError,
)
from .gateway import CompletionRequest, CompletionResult, Gateway, StubBackend
from .slate import Board

#: log record kinds that replay re-applies as commands
COMMAND_KINDS = {
    "control_set", "preset_selected", "mode_selected",
    "tile_placed", "tile_removed", "submitted",
}

#: pseudo control id used to log the compile-mode toggle
MIXERLESS_ID = "mixerless"


class StepClock:
    """Deterministic millisecond clock: advances by one per reading."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def __call__(self) -> int:
        self._now += 1
        return self._now


def wall_clock_ms() -> int:
    return int(time.time() * 1000)


class SessionLog:
    """Append-only session record sink, optionally mirrored to a file."""

    def __init__(self, path: str | Path | None = None):
        self.records: list[dict] = []
        self._fh: IO[str] | None = None
        if path is not None:
            # a session owns its file: fresh truncate, then append-only
            self._fh = open(path, "w", encoding="utf-8")

    def append(self, record: dict) -> None:
        self.records.append(record)
        if self._fh is not None:
            self._fh.write(json.dumps(record, separators=(",", ":"),
                                      sort_keys=True) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    @staticmethod
    def parse(text: str) -> list[dict]:
        """Parse a log file's text; raises CorruptLog on structural damage."""
        records = []
        last_seq = 0
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as exc:
                raise CorruptLogError(lineno, f"bad JSON: {exc}") from exc
            for key in ("seq", "ts_ms", "kind", "payload"):
                if key not in record:
                    raise CorruptLogError(record.get("seq", lineno),
                                          f"missing field {key!r}")
            if record["seq"] <= last_seq:
                raise CorruptLogError(record["seq"], "sequence not increasing")
            last_seq = record["seq"]
            records.append(record)
        return records


class Engine:
    """Single-writer orchestrator behind the HTTP/WS service and the CLI.

    With ``inline_completion`` (the default) a submit runs the backend
    before returning, which keeps headless sessions and replays simple and
    deterministic.  The server turns it off and delivers results through
    ``deliver_result`` / ``deliver_failure`` once its worker finishes.
    """

    def __init__(self, config: AppConfig, backend=None,
                 log_path: str | Path | None = None,
                 clock=None, inline_completion: bool = True):
        self.config = config
        self.state = config.new_surface()
        self.board = Board(config.vocabulary)
        self.presets = config.presets
        self.table = config.table
        self.backend = backend if backend is not None else config.make_backend()
        self.mixerless = False
        self.busy = False
        self.last_response: str | None = None
        self.last_submitted_text: str | None = None
        self.inline_completion = inline_completion
        self.log = SessionLog(log_path)
        self.compiled_chains: list[bytes] = []
        self._seq = 0
        self._pending_chain: PromptChain | None = None
        if clock is None:
            self._clock = wall_clock_ms
            sleep = time.sleep
        else:
            self._clock = clock
            sleep = lambda s: None  # virtual time: no real backoff waits
        self.gateway = Gateway(
            self.backend,
            clock=lambda: self._clock() / 1000.0,
            sleep=sleep,
        )

    # ------------------------------------------------------------------
    # command application

    def apply(self, command: dict) -> list[dict]:
        """Apply one command; returns the broadcast events it produced."""
        kind = command.get("kind")
        handlers = {
            "set_control": self._apply_set_control,
            "select_personality_preset": self._apply_select_preset,
            "select_mode": self._apply_select_mode,
            "place_tile": self._apply_place_tile,
            "remove_tile": self._apply_remove_tile,
            "submit": self._apply_submit,
            "set_mixerless": self._apply_set_mixerless,
        }
        handler = handlers.get(kind)
        if handler is None:
            return self._fail(kind, WrongKindError(f"unknown command {kind!r}"))
        try:
            return handler(command)
        except MixerError as exc:
            return self._fail(kind, exc)
        except (KeyError, TypeError) as exc:
            return self._fail(kind, WrongKindError(f"malformed command: {exc}"))

    def _apply_set_control(self, command: dict) -> list[dict]:
        control_id = command["id"]
        raw = command["raw"]
        value = self.state.set_control(control_id, raw)
        self._record("control_set", {"id": control_id, "raw": raw,
                                     "value": value})
        return [self._state_event()]

    def _apply_set_mixerless(self, command: dict) -> list[dict]:
        enabled = bool(command["enabled"])
        self.mixerless = enabled
        # the compile-mode toggle is not a surface control; it is logged on
        # a reserved pseudo id so sessions stay replayable
        self._record("control_set", {"id": MIXERLESS_ID, "value": enabled})
        return [self._state_event()]

    def _apply_select_mode(self, command: dict) -> list[dict]:
        mode = self.presets.mode(command["id"])
        knob = self.state.spec("mode")
        self.state.set_control("mode", knob.position_labels.index(mode.id))
        self._record("mode_selected", {"id": mode.id})
        return [self._state_event()]

    def _apply_select_preset(self, command: dict) -> list[dict]:
        persona = self.presets.persona(command["id"])
        knob = self.state.spec("personality_preset")
        self.state.set_control("personality_preset",
                               knob.position_labels.index(persona.id))
        plan = self.presets.plan_recall(
            persona.id,
            {fid: self.state.value(fid) for fid in persona.fader_targets},
        )
        self._record("preset_selected", {"id": persona.id})
        events = []
        tick = self.config.recall_tick_ms
        times = list(range(tick, plan.duration_ms, tick)) + [plan.duration_ms]
        for t in times:
            values = plan.values_at(t)
            for fid in self.config.personality_fader_ids():
                if fid in values and values[fid] != self.state.value(fid):
                    self.state.set_control(fid, values[fid])
            events.append({"kind": "fader_moved", "t_ms": t,
                           "values": {fid: self.state.value(fid)
                                      for fid in values}})
        events.append(self._state_event())
        return events

    def _apply_place_tile(self, command: dict) -> list[dict]:
        self.board.place_tile(command["row"], command["col"], command["word"])
        self._record("tile_placed", {"row": command["row"],
                                     "col": command["col"],
                                     "word": command["word"].lower()})
        return [self._state_event()]

    def _apply_remove_tile(self, command: dict) -> list[dict]:
        word = self.board.remove_tile(command["row"], command["col"])
        self._record("tile_removed", {"row": command["row"],
                                      "col": command["col"], "word": word})
        return [self._state_event()]

    def _apply_submit(self, command: dict) -> list[dict]:
        if self.busy:
            raise BusyError("a completion is already in flight")
        tiles = self.board.read_board()
        snapshot = self.state.snapshot()
        mode = self.config.mode_for_position(self.state.value("mode"))
        chain = compile_chain(snapshot, tiles, mode, self.table,
                              mixerless=self.mixerless)
        chain_bytes = chain.to_bytes()
        self.compiled_chains.append(chain_bytes)
        self.last_submitted_text = tiles
        self._record("submitted", {
            "tiles": tiles,
            "mixerless": self.mixerless,
            "snapshot_revision": snapshot.revision,
        })
        self._record("chain_compiled",
                     {"chain": chain_bytes.decode("utf-8")})
        self.busy = True
        self._pending_chain = chain
        events = [self._state_event()]
        if self.inline_completion:
            try:
                result = self._run_completion(chain)
            except GatewayError as exc:
                events.extend(self.deliver_failure(exc))
            else:
                events.extend(self.deliver_result(result))
        return events

    # ------------------------------------------------------------------
    # completion delivery (used inline and by the async server)

    def _run_completion(self, chain: PromptChain) -> CompletionResult:
        request = CompletionRequest(
            chain=chain,
            timeout_ms=self.config.backend.timeout_ms,
            retry_budget=self.config.backend.retry_budget,
        )
        return self.gateway.complete(request)

    def deliver_result(self, result: CompletionResult) -> list[dict]:
        self.busy = False
        self._pending_chain = None
        self.last_response = result.text
        self._record("response_received", {
            "text": result.text,
            "backend": result.backend_id,
            "latency_ms": result.latency_ms,
            "retries": result.retries,
        })
        return [
            {"kind": "response_ready", "text": result.text,
             "input_text": self.last_submitted_text},
            self._state_event(),
        ]

    def deliver_failure(self, exc: GatewayError) -> list[dict]:
        self.busy = False
        self._pending_chain = None
        return self._fail("submit", exc)

    @property
    def pending_chain(self) -> PromptChain | None:
        return self._pending_chain

    # ------------------------------------------------------------------
    # state and event plumbing

    def state_doc(self) -> dict:
        try:
            input_text = self.board.read_board()
        except MixerError:
            input_text = ""
        values = self.state.values()
        mode_spec = self.state.spec("mode")
        preset_spec = self.state.spec("personality_preset")
        return {
            "revision": self.state.revision,
            "specs": [s.to_doc() for s in self.state.specs],
            "values": values,
            "board": self.board.to_doc(),
            "input_text": input_text,
            "last_submitted_text": self.last_submitted_text,
            "last_response": self.last_response,
            "busy": self.busy,
            "mixerless": self.mixerless,
            "mode": mode_spec.position_labels[values["mode"]],
            "personality_preset":
                preset_spec.position_labels[values["personality_preset"]],
        }

    def _state_event(self) -> dict:
        return {"kind": "state_changed", "state": self.state_doc()}

    def _fail(self, command_kind, exc: MixerError) -> list[dict]:
        self._record("error", {"error": exc.code, "message": str(exc),
                               "command": command_kind})
        return [{"kind": "error", "error": exc.code, "message": str(exc),
                 "command": command_kind}]

    def _record(self, kind: str, payload: dict) -> None:
        self._seq += 1
        self.log.append({"seq": self._seq, "ts_ms": self._clock(),
                         "kind": kind, "payload": payload})

    def close(self) -> None:
        self.log.close()


# ----------------------------------------------------------------------
# replay


@dataclass(frozen=True)
class ChainCheck:
    seq: int
    matches: bool


@dataclass(frozen=True)
class ReplayResult:
    engine: Engine
    checks: tuple[ChainCheck, ...]

    @property
    def all_match(self) -> bool:
        return all(c.matches for c in self.checks)


def replay(records: list[dict], config: AppConfig,
           backend=None) -> ReplayResult:
    """Re-run a session's commands on a fresh engine.

    Command-kind records are re-applied; every logged compiled chain must
    byte-match the chain the fresh engine compiles at the same point.
    Responses come from the stub backend unless another one is supplied.
    """
    engine = Engine(config, backend=backend or StubBackend(),
                    clock=StepClock())
    expected: list[tuple[int, str]] = []
    for record in records:
        kind = record["kind"]
        payload = record.get("payload", {})
        if kind == "chain_compiled":
            expected.append((record["seq"], payload["chain"]))
            continue
        if kind not in COMMAND_KINDS:
            if kind not in ("response_received", "error"):
                raise CorruptLogError(record["seq"],
                                      f"unknown record kind {kind!r}")
            continue
        try:
            command = _record_to_command(kind, payload)
        except (KeyError, TypeError) as exc:
            raise CorruptLogError(record["seq"],
                                  f"malformed payload: {exc}") from exc
        if kind == "submitted" and bool(
                payload.get("mixerless", engine.mixerless)) != engine.mixerless:
            raise CorruptLogError(record["seq"],
                                  "mixerless flag diverges from command history")
        events = engine.apply(command)
        if kind == "submitted" and any(e["kind"] == "error" for e in events):
            raise CorruptLogError(record["seq"],
                                  "logged submit failed on replay")

    produced = engine.compiled_chains
    checks = []
    for i, (seq, logged) in enumerate(expected):
        recompiled = produced[i].decode("utf-8") if i < len(produced) else None
        checks.append(ChainCheck(seq=seq, matches=recompiled == logged))
    return ReplayResult(engine=engine, checks=tuple(checks))


def _record_to_command(kind: str, payload: dict) -> dict:
    if kind == "control_set":
        if payload["id"] == MIXERLESS_ID:
            return {"kind": "set_mixerless", "enabled": payload["value"]}
        return {"kind": "set_control", "id": payload["id"],
                "raw": payload["raw"]}
    if kind == "preset_selected":
        return {"kind": "select_personality_preset", "id": payload["id"]}
    if kind == "mode_selected":
        return {"kind": "select_mode", "id": payload["id"]}
    if kind == "tile_placed":
        return {"kind": "place_tile", "row": payload["row"],
                "col": payload["col"], "word": payload["word"]}
    if kind == "tile_removed":
        return {"kind": "remove_tile", "row": payload["row"],
                "col": payload["col"]}
    if kind == "submitted":
        return {"kind": "submit"}
    raise KeyError(kind)
