"""MIDI 1.0 byte-stream parsing and control-change mapping.

Only control-change messages become events; every other voice family is
consumed (so running status stays coherent) and dropped.  Real-time bytes
(0xF8-0xFF) may legally appear mid-message and are skipped without touching
decoder state.  Arbitrary garbage never crashes the decoder: orphan data
bytes are counted and discarded.

``decode`` is chunk-safe: the returned remainder, prepended to the next
chunk, reproduces the decoder state (running status byte + buffered data),
so splitting a stream anywhere yields the same event sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .surface import ControlSurfaceState, normalize_midi

_CC_STATUS = 0xB0
_SYSEX_START = 0xF0


@dataclass(frozen=True)
class MidiEvent:
    channel: int  # 0..15
    controller: int  # 0..127
    value: int  # 0..127
    kind: str = "control-change"


@dataclass(frozen=True)
class DecodeResult:
    events: tuple[MidiEvent, ...]
    remainder: bytes
    skipped: int


def _data_length(status: int) -> int:
    return 1 if status & 0xF0 in (0xC0, 0xD0) else 2


class MidiDecoder:
    """Sequential state machine; one instance per input port."""

    def __init__(self):
        self._status: int | None = None
        self._pending: list[int] = []
        self._in_sysex = False
        self.skipped = 0

    def feed(self, data: bytes) -> list[MidiEvent]:
        events: list[MidiEvent] = []
        for b in data:
            if b >= 0xF8:  # real-time: transparent, even mid-message
                continue
            if 0x80 <= b <= 0xEF:  # voice status: (re)arm running status
                self.skipped += len(self._pending)
                self._status = b
                self._pending = []
                self._in_sysex = False
            elif 0xF0 <= b <= 0xF7:  # system common: cancels running status
                self.skipped += len(self._pending)
                self._status = None
                self._pending = []
                self._in_sysex = b == _SYSEX_START
            elif self._in_sysex:
                continue  # sysex payload, ignored
            elif self._status is None:
                self.skipped += 1  # orphan data byte
            else:
                self._pending.append(b)
                if len(self._pending) == _data_length(self._status):
                    if self._status & 0xF0 == _CC_STATUS:
                        events.append(MidiEvent(
                            channel=self._status & 0x0F,
                            controller=self._pending[0],
                            value=self._pending[1],
                        ))
                    self._pending = []
        return events

    @property
    def remainder(self) -> bytes:
        if self._in_sysex:
            return bytes([_SYSEX_START])
        if self._status is not None:
            return bytes([self._status, *self._pending])
        return b""


def decode(data: bytes) -> DecodeResult:
    """Stateless one-shot decode; prepend the remainder to the next chunk."""
    decoder = MidiDecoder()
    events = decoder.feed(data)
    return DecodeResult(tuple(events), decoder.remainder, decoder.skipped)


@dataclass(frozen=True)
class MidiMapping:
    """(channel, controller) -> surface control id."""

    entries: dict[tuple[int, int], str]

    def validate(self, state: ControlSurfaceState) -> None:
        for (channel, controller), control_id in self.entries.items():
            if not (0 <= channel <= 15 and 0 <= controller <= 127):
                raise ConfigError(
                    f"mapping key ({channel}, {controller}) out of range"
                )
            state.spec(control_id)  # raises UnknownControlError

    @classmethod
    def from_doc(cls, doc: dict) -> "MidiMapping":
        """Parse ``{"entries": [{"channel", "controller", "control"}...]}``."""
        entries: dict[tuple[int, int], str] = {}
        for row in doc["entries"]:
            key = (int(row["channel"]), int(row["controller"]))
            if key in entries:
                raise ConfigError(f"duplicate mapping for {key}")
            entries[key] = row["control"]
        return cls(entries=entries)


def map_event(event: MidiEvent, mapping: MidiMapping) -> tuple[str, int] | None:
    """Surface command for a mapped event, or None for unmapped ones."""
    control_id = mapping.entries.get((event.channel, event.controller))
    if control_id is None:
        return None
    return (control_id, event.value)


@dataclass
class MidiAdapter:
    """Streaming decoder plus mapping, feeding the surface owner.

    ``feed`` turns raw port bytes into (control id, native value) commands
    using the surface's own MIDI normalization; unmapped events are counted
    and dropped.
    """

    mapping: MidiMapping
    state: ControlSurfaceState
    decoder: MidiDecoder = field(default_factory=MidiDecoder)
    dropped: int = 0

    def feed(self, data: bytes) -> list[tuple[str, float | int]]:
        commands = []
        for event in self.decoder.feed(data):
            mapped = map_event(event, self.mapping)
            if mapped is None:
                self.dropped += 1
                continue
            control_id, raw7 = mapped
            spec = self.state.spec(control_id)
            commands.append(
                (control_id, normalize_midi(raw7, spec.kind, spec.positions))
            )
        return commands
