"""Deterministic compilation of surface snapshots and tile text into prompt chains.

Continuous control values are quantized into equal-width bins; each bin maps
to a fixed clause template from the descriptor table.  Neutral bins render
empty, so a control at rest contributes nothing — returning a knob to its
neutral detent removes its clause entirely, like lifting a filter off a mix.

The compiled chain is a pure function of (snapshot, tiles, mode, table):
equal inputs yield byte-identical output.
"""

from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigError, EmptyInputError, UnknownControlError
from .presets import ModePreset
from .surface import ControlSnapshot

COMPILER_VERSION = "1"

#: system-message section assembly order
SECTION_ORDER = ("mode", "personality", "filters", "effects")


def quantize(value: float, bin_count: int,
             lo: float = -1.0, hi: float = 1.0) -> int:
    """Index of the equal-width bin holding ``value`` over [lo, hi].

    Bins are left-closed; the final bin is right-closed so ``hi`` lands in
    bin ``bin_count - 1``.
    """
    if bin_count < 2:
        raise ConfigError("need at least 2 bins")
    edges = [lo + i * (hi - lo) / bin_count for i in range(1, bin_count)]
    return min(bisect_right(edges, value), bin_count - 1)


@dataclass(frozen=True)
class DescriptorEntry:
    """Clause templates for one control, one per quantization bin."""

    control_id: str
    section: str  # personality | filters | effects
    bipolar: bool
    templates: tuple[str, ...]

    def __post_init__(self):
        if len(self.templates) < 2:
            raise ConfigError(f"{self.control_id}: need >= 2 bin templates")
        if self.bipolar:
            if len(self.templates) % 2 == 0:
                raise ConfigError(
                    f"{self.control_id}: bipolar controls need an odd bin "
                    f"count so a centre bin exists"
                )
            centre = self.templates[len(self.templates) // 2]
            if centre != "":
                raise ConfigError(
                    f"{self.control_id}: the centre bin must render empty"
                )
        if self.section not in ("personality", "filters", "effects"):
            raise ConfigError(f"{self.control_id}: bad section {self.section!r}")

    @property
    def value_range(self) -> tuple[float, float]:
        return (-1.0, 1.0) if self.bipolar else (0.0, 1.0)


class DescriptorTable:
    """All descriptor entries plus the native-sampling knob mapping."""

    def __init__(self, entries: list[DescriptorEntry],
                 temperature_range: tuple[float, float] = (0.0, 1.5),
                 temperature_control: str = "temperature"):
        self.entries = {e.control_id: e for e in entries}
        if len(self.entries) != len(entries):
            raise ConfigError("duplicate descriptor entries")
        t_min, t_max = temperature_range
        if not 0 <= t_min < t_max:
            raise ConfigError(f"bad temperature range [{t_min}, {t_max}]")
        self.temperature_range = (float(t_min), float(t_max))
        self.temperature_control = temperature_control

    def without(self, control_id: str) -> "DescriptorTable":
        """Copy of the table with one control's entry removed."""
        return DescriptorTable(
            [e for cid, e in self.entries.items() if cid != control_id],
            temperature_range=self.temperature_range,
            temperature_control=self.temperature_control,
        )


def render_clause(control_id: str, value: float, table: DescriptorTable) -> str:
    """The clause template for the bin holding ``value``; may be empty."""
    try:
        entry = table.entries[control_id]
    except KeyError:
        raise UnknownControlError(control_id) from None
    lo, hi = entry.value_range
    return entry.templates[quantize(value, len(entry.templates), lo, hi)]


def temperature_map(knob: float, t_range: tuple[float, float] = (0.0, 1.5)) -> float:
    """Affine map of the temperature knob onto the native sampling range.

    Written as a two-sided lerp so both endpoints land exactly on the
    configured bounds.
    """
    t_min, t_max = t_range
    return t_min * (1 - knob) + t_max * knob


@dataclass(frozen=True)
class PromptChain:
    """Role-tagged messages plus native sampling parameters."""

    messages: tuple[tuple[str, str], ...]
    sampling: Mapping[str, float | None]
    provenance: Mapping[str, str | int]

    def __post_init__(self):
        roles = [r for r, _ in self.messages]
        if roles.count("system") < 1 or roles.count("user") != 1:
            raise ConfigError(
                "chain needs at least one system message and exactly one "
                "user message"
            )

    @property
    def system_text(self) -> str:
        return "\n\n".join(t for r, t in self.messages if r == "system")

    @property
    def user_text(self) -> str:
        return next(t for r, t in self.messages if r == "user")

    def to_doc(self) -> dict:
        return {
            "messages": [[r, t] for r, t in self.messages],
            "sampling": dict(self.sampling),
            "provenance": dict(self.provenance),
        }

    def to_bytes(self) -> bytes:
        return json.dumps(self.to_doc(), separators=(",", ":"),
                          sort_keys=True).encode("utf-8")

    @classmethod
    def from_doc(cls, doc: dict) -> "PromptChain":
        return cls(
            messages=tuple((r, t) for r, t in doc["messages"]),
            sampling=doc["sampling"],
            provenance=doc["provenance"],
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "PromptChain":
        return cls.from_doc(json.loads(data.decode("utf-8")))


def build_sections(snapshot: ControlSnapshot, mode: ModePreset,
                   table: DescriptorTable) -> dict[str, str]:
    """Assemble each system-message section from the snapshot.

    Controls contribute in snapshot (canonical) order; empty clauses vanish.
    """
    clauses: dict[str, list[str]] = {"personality": [], "filters": [], "effects": []}
    for control_id, value in snapshot.pairs:
        entry = table.entries.get(control_id)
        if entry is None:
            continue
        clause = render_clause(control_id, value, table)
        if clause:
            clauses[entry.section].append(clause)
    sections = {"mode": mode.task_instruction}
    for name in ("personality", "filters", "effects"):
        sections[name] = " ".join(clauses[name])
    return sections


def compile_chain(snapshot: ControlSnapshot, tiles: str, mode: ModePreset,
                  table: DescriptorTable, mixerless: bool = False,
                  mixerless_keep_mode: bool = False) -> PromptChain:
    """Compile one prompt chain.

    The system message holds the mode task instruction followed by the
    personality, filter, and effect clause sections; the user message is the
    tile text verbatim.  With ``mixerless`` every clause section is dropped
    and sampling falls back to the backend default (the tiles-only baseline);
    the mode instruction survives only when explicitly requested.
    """
    tiles = tiles.strip()
    if not tiles:
        raise EmptyInputError("no tile text to compile")

    if mixerless:
        system_text = mode.task_instruction if mixerless_keep_mode else ""
        temperature = None
    else:
        sections = build_sections(snapshot, mode, table)
        system_text = "\n\n".join(
            sections[name] for name in SECTION_ORDER if sections[name]
        )
        try:
            knob = snapshot.value(table.temperature_control)
        except UnknownControlError:
            temperature = None  # surface without the knob: backend default
        else:
            temperature = temperature_map(float(knob), table.temperature_range)

    return PromptChain(
        messages=(("system", system_text), ("user", tiles)),
        sampling={"temperature": temperature},
        provenance={
            "snapshot_revision": snapshot.revision,
            "compiler_version": COMPILER_VERSION,
        },
    )
