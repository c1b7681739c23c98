"""Control surface: the fixed taxonomy of faders and knobs plus live state.

The surface is a set of declared controls (specs) and one value per control.
Continuous controls (faders, non-detented knobs) store floats; selector
knobs store a position index.  All mutation goes through ``set_control``,
which clamps continuous input to the physical range the way a real fader
hits its end stop, and bumps a monotone revision counter.

Snapshots freeze the surface in a canonical order so that equal states
always serialize to identical bytes; the prompt compiler consumes snapshots,
never live state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .errors import (
    ConfigError,
    OutOfRangeError,
    UnknownControlError,
    WrongKindError,
)


class Kind(str, Enum):
    BIPOLAR_FADER = "bipolar-fader"
    POLAR_KNOB = "polar-knob"
    BIPOLAR_KNOB = "bipolar-knob"
    SELECTOR_KNOB = "selector-knob"


class Group(str, Enum):
    PERSONALITY = "personality"
    FILTERS = "filters"
    EFFECTS = "effects"
    MODES = "modes"
    PRESETS = "presets"
    SYSTEM = "system"


#: canonical snapshot ordering of groups; declaration order within a group
GROUP_ORDER = (
    Group.SYSTEM,
    Group.MODES,
    Group.PRESETS,
    Group.PERSONALITY,
    Group.FILTERS,
    Group.EFFECTS,
)

BIPOLAR_KINDS = (Kind.BIPOLAR_FADER, Kind.BIPOLAR_KNOB)


@dataclass(frozen=True)
class ControlSpec:
    """Declaration of one physical control.

    ``pole_labels`` holds two endpoint labels for bipolar kinds and a single
    axis label for a polar knob.  Selector knobs instead carry ``positions``
    detents and one label per position.
    """

    id: str
    kind: Kind
    group: Group
    pole_labels: tuple[str, ...] = ()
    positions: int = 0
    position_labels: tuple[str, ...] = ()
    default: float | int = 0

    def __post_init__(self):
        if self.kind is Kind.SELECTOR_KNOB:
            if self.positions < 2:
                raise ConfigError(f"{self.id}: selector needs >= 2 positions")
            if len(self.position_labels) != self.positions:
                raise ConfigError(
                    f"{self.id}: expected {self.positions} position labels, "
                    f"got {len(self.position_labels)}"
                )
            if self.pole_labels:
                raise ConfigError(f"{self.id}: selector knobs have no pole labels")
        else:
            if self.positions or self.position_labels:
                raise ConfigError(f"{self.id}: only selector knobs have positions")
            expected = 2 if self.kind in BIPOLAR_KINDS else 1
            if len(self.pole_labels) != expected:
                raise ConfigError(
                    f"{self.id}: {self.kind.value} needs {expected} pole label(s)"
                )

    @property
    def value_range(self) -> tuple[float, float]:
        if self.kind in BIPOLAR_KINDS:
            return (-1.0, 1.0)
        if self.kind is Kind.POLAR_KNOB:
            return (0.0, 1.0)
        return (0, self.positions - 1)

    def to_doc(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind.value,
            "group": self.group.value,
            "default": self.default,
        }
        if self.kind is Kind.SELECTOR_KNOB:
            doc["positions"] = self.positions
            doc["position_labels"] = list(self.position_labels)
        else:
            doc["pole_labels"] = list(self.pole_labels)
        return doc


@dataclass(frozen=True)
class ControlSnapshot:
    """Immutable capture of the surface in canonical order."""

    pairs: tuple[tuple[str, float | int], ...]
    revision: int

    def value(self, control_id: str) -> float | int:
        for cid, v in self.pairs:
            if cid == control_id:
                return v
        raise UnknownControlError(control_id)

    def payload_bytes(self) -> bytes:
        """Serialization of the values alone (revision excluded)."""
        return json.dumps([[c, v] for c, v in self.pairs],
                          separators=(",", ":")).encode("utf-8")

    def to_bytes(self) -> bytes:
        doc = {"revision": self.revision,
               "controls": [[c, v] for c, v in self.pairs]}
        return json.dumps(doc, separators=(",", ":")).encode("utf-8")


class ControlSurfaceState:
    """Authoritative mutable surface: one value per declared control.

    Single-writer by contract; snapshots are immutable values safe to hand
    to concurrent readers.
    """

    def __init__(self, specs: list[ControlSpec]):
        seen = set()
        for spec in specs:
            if spec.id in seen:
                raise ConfigError(f"duplicate control id {spec.id!r}")
            seen.add(spec.id)
        self._specs = {s.id: s for s in specs}
        self._order = _canonical_order(specs)
        self._values: dict[str, float | int] = {}
        self.revision = 0
        for spec in specs:
            self._values[spec.id] = self._coerce(spec, spec.default)

    @property
    def specs(self) -> list[ControlSpec]:
        return [self._specs[c] for c in self._order]

    def spec(self, control_id: str) -> ControlSpec:
        try:
            return self._specs[control_id]
        except KeyError:
            raise UnknownControlError(control_id) from None

    def value(self, control_id: str) -> float | int:
        self.spec(control_id)
        return self._values[control_id]

    def set_control(self, control_id: str, raw) -> float | int:
        """Store ``raw`` on a control, clamped to its range.

        Returns the value actually stored.  Continuous out-of-range input
        clamps (a physical fader cannot leave its track); selector indices
        must be whole numbers inside [0, positions).
        """
        spec = self.spec(control_id)
        value = self._coerce(spec, raw)
        self._values[control_id] = value
        self.revision += 1
        return value

    def snapshot(self) -> ControlSnapshot:
        pairs = tuple((c, self._values[c]) for c in self._order)
        return ControlSnapshot(pairs=pairs, revision=self.revision)

    def values(self) -> dict[str, float | int]:
        return {c: self._values[c] for c in self._order}

    @staticmethod
    def _coerce(spec: ControlSpec, raw) -> float | int:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise WrongKindError(f"{spec.id}: expected a number, got {raw!r}")
        if spec.kind is Kind.SELECTOR_KNOB:
            if float(raw) != int(raw):
                raise WrongKindError(
                    f"{spec.id}: selector position must be a whole number, "
                    f"got {raw!r}"
                )
            index = int(raw)
            if not 0 <= index < spec.positions:
                raise OutOfRangeError(
                    f"{spec.id}: position {index} outside 0..{spec.positions - 1}"
                )
            return index
        value = float(raw)
        if value != value:  # NaN: not a physical fader position
            raise WrongKindError(f"{spec.id}: value must be a real number")
        lo, hi = spec.value_range
        return min(max(value, lo), hi)


def _canonical_order(specs: list[ControlSpec]) -> list[str]:
    by_group: dict[Group, list[str]] = {g: [] for g in GROUP_ORDER}
    for spec in specs:
        by_group[spec.group].append(spec.id)
    return [cid for g in GROUP_ORDER for cid in by_group[g]]


def normalize_midi(raw7: int, kind: Kind, positions: int = 0) -> float | int:
    """Map a 7-bit controller value onto a control's native range.

    Bipolar mapping is piecewise around 64 so a hardware centre detent lands
    exactly on 0.0; 127 reaches +1.0 and 0 clamps to -1.0.
    """
    if not 0 <= raw7 <= 127:
        raise OutOfRangeError(f"MIDI value {raw7} outside 0..127")
    if kind is Kind.POLAR_KNOB:
        return raw7 / 127
    if kind in BIPOLAR_KINDS:
        return min(max((raw7 - 64) / 63, -1.0), 1.0)
    if kind is Kind.SELECTOR_KNOB:
        if positions < 2:
            raise ConfigError("selector normalization needs positions >= 2")
        return min(int(raw7 // (128 / positions)), positions - 1)
    raise WrongKindError(f"cannot normalize for kind {kind}")
