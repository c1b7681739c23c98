"""Selector-knob presets and simulated motorized-fader recall.

Mode presets swap the task instruction the compiler embeds; personality
presets store one target value per personality fader.  Selecting a
personality preset does not move the faders directly: it yields a
``RecallPlan`` whose ticks the console owner applies, the way motorized
faders travel to a stored scene.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .errors import ConfigError, UnknownModeError, UnknownPresetError

#: easing curves available to recall plans; each maps [0,1] -> [0,1],
#: is monotone, and hits both endpoints exactly
EASINGS: dict[str, Callable[[float], float]] = {
    "linear": lambda u: u,
    "smoothstep": lambda u: u * u * (3 - 2 * u),
}


@dataclass(frozen=True)
class ModePreset:
    id: str
    description: str
    task_instruction: str


@dataclass(frozen=True)
class PersonalityPreset:
    id: str
    description: str
    fader_targets: Mapping[str, float]

    def __post_init__(self):
        for fid, v in self.fader_targets.items():
            if not -1.0 <= v <= 1.0:
                raise ConfigError(f"{self.id}: target {fid}={v} outside [-1, 1]")


@dataclass(frozen=True)
class RecallPlan:
    """Per-fader (start, target) trajectories over a fixed duration."""

    moves: tuple[tuple[str, float, float], ...]  # (fader id, start, target)
    duration_ms: int
    easing: str = "linear"

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ConfigError("recall duration must be positive")
        if self.easing not in EASINGS:
            raise ConfigError(f"unknown easing {self.easing!r}")

    def values_at(self, t_ms: float) -> dict[str, float]:
        """Fader values at time t; exact starts at t=0, exact targets at t>=duration."""
        if t_ms <= 0:
            return {fid: start for fid, start, _ in self.moves}
        if t_ms >= self.duration_ms:
            return {fid: target for fid, _, target in self.moves}
        u = EASINGS[self.easing](t_ms / self.duration_ms)
        return {
            fid: start + (target - start) * u
            for fid, start, target in self.moves
        }

    @property
    def targets(self) -> dict[str, float]:
        return {fid: target for fid, _, target in self.moves}

    @property
    def starts(self) -> dict[str, float]:
        return {fid: start for fid, start, _ in self.moves}


class PresetBank:
    """The two selector knobs' configured contents."""

    def __init__(self, modes: list[ModePreset], personas: list[PersonalityPreset],
                 recall_duration_ms: int = 800, recall_easing: str = "linear"):
        self.modes = {m.id: m for m in modes}
        self.personas = {p.id: p for p in personas}
        if len(self.modes) != len(modes) or len(self.personas) != len(personas):
            raise ConfigError("duplicate preset ids")
        self.recall_duration_ms = recall_duration_ms
        self.recall_easing = recall_easing

    def mode(self, mode_id: str) -> ModePreset:
        try:
            return self.modes[mode_id]
        except KeyError:
            raise UnknownModeError(mode_id) from None

    def persona(self, preset_id: str) -> PersonalityPreset:
        try:
            return self.personas[preset_id]
        except KeyError:
            raise UnknownPresetError(preset_id) from None

    def plan_recall(self, preset_id: str,
                    current: Mapping[str, float]) -> RecallPlan:
        """Build the motor trajectory from the faders' current values.

        The surface is not mutated here; applying ticks is the owner's job.
        """
        persona = self.persona(preset_id)
        moves = tuple(
            (fid, float(current[fid]), float(target))
            for fid, target in persona.fader_targets.items()
        )
        return RecallPlan(moves=moves, duration_ms=self.recall_duration_ms,
                          easing=self.recall_easing)
