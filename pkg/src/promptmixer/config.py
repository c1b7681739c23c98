"""Config file loading: surface definition, presets, descriptors, backend.

One JSON file describes the whole console; the bundled default reproduces
the shipped device.  See docs/config.md for the schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .compiler import DescriptorEntry, DescriptorTable
from .errors import ConfigError
from .gateway import HttpBackend, StubBackend
from .presets import ModePreset, PersonalityPreset, PresetBank
from .slate import Vocabulary
from .surface import BIPOLAR_KINDS, ControlSpec, ControlSurfaceState, Group, Kind

PERSONALITY_FADER_COUNT = 5


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "stub"
    endpoint: str = ""
    model: str = ""
    credential_env: str = "PROMPTMIXER_API_KEY"
    timeout_ms: int = 30_000
    retry_budget: int = 2


@dataclass(frozen=True)
class AppConfig:
    controls: tuple[ControlSpec, ...]
    presets: PresetBank
    table: DescriptorTable
    vocabulary: Vocabulary
    backend: BackendConfig
    recall_tick_ms: int
    slate_rows: int
    slate_cols: int
    source: str

    def new_surface(self) -> ControlSurfaceState:
        return ControlSurfaceState(list(self.controls))

    def make_backend(self):
        if self.backend.kind == "stub":
            return StubBackend()
        if self.backend.kind == "http":
            return HttpBackend(
                endpoint=self.backend.endpoint,
                model=self.backend.model,
                credential_env=self.backend.credential_env,
            )
        raise ConfigError(f"unknown backend kind {self.backend.kind!r}")

    def personality_fader_ids(self) -> list[str]:
        return [c.id for c in self.controls if c.group is Group.PERSONALITY]

    def mode_for_position(self, position: int) -> ModePreset:
        knob = next(c for c in self.controls if c.id == "mode")
        return self.presets.mode(knob.position_labels[position])

    def to_doc(self) -> dict:
        """Definition document served over GET /config."""
        return {
            "controls": [c.to_doc() for c in self.controls],
            "mode_presets": [
                {"id": m.id, "description": m.description,
                 "task_instruction": m.task_instruction}
                for m in self.presets.modes.values()
            ],
            "personality_presets": [
                {"id": p.id, "description": p.description,
                 "fader_targets": dict(p.fader_targets)}
                for p in self.presets.personas.values()
            ],
            "recall": {
                "duration_ms": self.presets.recall_duration_ms,
                "easing": self.presets.recall_easing,
                "tick_interval_ms": self.recall_tick_ms,
            },
            "temperature_range": list(self.table.temperature_range),
            "slate": {"rows": self.slate_rows, "cols": self.slate_cols},
            "vocabulary": sorted(self.vocabulary.words),
        }


def default_config_path() -> Path:
    return Path(str(resources.files("promptmixer").joinpath("data/default_config.json")))


def load_config(path: str | Path | None = None) -> AppConfig:
    path = Path(path) if path else default_config_path()
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    try:
        controls = tuple(_parse_control(c) for c in doc["surface"]["controls"])
        modes = [ModePreset(id=m["id"], description=m.get("description", ""),
                            task_instruction=m["task_instruction"])
                 for m in doc["mode_presets"]]
        personas = [PersonalityPreset(id=p["id"],
                                      description=p.get("description", ""),
                                      fader_targets=dict(p["fader_targets"]))
                    for p in doc["personality_presets"]]
        recall = doc.get("recall", {})
        presets = PresetBank(
            modes, personas,
            recall_duration_ms=int(recall.get("duration_ms", 800)),
            recall_easing=recall.get("easing", "linear"),
        )
        table = _parse_descriptors(doc, controls)
        backend_doc = doc.get("backend", {})
        backend = BackendConfig(
            kind=backend_doc.get("kind", "stub"),
            endpoint=backend_doc.get("endpoint", ""),
            model=backend_doc.get("model", ""),
            credential_env=backend_doc.get("credential_env",
                                           "PROMPTMIXER_API_KEY"),
            timeout_ms=int(backend_doc.get("timeout_ms", 30_000)),
            retry_budget=int(backend_doc.get("retry_budget", 2)),
        )
        vocab_path = path.parent / doc.get("vocabulary_file", "vocabulary.txt")
        vocabulary = Vocabulary.from_file(vocab_path)
        slate = doc.get("slate", {})
        config = AppConfig(
            controls=controls,
            presets=presets,
            table=table,
            vocabulary=vocabulary,
            backend=backend,
            recall_tick_ms=int(recall.get("tick_interval_ms", 50)),
            slate_rows=int(slate.get("rows", 4)),
            slate_cols=int(slate.get("cols", 6)),
            source=str(path),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from exc

    _validate(config)
    return config


def _parse_control(c: dict) -> ControlSpec:
    return ControlSpec(
        id=c["id"],
        kind=Kind(c["kind"]),
        group=Group(c["group"]),
        pole_labels=tuple(c.get("pole_labels", ())),
        positions=int(c.get("positions", 0)),
        position_labels=tuple(c.get("position_labels", ())),
        default=c.get("default", 0),
    )


def _parse_descriptors(doc: dict, controls: tuple[ControlSpec, ...]) -> DescriptorTable:
    by_id = {c.id: c for c in controls}
    entries = []
    for control_id, templates in doc.get("descriptors", {}).items():
        spec = by_id.get(control_id)
        if spec is None:
            raise ConfigError(f"descriptor for unknown control {control_id!r}")
        if spec.group not in (Group.PERSONALITY, Group.FILTERS, Group.EFFECTS):
            raise ConfigError(f"{control_id}: only personality, filter and "
                              f"effect controls take descriptors")
        entries.append(DescriptorEntry(
            control_id=control_id,
            section=spec.group.value,
            bipolar=spec.kind in BIPOLAR_KINDS,
            templates=tuple(templates),
        ))
    t_range = doc.get("temperature_range", [0.0, 1.5])
    return DescriptorTable(entries, temperature_range=(t_range[0], t_range[1]))


def _validate(config: AppConfig) -> None:
    fader_ids = set(config.personality_fader_ids())
    if len(fader_ids) != PERSONALITY_FADER_COUNT:
        raise ConfigError(
            f"expected {PERSONALITY_FADER_COUNT} personality faders, "
            f"got {len(fader_ids)}"
        )
    for persona in config.presets.personas.values():
        if set(persona.fader_targets) != fader_ids:
            raise ConfigError(
                f"preset {persona.id}: fader targets must cover exactly the "
                f"personality faders"
            )
    mode_knob = next((c for c in config.controls if c.id == "mode"), None)
    if mode_knob is None or mode_knob.kind is not Kind.SELECTOR_KNOB:
        raise ConfigError("surface needs a 'mode' selector knob")
    for label in mode_knob.position_labels:
        config.presets.mode(label)  # raises UnknownModeError
    preset_knob = next(
        (c for c in config.controls if c.id == "personality_preset"), None)
    if preset_knob is None or preset_knob.kind is not Kind.SELECTOR_KNOB:
        raise ConfigError("surface needs a 'personality_preset' selector knob")
    for label in preset_knob.position_labels:
        config.presets.persona(label)
