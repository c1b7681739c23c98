#!/usr/bin/env python3
"""Regenerate the golden fixtures under tests/golden/.

Run from the repository root after a deliberate change to the shipped
config or compiler:

    python tests/generate_goldens.py

The golden chain matrix pins all 16 (personality preset x mode) compilations
of the default config; session.log pins a representative scripted session.
Commit the diff together with the change that caused it.
"""

from pathlib import Path

from promptmixer.config import load_config
from promptmixer.console import Engine, StepClock
from promptmixer.gateway import StubBackend

GOLDEN_DIR = Path(__file__).parent / "golden"

GOLDEN_TILES = ("ocean", "dream")


def build_matrix_engine(config, persona_id, mode_id):
    engine = Engine(config, backend=StubBackend(), clock=StepClock())
    for col, word in enumerate(GOLDEN_TILES):
        engine.apply({"kind": "place_tile", "row": 0, "col": col,
                      "word": word})
    engine.apply({"kind": "select_mode", "id": mode_id})
    engine.apply({"kind": "select_personality_preset", "id": persona_id})
    engine.apply({"kind": "submit"})
    return engine


def golden_matrix_chain(config, persona_id, mode_id) -> bytes:
    engine = build_matrix_engine(config, persona_id, mode_id)
    assert len(engine.compiled_chains) == 1
    return engine.compiled_chains[0]


def run_golden_session(config, log_path) -> Engine:
    engine = Engine(config, backend=StubBackend(), clock=StepClock(),
                    log_path=log_path)
    for command in golden_session_commands():
        engine.apply(command)
    engine.close()
    return engine


def golden_session_commands():
    return [
        {"kind": "place_tile", "row": 0, "col": 0, "word": "blue"},
        {"kind": "place_tile", "row": 0, "col": 1, "word": "sky"},
        {"kind": "select_mode", "id": "Compose"},
        {"kind": "select_personality_preset", "id": "Accountant"},
        {"kind": "set_control", "id": "length", "raw": 1.0},
        {"kind": "set_control", "id": "politics", "raw": -0.8},
        {"kind": "submit"},
        {"kind": "remove_tile", "row": 0, "col": 1},
        {"kind": "place_tile", "row": 1, "col": 0, "word": "storm"},
        {"kind": "set_control", "id": "temperature", "raw": 0.9},
        {"kind": "select_personality_preset", "id": "Bestie"},
        {"kind": "submit"},
        {"kind": "set_mixerless", "enabled": True},
        {"kind": "submit"},
    ]


def main() -> None:
    config = load_config()
    GOLDEN_DIR.mkdir(exist_ok=True)
    for persona_id in config.presets.personas:
        for mode_id in config.presets.modes:
            chain = golden_matrix_chain(config, persona_id, mode_id)
            path = GOLDEN_DIR / f"chain_{persona_id}_{mode_id}.json"
            path.write_bytes(chain + b"\n")
            print(f"wrote {path}")
    run_golden_session(config, GOLDEN_DIR / "session.log")
    print(f"wrote {GOLDEN_DIR / 'session.log'}")


if __name__ == "__main__":
    main()
