"""Command-line entry points.

    promptmixer compile --state controls.json --tiles "ocean dream"
    promptmixer serve --port 8321 [--midi-port NAME | --midi-capture FILE]
    promptmixer replay session.log
    promptmixer stub-session script.txt [--log session.log]
    promptmixer report session.log --out-dir report/

The stub-session script format is one command per line (``#`` comments):

    place ROW COL WORD      remove ROW COL
    set CONTROL VALUE       mode ID          preset ID
    mixerless on|off        submit
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compiler import compile_chain
from .console import Engine, SessionLog, StepClock, replay
from .errors import MixerError
from .gateway import StubBackend
from .config import load_config
from .midi import MidiAdapter, MidiMapping


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MixerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promptmixer",
        description="Virtual mixing console compiling control state into "
                    "LLM prompt chains",
    )
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("compile", help="compile one chain and print it")
    p.add_argument("--state", help="JSON file of control values (id -> value)")
    p.add_argument("--tiles", required=True, help="input text")
    p.add_argument("--mixerless", action="store_true",
                   help="tiles-only baseline compilation")
    p.add_argument("--keep-mode", action="store_true",
                   help="keep the mode instruction in a mixerless chain")
    p.add_argument("--config", help="console config file")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("serve", help="run the HTTP/WebSocket service")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", help="console config file")
    p.add_argument("--log", help="session log file")
    p.add_argument("--midi-port", help="platform MIDI input port name "
                                       "(needs the [midi] extra)")
    p.add_argument("--midi-capture", help="raw MIDI capture file applied "
                                          "at startup")
    p.add_argument("--midi-mapping", help="MIDI mapping file "
                                          "(default: bundled template)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="verify a session log recompiles "
                                      "byte-exactly")
    p.add_argument("logfile")
    p.add_argument("--config", help="console config file")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("stub-session", help="run a scripted session against "
                                            "the offline stub backend")
    p.add_argument("script")
    p.add_argument("--log", default="session.log", help="session log file")
    p.add_argument("--config", help="console config file")
    p.set_defaults(func=cmd_stub_session)

    p = sub.add_parser("report", help="render figures and a CSV from a "
                                      "session log")
    p.add_argument("logfile")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--config", help="console config file")
    p.set_defaults(func=cmd_report)

    return parser


def cmd_compile(args) -> int:
    config = load_config(args.config)
    state = config.new_surface()
    if args.state:
        overrides = json.loads(Path(args.state).read_text(encoding="utf-8"))
        for control_id, raw in overrides.items():
            state.set_control(control_id, raw)
    mode = config.mode_for_position(state.value("mode"))
    chain = compile_chain(state.snapshot(), args.tiles, mode, config.table,
                          mixerless=args.mixerless,
                          mixerless_keep_mode=args.keep_mode)
    sys.stdout.write(chain.to_bytes().decode("utf-8") + "\n")
    return 0


def cmd_serve(args) -> int:
    from .server import attach_midi_port, create_app

    config = load_config(args.config)
    engine = Engine(config, log_path=args.log, inline_completion=False)
    app = create_app(engine, realtime=True)

    if args.midi_capture or args.midi_port:
        mapping_path = args.midi_mapping or (
            Path(config.source).parent / "midi_mapping.json")
        mapping = MidiMapping.from_doc(
            json.loads(Path(mapping_path).read_text(encoding="utf-8")))
        adapter = MidiAdapter(mapping=mapping, state=engine.state)
        adapter.mapping.validate(engine.state)
        if args.midi_capture:
            data = Path(args.midi_capture).read_bytes()
            for control_id, value in adapter.feed(data):
                engine.apply({"kind": "set_control", "id": control_id,
                              "raw": value})
            print(f"applied MIDI capture {args.midi_capture} "
                  f"({adapter.dropped} events unmapped)")
        if args.midi_port:
            attach_midi_port(app, engine, adapter, args.midi_port)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_replay(args) -> int:
    config = load_config(args.config)
    records = SessionLog.parse(Path(args.logfile).read_text(encoding="utf-8"))
    result = replay(records, config)
    for check in result.checks:
        status = "OK" if check.matches else "MISMATCH"
        print(f"chain@seq {check.seq}: {status}")
    print(f"{len(result.checks)} chain(s), "
          f"final revision {result.engine.state.revision}")
    if not result.all_match:
        print("replay FAILED: recompiled chains differ", file=sys.stderr)
        return 1
    return 0


def cmd_stub_session(args) -> int:
    config = load_config(args.config)
    engine = Engine(config, backend=StubBackend(), log_path=args.log,
                    clock=StepClock())
    script = Path(args.script).read_text(encoding="utf-8")
    try:
        for lineno, command in parse_script(script):
            events = engine.apply(command)
            for event in events:
                if event["kind"] == "error":
                    print(f"line {lineno}: {event['error']}: "
                          f"{event['message']}", file=sys.stderr)
                    return 1
                if event["kind"] == "response_ready":
                    print(f"> {event['input_text']}")
                    print(event["text"])
    finally:
        engine.close()
    return 0


def cmd_report(args) -> int:
    from .report import write_report

    config = load_config(args.config)
    for path in write_report(args.logfile, args.out_dir, config):
        print(path)
    return 0


def parse_script(text: str) -> list[tuple[int, dict]]:
    """Parse a stub-session script into (line number, command) pairs."""
    commands = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        op, rest = parts[0], parts[1:]
        try:
            if op == "place":
                command = {"kind": "place_tile", "row": int(rest[0]),
                           "col": int(rest[1]), "word": rest[2]}
            elif op == "remove":
                command = {"kind": "remove_tile", "row": int(rest[0]),
                           "col": int(rest[1])}
            elif op == "set":
                command = {"kind": "set_control", "id": rest[0],
                           "raw": float(rest[1])}
            elif op == "mode":
                command = {"kind": "select_mode", "id": rest[0]}
            elif op == "preset":
                command = {"kind": "select_personality_preset", "id": rest[0]}
            elif op == "mixerless":
                command = {"kind": "set_mixerless",
                           "enabled": rest[0] == "on"}
            elif op == "submit":
                command = {"kind": "submit"}
            else:
                raise ValueError(f"unknown op {op!r}")
        except (IndexError, ValueError) as exc:
            raise MixerError(f"script line {lineno}: {exc}") from exc
        commands.append((lineno, command))
    return commands


if __name__ == "__main__":
    sys.exit(main())
