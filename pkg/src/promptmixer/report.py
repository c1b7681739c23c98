"""Session-log reporting: delimited event table plus rendered figures.

``write_report`` reconstructs the control timeline by re-running the logged
commands, then writes three artifacts into the output directory:

* ``events.csv``              one row per session record
* ``fader_trajectories.png``  personality fader values over the session
* ``final_surface.png``       bar chart of the final control positions
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .config import AppConfig
from .console import COMMAND_KINDS, Engine, StepClock
from .gateway import StubBackend
from .surface import Kind

CSV_COLUMNS = ("seq", "ts_ms", "kind", "control", "value", "row", "col",
               "word", "detail")


def _flatten(record: dict) -> dict:
    payload = record.get("payload", {})
    row = {
        "seq": record["seq"],
        "ts_ms": record["ts_ms"],
        "kind": record["kind"],
        "control": payload.get("id", ""),
        "value": payload.get("value", payload.get("raw", "")),
        "row": payload.get("row", ""),
        "col": payload.get("col", ""),
        "word": payload.get("word", ""),
        "detail": "",
    }
    if record["kind"] == "submitted":
        row["detail"] = payload.get("tiles", "")
    elif record["kind"] == "response_received":
        row["detail"] = payload.get("text", "")
    elif record["kind"] == "error":
        row["detail"] = f"{payload.get('error')}: {payload.get('message')}"
    return row


def _fader_timeline(records: list[dict], config: AppConfig):
    """Per-fader value after each command record, by re-running the session."""
    engine = Engine(config, backend=StubBackend(), clock=StepClock())
    fader_ids = config.personality_fader_ids()
    steps = [0]
    series = {fid: [engine.state.value(fid)] for fid in fader_ids}
    from .console import _record_to_command  # late import: report-only helper

    for record in records:
        if record["kind"] not in COMMAND_KINDS:
            continue
        engine.apply(_record_to_command(record["kind"], record["payload"]))
        steps.append(record["seq"])
        for fid in fader_ids:
            series[fid].append(engine.state.value(fid))
    return steps, series, engine


def write_report(log_path: str | Path, out_dir: str | Path,
                 config: AppConfig) -> list[Path]:
    """Render the report; returns the paths written."""
    from .console import SessionLog

    records = SessionLog.parse(Path(log_path).read_text(encoding="utf-8"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "events.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for record in records:
            writer.writerow(_flatten(record))
    written.append(csv_path)

    steps, series, engine = _fader_timeline(records, config)

    fig, ax = plt.subplots(figsize=(9, 4.5))
    for fid, values in series.items():
        spec = engine.state.spec(fid)
        label = "—".join(spec.pole_labels)
        ax.step(steps, values, where="post", label=label)
    ax.set_ylim(-1.1, 1.1)
    ax.set_xlabel("session record")
    ax.set_ylabel("fader position")
    ax.set_title("Personality fader trajectories")
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    traj_path = out / "fader_trajectories.png"
    fig.savefig(traj_path, dpi=120)
    plt.close(fig)
    written.append(traj_path)

    fig, ax = plt.subplots(figsize=(9, 4))
    ids, values, colors = [], [], []
    palette = {"personality": "#4878d0", "filters": "#6acc64",
               "effects": "#d65f5f", "modes": "#956cb4", "presets": "#8c613c"}
    for spec in engine.state.specs:
        if spec.kind is Kind.SELECTOR_KNOB:
            continue
        ids.append(spec.id)
        values.append(engine.state.value(spec.id))
        colors.append(palette.get(spec.group.value, "#777777"))
    ax.bar(ids, values, color=colors)
    ax.set_ylim(-1.1, 1.1)
    ax.set_ylabel("position")
    ax.set_title("Final control surface")
    ax.axhline(0.0, color="grey", lw=0.5)
    plt.setp(ax.get_xticklabels(), rotation=40, ha="right", fontsize=8)
    fig.tight_layout()
    surface_path = out / "final_surface.png"
    fig.savefig(surface_path, dpi=120)
    plt.close(fig)
    written.append(surface_path)

    return written
